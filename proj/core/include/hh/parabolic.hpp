#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "hh/params.hpp"
#include "hh/radial_field.hpp"

namespace hh {

struct ParabolicState {
    RadialGrid grid;
    std::vector<double> U;
    double s = 0;
    double dt_last = 0;
    // r^{N-1} integral of U over the control volumes.
    double mass = 0;
    // Accumulated integral of negative parts removed by clipping.
    double clipped_mass = 0;
};

ParabolicState make_state(RadialGrid grid, std::vector<double> U, double s = 0);

// Vertex-centred finite volumes for dU/ds = Lap(U^m) + r^sigma U^m - U/(m-1) with control volumes
// [r_{i-1/2}, r_{i+1/2}] (zero flux at the origin), r^{N-1} weights and four-point face derivatives.
// Nodes below high_order_rel * r_max integrate the source and absorption terms exactly against the local
// cubic interpolant; outer nodes use nodal values times exact weight integrals. The last node is held at zero.
class RescaledOperator {
public:
    static constexpr int band = 3;

    RescaledOperator(const ProblemParams& params, RadialGrid grid, double high_order_rel = 0.5);

    const RadialGrid& grid() const { return grid_; }
    std::vector<double> rhs(const std::vector<double>& U) const;
    // r^{N-1} integral of U over the control volumes.
    double mass(const std::vector<double>& U) const;
    const std::vector<double>& volumes() const { return vol_; }
    // safety * h_min^2 / (2 N m max(U)^{m-1}); +inf for the zero state.
    double stable_dt(const std::vector<double>& U, double safety) const;

    // Backward Euler step solved by Newton; false when Newton fails to converge.
    bool implicit_step(std::vector<double>& U, double dt, double tol, int max_iter) const;

private:
    ProblemParams params_;
    RadialGrid grid_;
    // Row i, entry k couples node i to node i - band + k.
    std::vector<std::array<double, 2 * band + 1>> A_, B_;
    std::vector<double> vol_;
};

std::vector<double> rescaled_rhs(const ParabolicState& state, const ProblemParams& params);

struct ParabolicControls {
    double safety = 0.4;
    double dt_min = 1e-14;
    // Implicit step size in s.
    double dt = 2e-3;
    bool implicit = true;
    int cells = 2000;
    // Geometric cells from origin_cell_rel * r_max up to the uniform spacing when sigma + 2 is not an
    // integer (the origin expansion then has non-polynomial terms); uniform otherwise.
    double origin_cell_rel = 1e-10;
    double origin_ratio = 1.05;
    // Simulation radius as a multiple of the elliptic support radius.
    double r_max_factor = 1.25;
    double newton_tol = 1e-12;
    int newton_max_iter = 30;
    double sample_ds = 0.05;
    // Numerical support: nodes with U above this fraction of max U.
    double support_level = 1e-10;
};

// One explicit Euler step of size min(dt, stable_dt). Throws StabilityViolation when that is below dt_min.
ParabolicState step(const ParabolicState& state, const ProblemParams& params, double dt,
                    const ParabolicControls& controls = {});

// One backward Euler step of size dt, halving on Newton failure. Throws StabilityViolation below dt_min.
ParabolicState implicit_step(const ParabolicState& state, const ProblemParams& params, double dt,
                             const ParabolicControls& controls = {});

// Uniform or origin-graded grid over r_max_factor times the elliptic support radius.
RadialGrid simulation_grid(const RadialProfile& elliptic, const ProblemParams& params,
                           const ParabolicControls& controls = {});

// Every cell split in two.
RadialGrid bisect_cells(const RadialGrid& g);

// f = V^{1/m} of the elliptic profile on the given grid.
ParabolicState separate_variables_state(const RadialProfile& elliptic, const ProblemParams& params,
                                        RadialGrid grid);
ParabolicState separate_variables_state(const RadialProfile& elliptic, const ProblemParams& params,
                                        const ParabolicControls& controls = {});

// Max over nodes with f > 0.01 max f of |U - f| / f.
double relative_deviation(const std::vector<double>& U, const std::vector<double>& f);

struct TrackingReport {
    double horizon_s = 0;
    double delta = 0;
    std::vector<std::pair<double, double>> deviation_history;
    double max_deviation = 0;
    // Pass/fail only for delta = 0; nullopt otherwise.
    std::optional<bool> passed;
    double support_initial = 0;
    double support_final = 0;
    double support_growth_cells = 0;
    double clipped_mass_rel = 0;
    // Max relative error of u = (T - t)^{-1/(m-1)} U against (T - t)^{-1/(m-1)} f at t = 1 - e^{-1}, T = 1.
    std::optional<double> original_variables_error;
    long steps = 0;
    int cells = 0;
};

// U = f (1 + delta * exp(-(2r/R)^2)) integrated to horizon_s.
TrackingReport track_separate_variables(const RadialProfile& elliptic, const ProblemParams& params,
                                        double horizon_s, double delta, const ParabolicControls& controls = {});

struct StationarityResidual {
    std::size_t cells = 0;
    // max |rhs(f)| / max f
    double sup_rel = 0;
    // control-volume r^{N-1} L2 norm of rhs(f) over that of f
    double l2_rel = 0;
    // control-volume r^{N-1} L1 norm of rhs(f) over the mass of f
    double l1_rel = 0;
};

StationarityResidual stationarity_residual(const RadialProfile& elliptic, const ProblemParams& params,
                                           const RadialGrid& grid);

struct StationarityOrder {
    StationarityResidual coarse;
    StationarityResidual fine;
    double order_sup = 0;
    double order_l2 = 0;
    double order_l1 = 0;
};

// Residual on the simulation grid and on its bisection.
StationarityOrder stationarity_order(const RadialProfile& elliptic, const ProblemParams& params,
                                     const ParabolicControls& controls = {});

}  // namespace hh
