#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hh/params.hpp"
#include "hh/radial_field.hpp"

namespace hh {

// Piecewise linear discretisation of J and the constraint on a fixed grid.
// Integrals are evaluated exactly as the radial-field functionals do on a derivative-free profile.
class P1Discretization {
public:
    P1Discretization(const ProblemParams& params, RadialGrid grid);

    std::size_t size() const { return grid_.size(); }
    const RadialGrid& grid() const { return grid_; }
    const ProblemParams& params() const { return params_; }

    double dirichlet(std::span<const double> V) const;
    double lmu(std::span<const double> V) const;
    double weighted(std::span<const double> V) const;
    double J(std::span<const double> V) const;
    // J(V + dV) - J(V) evaluated without cancellation.
    double delta_J(std::span<const double> V, std::span<const double> dV) const;

    // dJ/dV_j: stiffness times V plus the absorption term tested against the hat functions.
    std::vector<double> gradient(std::span<const double> V) const;
    // Weighted mass times V; half the constraint gradient.
    std::vector<double> weighted_mass_times(std::span<const double> V) const;
    // Lumped r^{N-1} masses, used as isotonic weights.
    const std::vector<double>& lumped_mass() const { return lumped_; }

    // Tridiagonal matrices as (diag, upper) pairs.
    const std::vector<double>& stiffness_diag() const { return kd_; }
    const std::vector<double>& stiffness_upper() const { return ku_; }
    const std::vector<double>& mass_diag() const { return md_; }
    const std::vector<double>& mass_upper() const { return mu_; }
    // Second variation of the absorption part at V; weights use max(V, floor).
    void absorption_hessian(std::span<const double> V, double floor, std::vector<double>& diag,
                            std::vector<double>& upper) const;

    RadialProfile profile(std::vector<double> V) const;

private:
    ProblemParams params_;
    RadialGrid grid_;
    std::vector<double> kd_, ku_, md_, mu_, lumped_;
    // Gauss points: r^{N-1} * h * w_q * sphere, and t_q.
    std::vector<double> gw_;
    std::vector<double> gt_;
};

// p scaled to unit weighted norm. Throws DegenerateProfile when the weighted norm vanishes.
RadialProfile project_constraint(const RadialProfile& p, const ProblemParams& params);

// Gradient of the discrete J on the profile's own grid.
std::vector<double> gradient_J(const RadialProfile& p, const ProblemParams& params);

struct MinimizerControls {
    int grid_size = 2000;
    // 0 selects (1 + tail_margin) times the initial support radius.
    double r_max = 0;
    double tol = 1e-8;
    long max_iter = 100000;
    double armijo_factor = 0.5;
    double sufficient_decrease = 1e-4;
    double grading_ratio = 1.05;
    double min_cell_rel = 1e-10;
    // 0 runs a coarse shooting pass for the support radius of the constrained minimiser.
    double initial_support = 0;
    double tail_margin = 0.25;
    // Hessian weights of the absorption term use max(V, hessian_floor * max V).
    double hessian_floor = 1e-30;
    double ckn_tol = 1e-4;
    // Projected gradient runs until the KKT residual reaches newton_switch; an active-set Newton
    // iteration on the support nodes then polishes to tol.
    double newton_switch = 1e-5;
    int newton_max_iter = 500;
};

struct MinimizerState {
    RadialProfile profile;
    double J_value = 0;
    long iteration = 0;
    double step_size = 0;
    double kkt_residual = 0;
    // Projected-gradient objective values; non-increasing.
    std::vector<double> J_history;
    long newton_iterations = 0;
};

struct ScalingReport {
    // dirichlet + lmu/(m-1) at the constrained minimiser.
    double lambda = 0;
    // Least-squares multiplier of the discrete Euler-Lagrange residual.
    double lambda_rayleigh = 0;
    double A_w = 0;
    double B_w = 0;
    double lambda_opt = 0;
    double J_min = 0;
    double J_star = 0;
    double K_star = 0;
    double S_of_minimizer = 0;
    double S_rel_error = 0;
    // Dual norm of the Euler-Lagrange residual, relative to that of the gradient.
    double euler_lagrange_residual = 0;
};

struct MinimizeResult {
    MinimizerState state;
    ScalingReport report;
    // v = lambda^{2m/((m-1)(sigma+2))} w(lambda^{-1/(sigma+2)} r).
    RadialProfile solution;
    double solution_V0 = 0;
    double solution_R = 0;
    double initial_support = 0;
    std::vector<std::string> warnings;
};

// Starting profile (1 - (r/R)^2)_+^{2m/(m-1)} on the given grid, constraint-projected.
RadialProfile initial_profile(const ProblemParams& params, const RadialGrid& grid, double support);

// Support radius of the constrained minimiser estimated from a coarse shooting run.
double estimate_minimizer_support(const ProblemParams& params);

MinimizerState minimize(const ProblemParams& params, const RadialProfile& initial,
                        const MinimizerControls& controls = {});

ScalingReport scaling_report(const MinimizerState& state, const ProblemParams& params);

RadialProfile rescale_to_solution(const RadialProfile& w, double lambda, const ProblemParams& params);

// Returns K_star; throws ConsistencyFailure if |S(v_*) - K_star| / K_star exceeds tol.
double ckn_constant(const MinimizerState& state, const ScalingReport& report, const ProblemParams& params,
                    double tol = 1e-4);

// The two-parameter family w_lambda(x) = lambda w(lambda^{2/(N+sigma)} N_sigma(w)^{2/(N+sigma)} x).
RadialProfile scaling_family_member(const RadialProfile& w, double lambda, const ProblemParams& params);

// A(w) lambda^a + B(w) lambda^{-b} for a reference minimum J_min.
struct ScalingMap {
    double A = 0;
    double B = 0;
    double a = 0;
    double b = 0;
    double operator()(double lambda) const;
    double lambda_opt() const;
};
ScalingMap scaling_map(const RadialProfile& w, const ProblemParams& params, double J_min);

struct ScalingFamilyCheck {
    std::vector<std::pair<double, double>> samples;
    double J_min = 0;
    bool all_above = false;
    double lambda_opt_formula = 0;
    double lambda_opt_numeric = 0;
    double lambda_opt_rel_error = 0;
};

// J(w_lambda) >= J_min for lambda in {0.25, 0.5, 2, 4}, and the closed-form lambda_opt of w against the
// minimum of the sampled map on a logarithmic grid refined by golden section.
ScalingFamilyCheck scaling_family_check(const RadialProfile& w, const ProblemParams& params, double J_min,
                                        std::span<const double> lambdas = {});

MinimizeResult run_variational(const ProblemParams& params, const MinimizerControls& controls = {});

// Random non-increasing profile with compact support on a uniform grid: a mixture of power caps,
// Gaussians and random monotone staircases.
RadialProfile random_monotone_profile(std::mt19937_64& rng, int cells = 200);

struct RandomSuiteResult {
    std::uint64_t seed = 0;
    std::size_t count = 0;
    double reference = 0;
    double min_S = 0;
    // min_S - reference
    double min_margin = 0;
    // Profiles with S below reference - slack.
    std::size_t below = 0;
};

RandomSuiteResult random_profile_suite(const ProblemParams& params, double reference, std::size_t count,
                                       std::uint64_t seed, double slack = 1e-6);

}  // namespace hh
