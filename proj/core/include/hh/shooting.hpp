#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hh/params.hpp"
#include "hh/profile_io.hpp"
#include "hh/radial_field.hpp"

namespace hh {

enum class ShotKind { Crossed, Rebounded, Touchdown, NoEvent };

const char* to_string(ShotKind k);

struct ShotOutcome {
    ShotKind kind = ShotKind::NoEvent;
    double V0 = 0;
    // Crossed: r_cross; Rebounded: r_min; Touchdown: R; NoEvent: r where integration stopped.
    double r_event = 0;
    // Crossed: V'(r_cross); Rebounded: V_min; Touchdown: V residual; NoEvent: V at stop.
    double value = 0;
    // Touchdown: V' residual; NoEvent: V' at stop.
    double aux = 0;
    double r_start = 0;
    long steps = 0;
    long rejected = 0;
    // Last accepted local error estimate, scaled to the tolerance (<= 1).
    double local_error = 0;
    // (r, V, V') at accepted steps when requested.
    std::vector<std::array<double, 3>> trace;
};

struct ShootingControls {
    double rtol = 1e-10;
    double atol = 1e-12;
    // 0 selects 50 times the tail-radius heuristic.
    double r_max = 0;
    double event_tol = 1e-12;
    // Touchdown is declared directly when |V| or |V'| at the event falls below these, relative to V0 and V0/r.
    double touch_tol_rel = 1e-15;
    double slope_tol_rel = 1e-15;
    // Series start radius rule.
    double series_tol = 1e-10;
    double series_cap = 1e-6;
    int max_iter = 200;
    double bracket_rel_width = 1e-13;
    // Second bisection stage in binary128 arithmetic.
    bool quad_refine = true;
    double quad_rtol = 1e-18;
    double quad_atol_rel = 1e-36;
    double quad_width_rel = 1e-31;
    double quad_touch_tol_rel = 1e-30;
    double quad_slope_tol_rel = 1e-30;
    // Trajectories of the final bracket must agree to this relative level to be trusted.
    double trust_tol = 1e-10;
    // Values below graft_level * V0 are replaced by the touchdown power law.
    double graft_level = 1e-12;
    int uniform_cells = 4000;
    double grading_ratio = 1.05;
    double tail_factor = 0.25;
    bool keep_trace = false;
    long max_steps = 2000000;
    // Scan grid for automatic brackets.
    double scan_lo = 1e-6;
    double scan_hi = 1e6;
    int scan_per_decade = 4;
    int jobs = 1;
};

double default_r_max(const ProblemParams& params, double V0);

ShotOutcome integrate_from(const ProblemParams& params, double V0, const ShootingControls& controls = {});
ShotOutcome integrate_from_quad(const ProblemParams& params, double V0, const ShootingControls& controls = {});

using ScanEntry = std::pair<double, ShotKind>;

std::vector<ScanEntry> scan_bracket(const ProblemParams& params, std::span<const double> V0_grid,
                                    const ShootingControls& controls = {}, std::vector<std::string>* log = nullptr);
std::vector<double> default_scan_grid(const ShootingControls& controls = {});
// Adjacent pairs of the scan whose kinds are Crossed and Rebounded in either order.
std::vector<std::pair<double, double>> brackets_from_scan(std::span<const ScanEntry> scan);

struct TouchdownFit {
    double exponent = 0;
    double prefactor = 0;
    double x_lo = 0;
    double x_hi = 0;
    int points = 0;
};

struct ShootingResult {
    ProblemParams params;
    double V0_star = 0;
    double R = 0;
    RadialProfile profile;
    double bracket_width = 0;
    double integrator_tolerance = 0;
    double V0_lo = 0;
    double V0_hi = 0;
    ShotOutcome lo;
    ShotOutcome hi;
    int iterations = 0;
    int quad_iterations = 0;
    bool quad_refined = false;
    double series_start = 0;
    // Start of the grafted touchdown layer and edge of the trusted region.
    double graft_start = 0;
    double trust_radius = 0;
    // Smallest grid radius satisfying the tail condition; nullopt if none.
    std::optional<double> tail_r0;
    std::vector<std::string> warnings;

    ProfileHeader header() const;
};

ShootingResult bisect_for_support(const ProblemParams& params, std::pair<double, double> bracket,
                                  const ShootingControls& controls = {});

// scan_bracket over the default grid, then bisect the first bracket.
ShootingResult solve_shooting(const ProblemParams& params, const ShootingControls& controls = {});

// Integral-form ODE residual over the sampled nodes in [r_a, R], normalised by max(1, max r^{N-1}|V'|).
double ode_residual(const RadialProfile& p, const ProblemParams& params);

}  // namespace hh
