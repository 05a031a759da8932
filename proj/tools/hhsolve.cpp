#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "hh/pipeline.hpp"

namespace {

struct ParamFlags {
    hh::RawParams raw;
    std::string config;
};

void add_param_flags(CLI::App* app, ParamFlags& p) {
    app->add_option("--N", p.raw.N, "Space dimension");
    app->add_option("--m", p.raw.m, "Diffusion exponent, m > 1");
    app->add_option("--sigma", p.raw.sigma, "Weight exponent");
    app->add_option("--config", p.config, "key=value file with N, m, sigma; flags given after it are ignored");
}

hh::RawParams resolve(const ParamFlags& p) {
    if (p.config.empty()) return p.raw;
    const hh::ProblemParams P = hh::load_config(p.config);
    return {P.N, P.m, P.sigma};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial free-boundary solver for the weighted porous-medium problem"};
    app.require_subcommand(0, 1);
    bool show_defaults_flag = false;
    app.add_flag("--show-defaults", show_defaults_flag, "Print every default control and tolerance as JSON");

    ParamFlags solve_params;
    hh::SolveOptions solve;
    std::optional<double> v0_lo, v0_hi;
    auto* solve_cmd = app.add_subcommand("solve", "Shooting solve for V(0) and the support radius");
    add_param_flags(solve_cmd, solve_params);
    solve_cmd->add_option("--v0-lo", v0_lo, "Lower end of an explicit V(0) bracket");
    solve_cmd->add_option("--v0-hi", v0_hi, "Upper end of an explicit V(0) bracket");
    solve_cmd->add_option("--rtol", solve.controls.rtol, "Integrator relative tolerance");
    solve_cmd->add_option("--atol", solve.controls.atol, "Integrator absolute tolerance");
    solve_cmd->add_option("--max-iter", solve.controls.max_iter, "Bisection iteration cap");
    solve_cmd->add_option("--out", solve.out, "Profile CSV");

    ParamFlags min_params;
    hh::MinimizeOptions minimize;
    auto* min_cmd = app.add_subcommand("minimize", "Constrained minimisation of the energy functional");
    add_param_flags(min_cmd, min_params);
    min_cmd->add_option("--grid-size", minimize.controls.grid_size, "Number of grid cells");
    min_cmd->add_option("--rmax", minimize.controls.r_max, "Grid radius; 0 selects it from a coarse shooting run");
    min_cmd->add_option("--tol", minimize.controls.tol, "KKT residual tolerance");
    min_cmd->add_option("--max-iter", minimize.controls.max_iter, "Projected-gradient iteration cap");
    min_cmd->add_option("--newton-switch", minimize.controls.newton_switch, "KKT level that starts the Newton polish");
    min_cmd->add_option("--ckn-tol", minimize.controls.ckn_tol, "Tolerance of the extremal-constant identity");
    min_cmd->add_option("--random-profiles", minimize.random_profiles, "Size of the randomized comparison suite");
    min_cmd->add_option("--out", minimize.out, "Rescaled solution profile CSV");
    min_cmd->add_option("--report", minimize.report, "Report JSON");

    hh::VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "Certify a profile file");
    verify_cmd->add_option("--profile", verify.profile, "Profile CSV")->required();
    verify_cmd->add_option("--report", verify.report, "Certificate report JSON");
    verify_cmd->add_option("--tol-pohozaev", verify.tolerances.pohozaev, "Pohozaev residual tolerance");
    verify_cmd->add_option("--tol-pohozaev-pl", verify.tolerances.pohozaev_piecewise_linear,
                           "Pohozaev tolerance for profiles without derivatives");
    verify_cmd->add_option("--tol-ratio", verify.tolerances.ratio, "Energy-ratio tolerance");
    verify_cmd->add_option("--tol-envelope", verify.tolerances.envelope_rel, "Envelope violation relative to V(0)");
    verify_cmd->add_option("--tol-origin-exponent", verify.tolerances.origin_exponent, "Origin exponent tolerance");
    verify_cmd->add_option("--tol-origin-coefficient", verify.tolerances.origin_coefficient,
                           "Origin coefficient tolerance");
    verify_cmd->add_option("--tol-second-derivative", verify.tolerances.second_derivative,
                           "Second-derivative tolerance");
    verify_cmd->add_option("--tol-touchdown-exponent", verify.tolerances.touchdown_exponent,
                           "Touchdown exponent tolerance");
    verify_cmd->add_option("--tol-touchdown-prefactor", verify.tolerances.touchdown_prefactor,
                           "Touchdown prefactor tolerance");
    verify_cmd->add_option("--tol-ode-residual", verify.tolerances.ode_residual, "ODE residual tolerance");

    hh::SimulateOptions simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "Evolve the separate-variables solution in rescaled time");
    sim_cmd->add_option("--profile", simulate.profile, "Elliptic profile CSV")->required();
    sim_cmd->add_option("--horizon-s", simulate.horizon_s, "Rescaled time horizon");
    sim_cmd->add_option("--delta", simulate.delta, "Bump amplitude in [0, 0.1]");
    sim_cmd->add_option("--cells", simulate.controls.cells, "Uniform-spacing cell count");
    sim_cmd->add_option("--dt", simulate.controls.dt, "Implicit step size");
    sim_cmd->add_option("--out", simulate.out, "Deviation history CSV");
    sim_cmd->add_option("--report", simulate.report, "Tracking report JSON");

    hh::SweepSpec sweep;
    sweep.N = {3};
    sweep.m = {1.5, 2, 3};
    sweep.sigma = {-1.5, -1, -0.5};
    auto* sweep_cmd = app.add_subcommand("sweep", "Solve, minimise, cross-validate and verify over a grid");
    sweep_cmd->add_option("--N", sweep.N, "Dimensions")->delimiter(',');
    sweep_cmd->add_option("--m", sweep.m, "Diffusion exponents")->delimiter(',');
    sweep_cmd->add_option("--sigma", sweep.sigma, "Weight exponents")->delimiter(',');
    sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out-dir", sweep.out_dir, "Output directory")->required();

    auto* defaults_cmd = app.add_subcommand("show-defaults", "Print every default control and tolerance as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? hh::ExitOk : hh::ExitUsage;
    }

    try {
        if (show_defaults_flag || defaults_cmd->parsed()) {
            std::cout << hh::defaults_table().dump(2) << "\n";
            return hh::ExitOk;
        }
        if (solve_cmd->parsed()) {
            solve.raw = resolve(solve_params);
            solve.v0_lo = v0_lo;
            solve.v0_hi = v0_hi;
            return hh::run_solve(solve, std::cerr);
        }
        if (min_cmd->parsed()) {
            minimize.raw = resolve(min_params);
            return hh::run_minimize(minimize, std::cerr);
        }
        if (verify_cmd->parsed()) return hh::run_verify(verify, std::cerr);
        if (sim_cmd->parsed()) return hh::run_simulate(simulate, std::cerr);
        if (sweep_cmd->parsed()) return hh::run_sweep_cli(sweep, std::cerr);
    } catch (const hh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hh::exit_code_for(e.code());
    }
    std::cerr << app.help();
    return hh::ExitUsage;
}
