#include "hh/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "hh/profile_io.hpp"

namespace hh {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

nlohmann::json num(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

nlohmann::json params_json(const ProblemParams& P) {
    return {{"N", P.N}, {"m", P.m}, {"sigma", P.sigma}, {"regime", to_string(P.regime)}};
}

nlohmann::json shooting_json(const ShootingControls& c) {
    return {{"rtol", c.rtol},
            {"atol", c.atol},
            {"r_max", c.r_max},
            {"event_tol", c.event_tol},
            {"touch_tol_rel", c.touch_tol_rel},
            {"slope_tol_rel", c.slope_tol_rel},
            {"series_tol", c.series_tol},
            {"series_cap", c.series_cap},
            {"max_iter", c.max_iter},
            {"bracket_rel_width", c.bracket_rel_width},
            {"quad_refine", c.quad_refine},
            {"quad_rtol", c.quad_rtol},
            {"quad_atol_rel", c.quad_atol_rel},
            {"quad_width_rel", c.quad_width_rel},
            {"quad_touch_tol_rel", c.quad_touch_tol_rel},
            {"quad_slope_tol_rel", c.quad_slope_tol_rel},
            {"trust_tol", c.trust_tol},
            {"graft_level", c.graft_level},
            {"uniform_cells", c.uniform_cells},
            {"grading_ratio", c.grading_ratio},
            {"tail_factor", c.tail_factor},
            {"max_steps", c.max_steps},
            {"scan_lo", c.scan_lo},
            {"scan_hi", c.scan_hi},
            {"scan_per_decade", c.scan_per_decade}};
}

nlohmann::json minimizer_json(const MinimizerControls& c) {
    return {{"grid_size", c.grid_size},
            {"r_max", c.r_max},
            {"tol", c.tol},
            {"max_iter", c.max_iter},
            {"armijo_factor", c.armijo_factor},
            {"sufficient_decrease", c.sufficient_decrease},
            {"grading_ratio", c.grading_ratio},
            {"min_cell_rel", c.min_cell_rel},
            {"initial_support", c.initial_support},
            {"tail_margin", c.tail_margin},
            {"hessian_floor", c.hessian_floor},
            {"ckn_tol", c.ckn_tol},
            {"newton_switch", c.newton_switch},
            {"newton_max_iter", c.newton_max_iter}};
}

nlohmann::json certificate_json(const CertificateTolerances& t) {
    return {{"pohozaev", t.pohozaev},
            {"pohozaev_piecewise_linear", t.pohozaev_piecewise_linear},
            {"ratio", t.ratio},
            {"envelope_rel", t.envelope_rel},
            {"origin_exponent", t.origin_exponent},
            {"origin_coefficient", t.origin_coefficient},
            {"second_derivative", t.second_derivative},
            {"touchdown_exponent", t.touchdown_exponent},
            {"touchdown_prefactor", t.touchdown_prefactor},
            {"ode_residual", t.ode_residual},
            {"rounding_floor", t.rounding_floor}};
}

nlohmann::json parabolic_json(const ParabolicControls& c) {
    return {{"safety", c.safety},
            {"dt_min", c.dt_min},
            {"dt", c.dt},
            {"implicit", c.implicit},
            {"cells", c.cells},
            {"origin_cell_rel", c.origin_cell_rel},
            {"origin_ratio", c.origin_ratio},
            {"r_max_factor", c.r_max_factor},
            {"newton_tol", c.newton_tol},
            {"newton_max_iter", c.newton_max_iter},
            {"sample_ds", c.sample_ds},
            {"support_level", c.support_level}};
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path);
    if (!f) fail(ErrorCode::IoError, "cannot write " + path);
    f << j.dump(2) << "\n";
    if (!f) fail(ErrorCode::IoError, "write failed for " + path);
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

struct RunGuard {
    Manifest manifest;
    Clock::time_point t0 = Clock::now();
    std::vector<std::string> manifest_paths;

    void anchor(const std::string& artifact) {
        if (!artifact.empty()) manifest_paths.push_back(manifest_path_for(artifact));
    }

    int finish(int code) {
        manifest.exit_code = code;
        manifest.wall_clock_seconds = seconds_since(t0);
        for (const auto& path : manifest_paths) {
            try {
                write_manifest(path, manifest);
            } catch (const Error&) {
                if (code == ExitOk) code = ExitUsage;
            }
        }
        return code;
    }
};

int report_error(RunGuard& g, std::ostream& log, const Error& e) {
    log << "error: " << e.what() << "\n";
    g.manifest.parameters["error"] = e.what();
    return g.finish(exit_code_for(e.code()));
}

}  // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter:
        case ErrorCode::IoError:
            return ExitUsage;
        case ErrorCode::BracketInvalid:
        case ErrorCode::NonConvergence:
        case ErrorCode::NoEvent:
            return ExitConvergence;
        case ErrorCode::ConsistencyFailure:
            return ExitVerification;
        default:
            return ExitNumeric;
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorCode::IoError, "sha256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

std::string sha256_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return sha256_hex(ss.str());
}

std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* s = std::getenv("HH_SEED");
    if (!s || !*s) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') return fallback;
    return v;
}

nlohmann::json defaults_table() {
    return {{"shooting", shooting_json({})},
            {"minimizer", minimizer_json({})},
            {"certificates", certificate_json({})},
            {"parabolic", parabolic_json({})},
            {"simulate", {{"horizon_s", SimulateOptions{}.horizon_s}, {"delta", SimulateOptions{}.delta}}},
            {"randomized_suite", {{"profiles", MinimizeOptions{}.random_profiles}, {"seed", seed_from_env()}}},
            {"cross_validation", {{"V0_rel", 1e-3}, {"sup_distance_rel", 1e-3}, {"ckn_rel", 1e-4}}}};
}

nlohmann::json manifest_json(const Manifest& m) {
    auto files = [](const std::vector<std::string>& paths) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& p : paths) {
            nlohmann::json e{{"path", p}};
            if (std::filesystem::exists(p)) e["sha256"] = sha256_file(p);
            else e["sha256"] = nullptr;
            a.push_back(e);
        }
        return a;
    };
    return {{"tool", "hhsolve"},
            {"version", tool_version},
            {"command", m.command},
            {"parameters", m.parameters},
            {"tolerances", m.tolerances},
            {"inputs", files(m.inputs)},
            {"outputs", files(m.outputs)},
            {"exit_code", m.exit_code},
            {"timestamp", {{"utc", utc_timestamp()}, {"wall_clock_seconds", m.wall_clock_seconds}}}};
}

void write_manifest(const std::string& path, const Manifest& m) { write_json_file(path, manifest_json(m)); }

std::string manifest_path_for(const std::string& artifact) { return artifact + ".manifest.json"; }

nlohmann::json to_json(const ScalingReport& r) {
    return {{"lambda", num(r.lambda)},
            {"lambda_rayleigh", num(r.lambda_rayleigh)},
            {"A_w", num(r.A_w)},
            {"B_w", num(r.B_w)},
            {"lambda_opt", num(r.lambda_opt)},
            {"J_min", num(r.J_min)},
            {"J_star", num(r.J_star)},
            {"K_star", num(r.K_star)},
            {"S_of_minimizer", num(r.S_of_minimizer)},
            {"S_rel_error", num(r.S_rel_error)},
            {"euler_lagrange_residual", num(r.euler_lagrange_residual)}};
}

nlohmann::json to_json(const ScalingFamilyCheck& c) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& [l, J] : c.samples) s.push_back({{"lambda", l}, {"J", num(J)}});
    return {{"samples", s},
            {"J_min", num(c.J_min)},
            {"all_above", c.all_above},
            {"lambda_opt_formula", num(c.lambda_opt_formula)},
            {"lambda_opt_numeric", num(c.lambda_opt_numeric)},
            {"lambda_opt_rel_error", num(c.lambda_opt_rel_error)}};
}

nlohmann::json to_json(const RandomSuiteResult& r) {
    return {{"seed", r.seed},   {"count", r.count},           {"reference", num(r.reference)},
            {"min_S", num(r.min_S)}, {"min_margin", num(r.min_margin)}, {"below", r.below}};
}

nlohmann::json to_json(const TrackingReport& r) {
    nlohmann::json h = nlohmann::json::array();
    for (const auto& [s, d] : r.deviation_history) h.push_back({s, num(d)});
    nlohmann::json j{{"horizon_s", r.horizon_s},
                     {"delta", r.delta},
                     {"cells", r.cells},
                     {"steps", r.steps},
                     {"max_deviation", num(r.max_deviation)},
                     {"deviation_history", h},
                     {"support_initial", r.support_initial},
                     {"support_final", r.support_final},
                     {"support_growth_cells", r.support_growth_cells},
                     {"clipped_mass_rel", num(r.clipped_mass_rel)}};
    j["passed"] = r.passed ? nlohmann::json(*r.passed) : nlohmann::json(nullptr);
    j["verdict"] = r.passed ? (*r.passed ? "pass" : "fail") : "reported";
    j["original_variables_error"] = r.original_variables_error ? num(*r.original_variables_error) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const StationarityOrder& o) {
    auto res = [](const StationarityResidual& r) {
        return nlohmann::json{{"cells", r.cells}, {"sup_rel", num(r.sup_rel)}, {"l2_rel", num(r.l2_rel)},
                              {"l1_rel", num(r.l1_rel)}};
    };
    return {{"coarse", res(o.coarse)}, {"fine", res(o.fine)}, {"order_sup", num(o.order_sup)},
            {"order_l2", num(o.order_l2)}, {"order_l1", num(o.order_l1)}};
}

int run_solve(const SolveOptions& o, std::ostream& log) {
    RunGuard g;
    g.manifest.command = "solve";
    g.manifest.parameters = {{"N", o.raw.N}, {"m", o.raw.m}, {"sigma", o.raw.sigma}};
    g.manifest.tolerances = shooting_json(o.controls);
    g.anchor(o.out);
    try {
        if (o.v0_lo.has_value() != o.v0_hi.has_value())
            fail(ErrorCode::InvalidParameter, "--v0-lo and --v0-hi must be given together");
        const ProblemParams P = validate(o.raw);
        const ShootingResult r = o.v0_lo ? bisect_for_support(P, {*o.v0_lo, *o.v0_hi}, o.controls)
                                         : solve_shooting(P, o.controls);
        g.manifest.parameters["V0_star"] = r.V0_star;
        g.manifest.parameters["R"] = r.R;
        g.manifest.parameters["bracket"] = {r.V0_lo, r.V0_hi};
        g.manifest.parameters["iterations"] = r.iterations;
        g.manifest.parameters["quad_iterations"] = r.quad_iterations;
        g.manifest.parameters["warnings"] = r.warnings;
        if (!o.out.empty()) {
            write_profile_csv(o.out, r.header(), r.profile);
            g.manifest.outputs.push_back(o.out);
        }
        log << "V0_star=" << fmt(r.V0_star) << " R=" << fmt(r.R) << " bracket_width=" << fmt(r.bracket_width)
            << "\n";
        for (const auto& w : r.warnings) log << "warning: " << w << "\n";
        return g.finish(ExitOk);
    } catch (const Error& e) {
        return report_error(g, log, e);
    }
}

int run_minimize(const MinimizeOptions& o, std::ostream& log) {
    RunGuard g;
    g.manifest.command = "minimize";
    g.manifest.parameters = {{"N", o.raw.N}, {"m", o.raw.m}, {"sigma", o.raw.sigma}};
    g.manifest.tolerances = minimizer_json(o.controls);
    g.anchor(o.out);
    g.anchor(o.report);
    try {
        const ProblemParams P = validate(o.raw);
        const MinimizeResult r = run_variational(P, o.controls);
        const std::uint64_t seed = seed_from_env();
        const RandomSuiteResult suite = random_profile_suite(P, r.report.S_of_minimizer, o.random_profiles, seed);
        const ScalingFamilyCheck fam = scaling_family_check(r.state.profile, P, r.report.J_min);
        bool monotone = true;
        for (std::size_t i = 1; i < r.state.J_history.size(); ++i)
            if (r.state.J_history[i] > r.state.J_history[i - 1]) monotone = false;
        const bool ckn_ok = r.report.S_rel_error <= o.controls.ckn_tol;

        nlohmann::json rep = to_json(r.report);
        rep["params"] = params_json(P);
        rep["J_value"] = num(r.state.J_value);
        rep["iterations"] = r.state.iteration;
        rep["newton_iterations"] = r.state.newton_iterations;
        rep["kkt_residual"] = num(r.state.kkt_residual);
        rep["J_history_length"] = r.state.J_history.size();
        rep["J_history_monotone"] = monotone;
        rep["initial_support"] = num(r.initial_support);
        rep["solution_V0"] = num(r.solution_V0);
        rep["solution_R"] = num(r.solution_R);
        rep["ckn_check"] = {{"tol", o.controls.ckn_tol}, {"passed", ckn_ok}};
        rep["scaling_family_check"] = to_json(fam);
        rep["random_profiles"] = to_json(suite);
        rep["warnings"] = r.warnings;
        rep["controls"] = minimizer_json(o.controls);

        if (!o.out.empty()) {
            ProfileHeader h;
            h.N = P.N;
            h.m = P.m;
            h.sigma = P.sigma;
            h.V0 = r.solution_V0;
            h.R = r.solution_R;
            write_profile_csv(o.out, h, r.solution);
            g.manifest.outputs.push_back(o.out);
        }
        if (!o.report.empty()) {
            write_json_file(o.report, rep);
            g.manifest.outputs.push_back(o.report);
        }
        g.manifest.parameters["seed"] = seed;
        log << "J_min=" << fmt(r.report.J_min) << " K_star=" << fmt(r.report.K_star)
            << " S_rel_error=" << fmt(r.report.S_rel_error) << " V0=" << fmt(r.solution_V0) << "\n";
        for (const auto& w : r.warnings) log << "warning: " << w << "\n";
        const bool ok = ckn_ok && suite.below == 0 && fam.all_above;
        return g.finish(ok ? ExitOk : ExitVerification);
    } catch (const Error& e) {
        return report_error(g, log, e);
    }
}

int run_verify(const VerifyOptions& o, std::ostream& log) {
    RunGuard g;
    g.manifest.command = "verify";
    g.manifest.tolerances = certificate_json(o.tolerances);
    g.manifest.inputs.push_back(o.profile);
    g.anchor(o.report);
    try {
        const ProfileFile f = read_profile_csv(o.profile);
        const CertificateReport rep = certify(f, o.tolerances);
        g.manifest.parameters = params_json(rep.params);
        if (!o.report.empty()) {
            write_json_file(o.report, to_json(rep));
            g.manifest.outputs.push_back(o.report);
        }
        for (const auto& [k, v] : rep.verdicts) log << k << ": " << to_string(v) << "\n";
        for (const auto& e : rep.errors) log << "error: " << e << "\n";
        return g.finish(rep.passed() ? ExitOk : ExitVerification);
    } catch (const Error& e) {
        return report_error(g, log, e);
    }
}

int run_simulate(const SimulateOptions& o, std::ostream& log) {
    RunGuard g;
    g.manifest.command = "simulate";
    g.manifest.tolerances = parabolic_json(o.controls);
    g.manifest.inputs.push_back(o.profile);
    g.anchor(o.out);
    g.anchor(o.report);
    try {
        const ProfileFile f = read_profile_csv(o.profile);
        const ProblemParams P = params_from_header(f.header);
        g.manifest.parameters = params_json(P);
        g.manifest.parameters["horizon_s"] = o.horizon_s;
        g.manifest.parameters["delta"] = o.delta;
        const TrackingReport t = track_separate_variables(f.profile, P, o.horizon_s, o.delta, o.controls);
        if (!o.out.empty()) {
            std::ofstream out(o.out);
            if (!out) fail(ErrorCode::IoError, "cannot write " + o.out);
            out << "s,deviation\n";
            for (const auto& [s, d] : t.deviation_history) out << fmt(s) << "," << fmt(d) << "\n";
            if (!out) fail(ErrorCode::IoError, "write failed for " + o.out);
            g.manifest.outputs.push_back(o.out);
        }
        if (!o.report.empty()) {
            nlohmann::json j = to_json(t);
            j["params"] = params_json(P);
            j["stationarity"] = to_json(stationarity_order(f.profile, P, o.controls));
            write_json_file(o.report, j);
            g.manifest.outputs.push_back(o.report);
        }
        log << "max_deviation=" << fmt(t.max_deviation) << " steps=" << t.steps
            << " support_growth_cells=" << fmt(t.support_growth_cells) << "\n";
        return g.finish(t.passed.value_or(true) ? ExitOk : ExitVerification);
    } catch (const Error& e) {
        return report_error(g, log, e);
    }
}

double profile_distance(const RadialProfile& shooting, const RadialProfile& variational) {
    double d = 0;
    for (std::size_t i = 0; i < shooting.size(); ++i)
        d = std::max(d, std::abs(evaluate(variational, shooting.r(i)) - shooting.values[i]));
    return d / shooting.values.front();
}

SweepRow sweep_cell(int N, double m, double sigma, const SweepSpec& spec) {
    SweepRow row;
    row.N = N;
    row.m = m;
    row.sigma = sigma;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.V0_star = row.R = row.V0_variational = row.V0_rel_diff = row.sup_distance_rel = nan;
    row.K_star = row.S_min = row.S_rel_error = row.poh1 = row.poh2 = row.poh3 = row.ratio_rel_error = nan;
    try {
        const ProblemParams P = validate({N, m, sigma}, true);
        if (!P.admissible()) {
            const NonexistenceCertificate cert = nonexistence_certificate(P);
            ShootingControls sc = spec.shooting;
            const auto scan = scan_bracket(P, default_scan_grid(sc), sc);
            const auto touch = std::count_if(scan.begin(), scan.end(),
                                             [](const ScanEntry& e) { return e.second == ShotKind::Touchdown; });
            row.verdict = cert.signs_hold ? "nonexistence-certified" : "nonexistence-inconclusive";
            row.detail = "scan touchdowns=" + std::to_string(touch) + " over " + std::to_string(scan.size()) + " shots";
            return row;
        }
        const ShootingResult s = solve_shooting(P, spec.shooting);
        row.V0_star = s.V0_star;
        row.R = s.R;
        const CertificateReport cr = certify(ProfileFile{s.header(), s.profile}, spec.tolerances);
        if (cr.pohozaev) {
            row.poh1 = cr.pohozaev->rho1;
            row.poh2 = cr.pohozaev->rho2;
            row.poh3 = cr.pohozaev->rho3;
        }
        if (cr.ratio) row.ratio_rel_error = cr.ratio->rel_error;
        const MinimizeResult v = run_variational(P, spec.minimizer);
        row.V0_variational = v.solution_V0;
        row.V0_rel_diff = std::abs(v.solution_V0 - s.V0_star) / s.V0_star;
        row.sup_distance_rel = profile_distance(s.profile, v.solution);
        row.K_star = v.report.K_star;
        row.S_min = v.report.S_of_minimizer;
        row.S_rel_error = v.report.S_rel_error;
        const bool agree = row.V0_rel_diff <= 1e-3 && row.sup_distance_rel <= 1e-3;
        const bool ckn = row.S_rel_error <= spec.minimizer.ckn_tol;
        row.verdict = cr.passed() && agree && ckn ? "pass" : "fail";
        std::string d;
        if (!cr.passed()) d += "certificate failed;";
        if (!agree) d += "routes disagree;";
        if (!ckn) d += "ckn identity failed;";
        row.detail = d;
        if (!spec.out_dir.empty()) {
            std::ostringstream name;
            name << "profile_N" << N << "_m" << m << "_sigma" << sigma << ".csv";
            write_profile_csv((std::filesystem::path(spec.out_dir) / name.str()).string(), s.header(), s.profile);
        }
    } catch (const Error& e) {
        row.status = "error";
        row.verdict = "error";
        row.detail = e.what();
    } catch (const std::exception& e) {
        row.status = "error";
        row.verdict = "error";
        row.detail = e.what();
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    struct Cell {
        int N;
        double m, sigma;
    };
    std::vector<Cell> cells;
    for (int N : spec.N)
        for (double m : spec.m)
            for (double s : spec.sigma) cells.push_back({N, m, s});
    std::vector<SweepRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();)
            rows[i] = sweep_cell(cells[i].N, cells[i].m, cells[i].sigma, spec);
    };
    const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(std::max<std::size_t>(cells.size(), 1))));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "N,m,sigma,status,V0_star,R,V0_variational,V0_rel_diff,sup_distance_rel,K_star,S_min,S_rel_error,"
           "poh1,poh2,poh3,ratio_rel_error,verdict,detail\n";
    for (const auto& r : rows) {
        out << r.N << "," << fmt(r.m) << "," << fmt(r.sigma) << "," << r.status << "," << fmt(r.V0_star) << ","
            << fmt(r.R) << "," << fmt(r.V0_variational) << "," << fmt(r.V0_rel_diff) << ","
            << fmt(r.sup_distance_rel) << "," << fmt(r.K_star) << "," << fmt(r.S_min) << "," << fmt(r.S_rel_error)
            << "," << fmt(r.poh1) << "," << fmt(r.poh2) << "," << fmt(r.poh3) << "," << fmt(r.ratio_rel_error)
            << "," << csv_field(r.verdict) << "," << csv_field(r.detail) << "\n";
    }
}

int run_sweep_cli(const SweepSpec& spec, std::ostream& log) {
    RunGuard g;
    g.manifest.command = "sweep";
    g.manifest.parameters = {{"N", spec.N}, {"m", spec.m}, {"sigma", spec.sigma}, {"jobs", spec.jobs}};
    g.manifest.tolerances = {{"shooting", shooting_json(spec.shooting)},
                             {"minimizer", minimizer_json(spec.minimizer)},
                             {"certificates", certificate_json(spec.tolerances)}};
    try {
        if (spec.out_dir.empty()) fail(ErrorCode::InvalidParameter, "sweep needs an output directory");
        std::filesystem::create_directories(spec.out_dir);
        const std::string summary = (std::filesystem::path(spec.out_dir) / "summary.csv").string();
        g.anchor(summary);
        const std::vector<SweepRow> rows = run_sweep(spec);
        std::ofstream out(summary);
        if (!out) fail(ErrorCode::IoError, "cannot write " + summary);
        write_sweep_csv(out, rows);
        out.close();
        g.manifest.outputs.push_back(summary);
        bool all_pass = true;
        for (const auto& r : rows) {
            log << "N=" << r.N << " m=" << fmt(r.m) << " sigma=" << fmt(r.sigma) << " verdict=" << r.verdict << "\n";
            if (r.verdict != "pass" && r.verdict != "nonexistence-certified") all_pass = false;
        }
        return g.finish(all_pass ? ExitOk : ExitVerification);
    } catch (const Error& e) {
        return report_error(g, log, e);
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << "\n";
        return g.finish(ExitUsage);
    }
}

}  // namespace hh
