#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hh/certificates.hpp"
#include "hh/parabolic.hpp"
#include "hh/pipeline.hpp"
#include "hh/profile_io.hpp"
#include "hh/shooting.hpp"
#include "hh/variational.hpp"
#include "oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Triple {
    int N;
    double m;
    double sigma;
};

std::vector<Triple> admissible_grid() {
    std::vector<Triple> t;
    for (double m : {1.5, 2.0, 3.0})
        for (double s : {-1.5, -1.0, -0.5}) t.push_back({3, m, s});
    return t;
}

std::string label(const Triple& t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%d,%g,%g)", t.N, t.m, t.sigma);
    return buf;
}

struct Solved {
    Triple t;
    hh::ProblemParams params;
    hh::ShootingResult shot;
    hh::CertificateReport cert;
    double seconds = 0;
};

struct Outcome {
    bool pass = true;
    std::string detail;
};

void record(std::vector<std::pair<std::string, Outcome>>& out, const std::string& name, Outcome o) {
    std::printf("%s %-32s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    out.emplace_back(name, std::move(o));
}

std::string fmt(const char* f, double x) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Outcome guarded(const std::function<Outcome()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

Outcome pohozaev(const std::vector<Solved>& runs) {
    double worst = 0, slowest = 0;
    std::string where;
    for (const auto& s : runs) {
        const auto& p = *s.cert.pohozaev;
        const double w = std::max({p.rho1, p.rho2, p.rho3});
        if (w > worst) worst = w, where = label(s.t);
        slowest = std::max(slowest, s.seconds);
    }
    return {worst <= 1e-6 && slowest <= 60,
            "max rho " + fmt("%.3e", worst) + " at " + where + ", slowest triple " + fmt("%.2f", slowest) + " s"};
}

Outcome energy_ratio(const std::vector<Solved>& runs) {
    double worst = 0;
    std::string where;
    for (const auto& s : runs) {
        const double D = hh::dirichlet_energy(s.shot.profile, s.t.N);
        const double L = hh::lmu_norm(s.shot.profile, s.params);
        const double predicted = oracle::dirichlet_lmu_ratio(s.t.N, s.t.m, s.t.sigma);
        const double err = std::abs(D / L - predicted) / predicted;
        if (err >= worst) worst = err, where = label(s.t);
    }
    return {worst <= 1e-5, "max rel error " + fmt("%.3e", worst) + " at " + where};
}

Outcome two_routes(const std::vector<Solved>& runs, std::vector<hh::MinimizeResult>& minimized) {
    double worst_v0 = 0, worst_sup = 0;
    for (const auto& s : runs) {
        minimized.push_back(hh::run_variational(s.params));
        const auto& v = minimized.back();
        const double V0 = s.shot.V0_star;
        worst_v0 = std::max(worst_v0, std::abs(v.solution_V0 - V0) / V0);
        double sup = 0;
        for (std::size_t i = 0; i < s.shot.profile.size(); ++i) {
            const double r = s.shot.profile.r(i);
            sup = std::max(sup, std::abs(oracle::interp(v.solution.grid.nodes, v.solution.values, r) -
                                         s.shot.profile.values[i]));
        }
        worst_sup = std::max(worst_sup, sup / V0);
    }
    return {worst_v0 <= 1e-3 && worst_sup <= 1e-3,
            "max V(0) rel diff " + fmt("%.3e", worst_v0) + ", max sup distance / V(0) " + fmt("%.3e", worst_sup)};
}

Outcome origin_expansion(const std::vector<Solved>& runs) {
    double worst_e = 0, worst_c = 0, worst_d2 = 0;
    for (const auto& s : runs) {
        const hh::OriginFit f = hh::origin_fit(s.shot.profile, s.params, 1e-5, 1e-3);
        const double V0 = s.shot.V0_star;
        worst_e = std::max(worst_e, std::abs(f.exponent - (s.t.sigma + 2)) / (s.t.sigma + 2));
        const double c = oracle::origin_coefficient(s.t.N, s.t.sigma, V0);
        worst_c = std::max(worst_c, std::abs(f.coefficient - c) / c);
        if (s.t.sigma == -1.0) {
            const hh::SecondDerivativeCheck d = hh::second_derivative_check(s.shot.profile, s.params);
            const double predicted = oracle::second_derivative_at_zero(s.t.N, s.t.m, V0);
            worst_d2 = std::max(worst_d2, std::abs(d.extrapolated - predicted) / predicted);
        }
    }
    return {worst_e <= 0.01 && worst_c <= 0.02 && worst_d2 <= 0.02,
            "exponent " + fmt("%.2e", worst_e) + ", coefficient " + fmt("%.2e", worst_c) + ", V''(0) " +
                fmt("%.2e", worst_d2) + " (max rel errors)"};
}

Outcome touchdown(const std::vector<Solved>& runs) {
    double worst_e = 0, worst_k = 0;
    bool finite = true;
    for (const auto& s : runs) {
        finite = finite && std::isfinite(s.shot.R) && s.shot.R > 0;
        const hh::TouchdownCheck c = hh::touchdown_check(s.shot.profile, s.params, s.shot.R, s.shot.graft_start);
        worst_e = std::max(worst_e, std::abs(c.exponent - oracle::omega(s.t.m)) / oracle::omega(s.t.m));
        worst_k = std::max(worst_k, std::abs(c.prefactor - oracle::touchdown_K(s.t.m)) / oracle::touchdown_K(s.t.m));
    }
    return {finite && worst_e <= 0.02 && worst_k <= 0.05,
            std::string(finite ? "R finite" : "R not finite") + ", exponent " + fmt("%.2e", worst_e) +
                ", prefactor " + fmt("%.2e", worst_k) + " (max rel errors)"};
}

Outcome envelope(const std::vector<Solved>& runs) {
    double worst = 0;
    for (const auto& s : runs) {
        const hh::EnvelopeCheck e = hh::envelope_check(s.shot.profile, s.params);
        worst = std::max(worst, e.max_violation / s.shot.V0_star);
    }
    return {worst <= 1e-12, "max violation / V(0) " + fmt("%.3e", worst)};
}

Outcome ckn(const std::vector<Solved>& runs, const std::vector<hh::MinimizeResult>& minimized) {
    double worst_id = 0, worst_margin = INFINITY, worst_inv = 0;
    std::size_t below = 0;
    const std::uint64_t seed = hh::seed_from_env();
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& P = runs[k].params;
        const auto& v = minimized[k];
        worst_id = std::max(worst_id, std::abs(v.report.S_of_minimizer - v.report.K_star) / v.report.K_star);
        const hh::RandomSuiteResult suite = hh::random_profile_suite(P, v.report.S_of_minimizer, 1000, seed);
        below += suite.below;
        worst_margin = std::min(worst_margin, suite.min_margin);
        const hh::RadialProfile& w = v.state.profile;
        const double S = hh::quotient_S(w, P);
        for (double c : {1e-3, 1e3})
            worst_inv = std::max(worst_inv, std::abs(hh::quotient_S(hh::scale_values(w, c), P) - S) / S);
        for (double l : {0.5, 2.0})
            worst_inv = std::max(worst_inv, std::abs(hh::quotient_S(hh::dilate(w, l), P) - S) / S);
    }
    return {worst_id <= 1e-4 && below == 0 && worst_margin >= -1e-6 && worst_inv <= 1e-10,
            "|S-K|/K " + fmt("%.2e", worst_id) + ", random min margin " + fmt("%.3e", worst_margin) +
                ", invariance " + fmt("%.2e", worst_inv) + ", seed " + std::to_string(seed)};
}

Outcome nonexistence() {
    bool signs = true;
    long touchdowns = 0, shots = 0;
    for (double sigma : {-2.0, -2.5})
        for (double m : {1.5, 2.0, 3.0}) {
            const hh::ProblemParams P = hh::validate({3, m, sigma}, true);
            const hh::NonexistenceCertificate c = hh::nonexistence_certificate(P);
            const double first = (sigma + 2) / 2;
            const double second = (sigma * (m + 1) - 3 * (m - 1)) / (2 * (m * m - 1));
            signs = signs && c.signs_hold && first <= 0 && second < 0 && c.coef_dirichlet == first &&
                    std::abs(c.coef_lmu - second) <= 1e-15 * std::abs(second);
            const auto scan = hh::scan_bracket(P, hh::default_scan_grid());
            shots += static_cast<long>(scan.size());
            for (const auto& e : scan) touchdowns += e.second == hh::ShotKind::Touchdown;
        }
    return {signs, std::string(signs ? "sign conditions hold" : "sign conditions violated") + "; scan found " +
                       std::to_string(touchdowns) + " touchdowns in " + std::to_string(shots) +
                       " shots over [1e-6, 1e6] (reported)"};
}

Outcome separate_variables(const std::vector<Solved>& runs) {
    const auto it = std::find_if(runs.begin(), runs.end(),
                                 [](const Solved& s) { return s.t.m == 2.0 && s.t.sigma == -1.0; });
    const auto t0 = Clock::now();
    hh::ParabolicControls c;
    c.cells = 2000;
    const hh::TrackingReport rep = hh::track_separate_variables(it->shot.profile, it->params, 3.0, 0.0, c);
    const hh::StationarityOrder ord = hh::stationarity_order(it->shot.profile, it->params, c);
    const double secs = seconds_since(t0);
    const double order = std::min(ord.order_sup, ord.order_l2);
    return {rep.max_deviation <= 1e-2 && order >= 1.7 && secs <= 120,
            "(3,2,-1) max deviation " + fmt("%.3e", rep.max_deviation) + ", stationarity order " +
                fmt("%.3f", order) + ", " + fmt("%.2f", secs) + " s"};
}

double gradient_check(const hh::ProblemParams& P, std::mt19937_64& rng) {
    const hh::RadialProfile p = hh::random_monotone_profile(rng, 200);
    const std::vector<double> g = hh::gradient_J(p, P);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> d(p.size());
    for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = u(rng) * (1 + p.values[i]);
    const double vmax = *std::max_element(p.values.begin(), p.values.end());
    const double h = 1e-6 * vmax;
    auto shifted = [&](double s) {
        std::vector<double> v(p.values);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, v[i] + s * d[i]);
        return hh::functional_J(hh::make_profile(p.grid, v), P);
    };
    for (std::size_t i = 0; i < d.size(); ++i)
        if (p.values[i] < 2 * h * std::abs(d[i])) d[i] = 0;
    double analytic = 0;
    for (std::size_t i = 0; i < d.size(); ++i) analytic += g[i] * d[i];
    const double fd = (shifted(h) - shifted(-h)) / (2 * h);
    return std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-300);
}

double quadrature_check() {
    double worst = 0;
    for (int N : {1, 2, 3, 5})
        for (double tau : {-0.5, -0.9, 0.0, 1.5})
            for (int k = 0; k <= 2; ++k)
                for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.5, 2.0}}) {
                    if (tau <= -N) continue;
                    const hh::RadialGrid g = hh::RadialGrid::from_nodes({a, b});
                    const std::vector<double> V{std::pow(a, k), std::pow(b, k)};
                    const std::vector<double> dV{k == 0 ? 0.0 : k * std::pow(a, k - 1), k == 0 ? 0.0 : k * std::pow(b, k - 1)};
                    const hh::RadialProfile p = hh::make_profile(g, V, dV);
                    const double e = N - 1 + tau + 2 * k + 1;
                    const double exact = oracle::sphere_area(N) * (std::pow(b, e) - std::pow(a, e)) / e;
                    worst = std::max(worst, std::abs(hh::weighted_norm_sq(p, N, tau) - exact) / exact);
                    if (k > 0) {
                        const double ed = N - 1 + 2 * (k - 1) + 1;
                        const double exact_d = oracle::sphere_area(N) * k * k * (std::pow(b, ed) - std::pow(a, ed)) / ed;
                        worst = std::max(worst, std::abs(hh::dirichlet_energy(p, N) - exact_d) / exact_d);
                    }
                }
    return worst;
}

// Observed orders across one refinement: P1 Dirichlet energy of a smooth profile, the discrete
// minimum of S against the shooting quotient, and the parabolic stationarity residual.
std::map<std::string, double> convergence_orders(const Solved& s) {
    std::map<std::string, double> out;
    const int N = 3;
    auto dirichlet_error = [&](int cells) {
        const hh::RadialGrid g = hh::RadialGrid::uniform(1.0, cells);
        std::vector<double> V;
        for (double r : g.nodes) V.push_back(std::pow(1 - r * r, 2));
        const double exact = oracle::sphere_area(N) * 16 * (1.0 / 5 - 2.0 / 7 + 1.0 / 9);
        return std::abs(hh::dirichlet_energy(hh::make_profile(g, V), N) - exact);
    };
    out["dirichlet"] = std::log2(dirichlet_error(200) / dirichlet_error(400));

    const double S_ref = hh::quotient_S(s.shot.profile, s.params);
    auto minimum_error = [&](int cells) {
        hh::MinimizerControls c;
        c.grid_size = cells;
        return std::abs(hh::run_variational(s.params, c).report.S_of_minimizer - S_ref);
    };
    out["variational_S"] = std::log2(minimum_error(500) / minimum_error(1000));

    const hh::StationarityOrder o = hh::stationarity_order(s.shot.profile, s.params);
    out["stationarity_sup"] = o.order_sup;
    out["stationarity_l2"] = o.order_l2;
    return out;
}

Outcome hygiene(const std::vector<Solved>& runs) {
    std::mt19937_64 rng(hh::seed_from_env());
    double worst_grad = 0;
    for (const auto& s : runs)
        for (int k = 0; k < 5; ++k) worst_grad = std::max(worst_grad, gradient_check(s.params, rng));
    const double quad = quadrature_check();
    const auto it = std::find_if(runs.begin(), runs.end(),
                                 [](const Solved& s) { return s.t.m == 2.0 && s.t.sigma == -1.0; });
    const auto orders = convergence_orders(*it);
    double min_order = INFINITY;
    std::string orders_txt;
    for (const auto& [k, v] : orders) {
        min_order = std::min(min_order, v);
        orders_txt += " " + k + "=" + fmt("%.2f", v);
    }
    return {worst_grad <= 1e-6 && quad <= 1e-12 && min_order >= 1.7,
            "gradient " + fmt("%.2e", worst_grad) + ", quadrature " + fmt("%.2e", quad) + ", orders" + orders_txt};
}

}  // namespace

int main() {
    std::vector<Solved> runs;
    std::string solve_error;
    for (const Triple& t : admissible_grid()) {
        try {
            const auto t0 = Clock::now();
            Solved s{t, hh::validate({t.N, t.m, t.sigma}), {}, {}, 0};
            s.shot = hh::solve_shooting(s.params);
            s.cert = hh::certify(hh::ProfileFile{s.shot.header(), s.shot.profile});
            s.seconds = seconds_since(t0);
            runs.push_back(std::move(s));
        } catch (const std::exception& e) {
            solve_error += label(t) + ": " + e.what() + "; ";
        }
    }

    std::vector<std::pair<std::string, Outcome>> out;
    std::vector<hh::MinimizeResult> minimized;
    const bool all_solved = solve_error.empty();
    auto run = [&](const std::string& name, const std::function<Outcome()>& body) {
        if (!all_solved && name != "nonexistence_certificate") {
            record(out, name, {false, "shooting failed: " + solve_error});
            return;
        }
        record(out, name, guarded(body));
    };
    run("pohozaev_identities", [&] { return pohozaev(runs); });
    run("energy_ratio_identity", [&] { return energy_ratio(runs); });
    run("two_route_agreement", [&] { return two_routes(runs, minimized); });
    run("origin_expansion", [&] { return origin_expansion(runs); });
    run("compact_support_touchdown", [&] { return touchdown(runs); });
    run("supersolution_envelope", [&] { return envelope(runs); });
    run("ckn_extremality", [&] {
        if (minimized.size() != runs.size()) return Outcome{false, "minimizer results missing"};
        return ckn(runs, minimized);
    });
    run("nonexistence_certificate", [&] { return nonexistence(); });
    run("separate_variables", [&] { return separate_variables(runs); });
    run("numerics_hygiene", [&] { return hygiene(runs); });

    const auto failed = std::count_if(out.begin(), out.end(), [](const auto& o) { return !o.second.pass; });
    std::printf("%zu/%zu acceptance criteria passed\n", out.size() - failed, out.size());
    return failed == 0 ? 0 : 1;
}
