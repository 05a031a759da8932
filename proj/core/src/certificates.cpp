#include "hh/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hh/error.hpp"
#include "hh/origin_series.hpp"
#include "hh/shooting.hpp"

namespace hh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_zero(const RadialProfile& p) {
    return std::all_of(p.values.begin(), p.values.end(), [](double v) { return v == 0.0; });
}

double combine(const double coef[3], const double x[3], double& scale) {
    double s = 0;
    scale = 0;
    for (int k = 0; k < 3; ++k) {
        const double t = coef[k] * x[k];
        s += t;
        scale = std::max(scale, std::abs(t));
    }
    if (!(scale > 1e-300)) scale = 1.0;
    return s;
}

// Least squares of y = C x^e1 + D x^e2 with relative weights; returns the weighted residual sum.
double two_term_fit(const std::vector<double>& x, const std::vector<double>& y, double e1, double e2, double& C,
                    double& D) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1 / (y[i] * y[i]);
        const double f1 = std::pow(x[i], e1), f2 = std::pow(x[i], e2);
        a11 += w * f1 * f1;
        a12 += w * f1 * f2;
        a22 += w * f2 * f2;
        b1 += w * f1 * y[i];
        b2 += w * f2 * y[i];
    }
    const double det = a11 * a22 - a12 * a12;
    C = (b1 * a22 - b2 * a12) / det;
    D = (a11 * b2 - a12 * b1) / det;
    double res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = (C * std::pow(x[i], e1) + D * std::pow(x[i], e2) - y[i]) / y[i];
        res += d * d;
    }
    return res;
}

// Ordinary least squares y = A + B x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double B = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {(sy - B * sx) / n, B};
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::NotApplicable: return "n/a";
    }
    return "?";
}

PohozaevResiduals pohozaev_from(double dirichlet, double lmu, double weighted, const ProblemParams& params) {
    PohozaevResiduals r;
    r.dirichlet = dirichlet;
    r.lmu = lmu;
    r.weighted = weighted;
    const double x[3] = {dirichlet, lmu, weighted};
    r.comb1 = combine(params.c.poh1, x, r.scale1);
    r.comb2 = combine(params.c.poh2, x, r.scale2);
    r.comb3 = combine(params.c.poh3, x, r.scale3);
    r.rho1 = std::abs(r.comb1) / r.scale1;
    r.rho2 = std::abs(r.comb2) / r.scale2;
    r.rho3 = std::abs(r.comb3) / r.scale3;
    return r;
}

PohozaevResiduals pohozaev_residuals(const RadialProfile& p, const ProblemParams& params) {
    return pohozaev_from(dirichlet_energy(p, params.N), lmu_norm(p, params),
                         weighted_norm_sq(p, params.N, params.sigma), params);
}

RatioCheck ratio_check(const RadialProfile& p, const ProblemParams& params) {
    const double L = lmu_norm(p, params);
    if (!(L > 0)) fail(ErrorCode::DegenerateProfile, "lmu integral vanishes");
    RatioCheck rc;
    rc.observed = dirichlet_energy(p, params.N) / L;
    rc.predicted = params.c.dl_ratio;
    rc.rel_error = rel_err(rc.observed, rc.predicted);
    return rc;
}

std::optional<double> tail_radius(const RadialProfile& p, const ProblemParams& params) {
    const double m = params.m;
    const double limit = 1 / (2 * (m - 1));
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.r(i);
        if (r <= 0) continue;
        const double v = p.values[i];
        if (v == 0.0 || std::pow(r, params.sigma) * std::pow(v, (m - 1) / m) <= limit) return r;
    }
    return std::nullopt;
}

double envelope_bound(double m) { return (m - 1) / (16 * m * (m + 1)); }
double envelope_bound_loose(double m) { return (m - 1) / (4 * m * (m + 1)); }

EnvelopeParams envelope_params(double r0, double M0, double m, double bound) {
    EnvelopeParams e;
    e.r0 = r0;
    e.M0 = M0;
    e.bound = bound;
    const double s = std::pow(M0, (m - 1) / (2 * m));
    const double q = r0 * r0;
    e.b = (-s + std::sqrt(s * s + 4 * q * bound)) / (2 * q);
    e.a = e.b * q + s;
    return e;
}

double envelope_value(const EnvelopeParams& e, double m, double r) {
    const double base = e.a - e.b * r * r;
    return base > 0 ? std::pow(base, 2 * m / (m - 1)) : 0.0;
}

EnvelopeCheck envelope_check(const RadialProfile& p, const ProblemParams& params) {
    return envelope_check(p, params, envelope_bound(params.m));
}

EnvelopeCheck envelope_check(const RadialProfile& p, const ProblemParams& params, double bound) {
    const auto r0 = tail_radius(p, params);
    if (!r0) fail(ErrorCode::NoTailRadius, "tail condition never holds on the grid; extend r_max");
    EnvelopeCheck ec;
    ec.V_origin = p.values.front();
    ec.env = envelope_params(*r0, evaluate(p, *r0), params.m, bound);
    const double m = params.m;
    auto probe = [&](double r) {
        const double d = evaluate(p, r) - envelope_value(ec.env, m, r);
        if (d > ec.max_violation) {
            ec.max_violation = d;
            ec.violation_at = r;
        }
    };
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.r(i);
        if (r < *r0) continue;
        probe(r);
        if (i + 1 < p.size())
            for (int k = 1; k < 4; ++k) probe(r + (p.r(i + 1) - r) * k / 4.0);
    }
    return ec;
}

BoundMargins decay_and_mass_bounds(const RadialProfile& p, const ProblemParams& params) {
    BoundMargins bm;
    bm.decay_margin = bm.mass_margin = kInf;
    if (all_zero(p)) return bm;
    const double m = params.m;
    const int N = params.N;
    const double omega = unit_ball_volume(N);
    const double L = lmu_norm(p, params);
    const double l2 = std::sqrt(weighted_norm_sq(p, N, 0.0));
    const double cd = std::pow(L / omega, m / (m + 1));
    const double cm = l2 / std::sqrt(omega);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.r(i);
        if (r <= 0) continue;
        const double v = p.values[i];
        const double bd = cd * std::pow(r, -N * m / (m + 1));
        const double md = (bd - v) / bd;
        if (md < bm.decay_margin) {
            bm.decay_margin = md;
            bm.decay_worst_r = r;
        }
        const double sig = std::pow(r, params.sigma);
        const double bmass = cm * std::pow(r, (2 * params.sigma - N) / 2);
        const double mm = (bmass - sig * v) / bmass;
        if (mm < bm.mass_margin) {
            bm.mass_margin = mm;
            bm.mass_worst_r = r;
        }
    }
    return bm;
}

NonexistenceCertificate nonexistence_certificate(const ProblemParams& params, const RadialProfile* profile) {
    if (params.sigma > -2) fail(ErrorCode::WrongRegime, "nonexistence certificate needs sigma <= -2");
    const double m = params.m, n = params.N, s = params.sigma;
    NonexistenceCertificate nc;
    nc.coef_dirichlet = (s + 2) / 2;
    nc.coef_lmu = (s * (m + 1) - n * (m - 1)) / (2 * (m * m - 1));
    nc.signs_hold = nc.coef_dirichlet <= 0 && nc.coef_lmu < 0;
    nc.verdict = nc.signs_hold ? "no nontrivial solution" : "inconclusive";
    if (profile) nc.witness = nc.coef_dirichlet * dirichlet_energy(*profile, params.N) + nc.coef_lmu * lmu_norm(*profile, params);
    return nc;
}

OriginFit origin_fit(const RadialProfile& p, const ProblemParams& params, double r_lo, double r_hi) {
    if (p.r(0) != 0.0) fail(ErrorCode::InvalidParameter, "origin fit needs a node at r = 0");
    const double V0 = p.values.front();
    const SeriesCase sc = classify_sigma(params.sigma);
    const auto k = series_coeffs<double>(sc, params.N, params.m, params.sigma, V0);
    OriginFit f;
    f.predicted_exponent = k.e1;
    f.predicted_coefficient = k.c1;
    std::vector<double> x, y;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const double r = p.r(i);
        if (r < r_lo || r > r_hi) continue;
        const double d = V0 - p.values[i];
        if (d > 0) {
            x.push_back(r);
            y.push_back(d);
        }
    }
    f.points = static_cast<int>(x.size());
    if (f.points < 4) return f;
    double lo = 0.8 * k.e1, hi = k.e1 + 0.5 * (k.e2 - k.e1);
    const double g = (std::sqrt(5.0) - 1) / 2;
    double C = 0, D = 0;
    auto obj = [&](double e) { return two_term_fit(x, y, e, k.e2, C, D); };
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = obj(a), fb = obj(b);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = obj(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = obj(b);
        }
    }
    f.exponent = 0.5 * (lo + hi);
    obj(f.exponent);
    f.coefficient = C;
    f.next_coefficient = D;
    f.exponent_error = rel_err(f.exponent, f.predicted_exponent);
    f.coefficient_error = rel_err(f.coefficient, f.predicted_coefficient);
    return f;
}

SecondDerivativeCheck second_derivative_check(const RadialProfile& p, const ProblemParams& params, double r_lo,
                                              double r_hi) {
    if (classify_sigma(params.sigma) != SeriesCase::SigmaEqMinus1 || params.N < 2)
        fail(ErrorCode::OutOfCase, "second derivative limit is finite only for sigma = -1, N >= 2");
    SecondDerivativeCheck c;
    const double V0 = p.values.front();
    c.predicted = second_derivative_limit(params, V0).second_derivative_at_zero;
    std::vector<double> x, y;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const double r = p.r(i);
        if (r < r_lo || r > r_hi) continue;
        const double h1 = r - p.r(i - 1), h2 = p.r(i + 1) - r;
        const double d2 = 2 * ((p.values[i + 1] - p.values[i]) / h2 - (p.values[i] - p.values[i - 1]) / h1) / (h1 + h2);
        x.push_back(r);
        y.push_back(d2);
    }
    c.points = static_cast<int>(x.size());
    if (c.points < 3) fail(ErrorCode::GridTooShort, "too few nodes near the origin for V''");
    c.extrapolated = line_fit(x, y).first;
    c.rel_error = rel_err(c.extrapolated, c.predicted);
    return c;
}

TouchdownCheck touchdown_check(const RadialProfile& p, const ProblemParams& params, double R,
                               std::optional<double> graft_start, double x_span, double graft_level) {
    const double m = params.m;
    TouchdownCheck t;
    t.predicted_exponent = params.c.omega;
    t.predicted_prefactor = params.c.touchdown_K;
    double x_lo = 0;
    if (graft_start && *graft_start < R) {
        x_lo = R - *graft_start;
    } else {
        const double level = graft_level * p.values.front();
        for (std::size_t i = 0; i < p.size() && p.r(i) < R; ++i)
            if (p.values[i] >= level) x_lo = R - p.r(i);
    }
    if (!(x_lo > 0)) fail(ErrorCode::GridTooShort, "no resolved nodes before the support radius");
    t.x_lo = x_lo;
    t.x_hi = x_span * x_lo;
    std::vector<double> lx, lv;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = R - p.r(i);
        if (x < x_lo * (1 - 1e-12) || x > t.x_hi || p.values[i] <= 0) continue;
        lx.push_back(std::log(x));
        lv.push_back(std::log(p.values[i]));
    }
    t.points = static_cast<int>(lx.size());
    if (t.points < 4) fail(ErrorCode::GridTooShort, "too few nodes in the touchdown window");
    t.exponent = line_fit(lx, lv).second;
    double s = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) s += lv[i] - t.predicted_exponent * lx[i];
    t.prefactor = std::exp(s / t.points);
    t.exponent_error = rel_err(t.exponent, t.predicted_exponent);
    t.prefactor_error = rel_err(t.prefactor, t.predicted_prefactor);
    (void)m;
    return t;
}

RefinementRecord refinement_record(const RadialProfile& p, const ProblemParams& params) {
    std::vector<double> r, v, d;
    const bool hd = p.has_derivs();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool keep = i % 2 == 0 || i + 1 == p.size() ||
                          (p.support_radius && p.r(i) == *p.support_radius);
        if (!keep) continue;
        r.push_back(p.r(i));
        v.push_back(p.values[i]);
        if (hd) d.push_back((*p.derivs)[i]);
    }
    const RadialProfile coarse =
        make_profile(RadialGrid::from_nodes(std::move(r)), std::move(v),
                     hd ? std::optional<std::vector<double>>(std::move(d)) : std::nullopt, p.support_radius);
    RefinementRecord rr;
    const auto f = pohozaev_residuals(p, params);
    const auto c = pohozaev_residuals(coarse, params);
    const double ff[3] = {f.rho1, f.rho2, f.rho3};
    const double cc[3] = {c.rho1, c.rho2, c.rho3};
    for (int k = 0; k < 3; ++k) {
        rr.rho_fine[k] = ff[k];
        rr.rho_coarse[k] = cc[k];
    }
    rr.ratio_err_fine = rel_err(f.dirichlet / f.lmu, params.c.dl_ratio);
    rr.ratio_err_coarse = rel_err(c.dirichlet / c.lmu, params.c.dl_ratio);
    auto order = [](double coarse_v, double fine_v) {
        if (!(fine_v > 1e-14) || !(coarse_v > 1e-14)) return std::nan("");
        return std::log2(coarse_v / fine_v);
    };
    for (int k = 0; k < 3; ++k) rr.order[k] = order(cc[k], ff[k]);
    rr.order[3] = order(rr.ratio_err_coarse, rr.ratio_err_fine);
    return rr;
}

bool CertificateReport::passed() const {
    if (!errors.empty() && verdicts.empty()) return false;
    return std::none_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second == Verdict::Fail; });
}

CertificateReport certify(const ProfileFile& file, const CertificateTolerances& tol) {
    CertificateReport rep;
    rep.params = params_from_header(file.header);
    const ProblemParams& P = rep.params;
    const RadialProfile& p = file.profile;
    const bool hd = p.has_derivs();
    const double poh_tol = hd ? tol.pohozaev : tol.pohozaev_piecewise_linear;
    rep.tolerances = {{"pohozaev", poh_tol},
                      {"ratio", tol.ratio},
                      {"envelope_rel", tol.envelope_rel},
                      {"origin_exponent", tol.origin_exponent},
                      {"origin_coefficient", tol.origin_coefficient},
                      {"second_derivative", tol.second_derivative},
                      {"touchdown_exponent", tol.touchdown_exponent},
                      {"touchdown_prefactor", tol.touchdown_prefactor},
                      {"ode_residual", tol.ode_residual}};
    auto grade = [&](const std::string& name, bool ok) { rep.verdicts[name] = ok ? Verdict::Pass : Verdict::Fail; };
    auto na = [&](std::initializer_list<const char*> names) {
        for (const char* n : names) rep.verdicts[n] = Verdict::NotApplicable;
    };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const Error& e) {
            rep.errors.push_back(name + ": " + e.what());
            grade(name, false);
        }
    };

    if (!P.admissible()) {
        guarded("nonexistence", [&] {
            rep.nonexistence = nonexistence_certificate(P, all_zero(p) ? nullptr : &p);
            bool ok = rep.nonexistence->signs_hold;
            if (rep.nonexistence->witness) ok = ok && *rep.nonexistence->witness < 0;
            grade("nonexistence", ok);
        });
        return rep;
    }

    if (all_zero(p)) {
        rep.errors.push_back(std::string("profile: ") + std::string(to_string(ErrorCode::DegenerateProfile)) +
                             ": profile vanishes identically");
        grade("nontrivial", false);
    } else {
        grade("nontrivial", true);
    }

    guarded("pohozaev", [&] {
        rep.pohozaev = pohozaev_residuals(p, P);
        grade("poh1", rep.pohozaev->rho1 <= poh_tol);
        grade("poh2", rep.pohozaev->rho2 <= poh_tol);
        grade("poh3", rep.pohozaev->rho3 <= poh_tol);
    });
    guarded("ratio", [&] {
        rep.ratio = ratio_check(p, P);
        grade("ratio", rep.ratio->rel_error <= tol.ratio);
    });
    guarded("envelope", [&] {
        rep.envelope = envelope_check(p, P);
        grade("envelope", rep.envelope->max_violation <= tol.envelope_rel * rep.envelope->V_origin);
        rep.envelope_loose = envelope_check(p, P, envelope_bound_loose(P.m));
    });
    guarded("bounds", [&] {
        rep.bounds = decay_and_mass_bounds(p, P);
        grade("decay_bound", rep.bounds->decay_margin >= 0);
        grade("mass_bound", rep.bounds->mass_margin >= 0);
    });
    rep.notes.push_back("decay bound (i) uses the explicit ball-volume constant (||v||_mu^mu / omega_N)^(m/(m+1))");

    if (!hd || all_zero(p)) {
        na({"origin_exponent", "origin_coefficient", "second_derivative", "touchdown_exponent", "touchdown_prefactor",
            "ode_residual"});
        if (!hd) rep.notes.push_back("profile has no derivative column; expansion and ODE checks not applicable");
    } else {
        guarded("origin", [&] {
            rep.origin = origin_fit(p, P);
            if (rep.origin->points < 4) {
                na({"origin_exponent", "origin_coefficient"});
                return;
            }
            rep.expansion_fit_errors["origin_exponent"] = rep.origin->exponent_error;
            rep.expansion_fit_errors["origin_coefficient"] = rep.origin->coefficient_error;
            grade("origin_exponent", rep.origin->exponent_error <= tol.origin_exponent);
            grade("origin_coefficient", rep.origin->coefficient_error <= tol.origin_coefficient);
        });
        if (classify_sigma(P.sigma) == SeriesCase::SigmaEqMinus1 && P.N >= 2) {
            guarded("second_derivative", [&] {
                rep.second_derivative = second_derivative_check(p, P);
                rep.expansion_fit_errors["second_derivative"] = rep.second_derivative->rel_error;
                grade("second_derivative", rep.second_derivative->rel_error <= tol.second_derivative);
            });
        } else {
            na({"second_derivative"});
        }
        if (file.header.R) {
            std::optional<double> gs;
            if (auto it = file.header.extras.find("graft_start"); it != file.header.extras.end()) gs = it->second;
            guarded("touchdown", [&] {
                rep.touchdown = touchdown_check(p, P, *file.header.R, gs);
                rep.expansion_fit_errors["touchdown_exponent"] = rep.touchdown->exponent_error;
                rep.expansion_fit_errors["touchdown_prefactor"] = rep.touchdown->prefactor_error;
                grade("touchdown_exponent", rep.touchdown->exponent_error <= tol.touchdown_exponent);
                grade("touchdown_prefactor", rep.touchdown->prefactor_error <= tol.touchdown_prefactor);
            });
        } else {
            grade("touchdown_exponent", false);
            grade("touchdown_prefactor", false);
            rep.errors.push_back("touchdown: profile header carries no finite support radius");
        }
        guarded("ode_residual", [&] {
            rep.ode_residual = ode_residual(p, P);
            grade("ode_residual", *rep.ode_residual <= tol.ode_residual);
        });
    }
    if (!all_zero(p)) {
        try {
            rep.refinement = refinement_record(p, P);
        } catch (const Error& e) {
            rep.notes.push_back(std::string("refinement record skipped: ") + e.what());
        }
    }
    return rep;
}

nlohmann::json to_json(const CertificateReport& r) {
    using nlohmann::json;
    auto num = [](double x) -> json {
        if (std::isnan(x)) return nullptr;
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return x;
    };
    json j;
    j["params"] = {{"N", r.params.N}, {"m", r.params.m}, {"sigma", r.params.sigma},
                   {"regime", to_string(r.params.regime)}};
    if (r.pohozaev) {
        const auto& q = *r.pohozaev;
        j["poh1_residual"] = num(q.rho1);
        j["poh2_residual"] = num(q.rho2);
        j["poh3_residual"] = num(q.rho3);
        j["integrals"] = {{"dirichlet", num(q.dirichlet)}, {"lmu", num(q.lmu)}, {"weighted_sigma", num(q.weighted)}};
    }
    if (r.ratio)
        j["ratio"] = {{"observed", num(r.ratio->observed)},
                      {"predicted", num(r.ratio->predicted)},
                      {"rel_error", num(r.ratio->rel_error)}};
    auto env_json = [&](const EnvelopeCheck& e) {
        return json{{"r0", num(e.env.r0)},         {"M0", num(e.env.M0)},
                    {"a", num(e.env.a)},           {"b", num(e.env.b)},
                    {"bound", num(e.env.bound)},   {"max_violation", num(e.max_violation)},
                    {"violation_at", num(e.violation_at)}};
    };
    if (r.envelope) {
        j["envelope_max_violation"] = num(r.envelope->max_violation);
        j["envelope"] = env_json(*r.envelope);
    }
    if (r.envelope_loose) j["envelope_loose_constant"] = env_json(*r.envelope_loose);
    if (r.bounds) {
        j["decay_bound_margin"] = num(r.bounds->decay_margin);
        j["mass_bound_margin"] = num(r.bounds->mass_margin);
    }
    json ex = json::object();
    if (r.origin)
        ex["origin"] = {{"exponent", num(r.origin->exponent)},
                        {"predicted_exponent", num(r.origin->predicted_exponent)},
                        {"coefficient", num(r.origin->coefficient)},
                        {"predicted_coefficient", num(r.origin->predicted_coefficient)},
                        {"next_coefficient", num(r.origin->next_coefficient)},
                        {"points", r.origin->points}};
    if (r.second_derivative)
        ex["second_derivative_at_zero"] = {{"extrapolated", num(r.second_derivative->extrapolated)},
                                           {"predicted", num(r.second_derivative->predicted)},
                                           {"points", r.second_derivative->points}};
    if (r.touchdown)
        ex["touchdown"] = {{"exponent", num(r.touchdown->exponent)},
                           {"predicted_exponent", num(r.touchdown->predicted_exponent)},
                           {"prefactor", num(r.touchdown->prefactor)},
                           {"predicted_prefactor", num(r.touchdown->predicted_prefactor)},
                           {"x_lo", num(r.touchdown->x_lo)},
                           {"x_hi", num(r.touchdown->x_hi)},
                           {"points", r.touchdown->points}};
    j["expansion_checks"] = ex;
    json fe = json::object();
    for (const auto& [k, v] : r.expansion_fit_errors) fe[k] = num(v);
    j["expansion_fit_errors"] = fe;
    if (r.ode_residual) j["ode_residual"] = num(*r.ode_residual);
    if (r.refinement) {
        const auto& q = *r.refinement;
        j["refinement"] = {{"rho_fine", {num(q.rho_fine[0]), num(q.rho_fine[1]), num(q.rho_fine[2])}},
                           {"rho_coarse", {num(q.rho_coarse[0]), num(q.rho_coarse[1]), num(q.rho_coarse[2])}},
                           {"ratio_error_fine", num(q.ratio_err_fine)},
                           {"ratio_error_coarse", num(q.ratio_err_coarse)},
                           {"observed_order", {num(q.order[0]), num(q.order[1]), num(q.order[2]), num(q.order[3])}}};
    }
    if (r.nonexistence) {
        const auto& n = *r.nonexistence;
        j["nonexistence"] = {{"coef_dirichlet", num(n.coef_dirichlet)},
                             {"coef_lmu", num(n.coef_lmu)},
                             {"signs_hold", n.signs_hold},
                             {"verdict", n.verdict}};
        if (n.witness) j["nonexistence"]["witness"] = num(*n.witness);
    }
    json v = json::object();
    for (const auto& [k, x] : r.verdicts) v[k] = to_string(x);
    j["verdicts"] = v;
    json t = json::object();
    for (const auto& [k, x] : r.tolerances) t[k] = x;
    j["tolerances"] = t;
    j["errors"] = r.errors;
    j["notes"] = r.notes;
    j["passed"] = r.passed();
    return j;
}

}  // namespace hh
