#include "hh/shooting.hpp"

#include <algorithm>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "hh/certificates.hpp"
#include "hh/dop853.hpp"
#include "hh/error.hpp"
#include "hh/origin_series.hpp"

namespace hh {

namespace {

using quad = boost::multiprecision::float128;

double to_d(double x) { return x; }
double to_d(const quad& x) { return x.convert_to<double>(); }

double cbrt_of(double x) { return std::cbrt(x); }
quad cbrt_of(const quad& x) { return quad(cbrtq(x.backend().value())); }

template <class Real>
Real ipow(Real x, int k) {
    Real r = 1;
    const bool inv = k < 0;
    for (int i = 0; i < std::abs(k); ++i) r *= x;
    return inv ? Real(1) / r : r;
}

// x^e with exact shortcuts for exponents in Z/2 and Z/3.
template <class Real>
struct PowPlan {
    enum Kind { Integer, Half, Third, TwoThirds, General };
    Kind kind = General;
    int k = 0;
    Real e = 0;

    static PowPlan make(double e) {
        PowPlan p;
        p.e = Real(e);
        const double fl = std::floor(e + 1e-13);
        const double fr = e - fl;
        p.k = static_cast<int>(fl);
        auto near = [&](double v) { return std::abs(fr - v) < 1e-13; };
        if (near(0)) {
            p.kind = Integer;
        } else if (near(0.5)) {
            p.kind = Half;
        } else if (near(1.0 / 3)) {
            p.kind = Third;
        } else if (near(2.0 / 3)) {
            p.kind = TwoThirds;
        }
        return p;
    }

    Real operator()(const Real& x) const {
        using std::pow;
        using std::sqrt;
        switch (kind) {
            case Integer: return ipow(x, k);
            case Half: return ipow(x, k) * sqrt(x);
            case Third: return ipow(x, k) * cbrt_of(x);
            case TwoThirds: {
                const Real c = cbrt_of(x);
                return ipow(x, k) * c * c;
            }
            default: return pow(x, e);
        }
    }
};

template <class Real>
using State = std::array<Real, 2>;

template <class Real>
struct Rhs {
    int N = 3;
    PowPlan<Real> absorb;
    PowPlan<Real> weight;
    Real inv_m1 = 1;

    Rhs(const ProblemParams& p)
        : N(p.N), absorb(PowPlan<Real>::make(1.0 / p.m)), weight(PowPlan<Real>::make(p.N - 1 + p.sigma)),
          inv_m1(Real(1) / (Real(p.m) - 1)) {}

    void operator()(const Real& r, const State<Real>& y, State<Real>& d) const {
        const Real rn1 = ipow(r, N - 1);
        d[0] = y[1] / rn1;
        const Real a = y[0] > 0 ? absorb(y[0]) * inv_m1 : Real(0);
        d[1] = rn1 * a - weight(r) * y[0];
    }
};

template <class Real>
struct Trajectory {
    std::vector<ode::DenseSegment<Real, 2>> segs;

    State<Real> eval(const Real& r) const {
        auto it = std::upper_bound(segs.begin(), segs.end(), r,
                                   [](const Real& x, const ode::DenseSegment<Real, 2>& s) { return x < s.t0; });
        if (it != segs.begin()) --it;
        return it->eval(r);
    }
    Real start() const { return segs.front().t0; }
    Real end() const { return segs.back().t0 + segs.back().h; }
};

template <class Real>
struct ShotSettings {
    Real rtol;
    Real atol;
    Real r_max;
    Real eps;
    Real event_tol;
    double touch_tol_rel;
    double slope_tol_rel;
    long max_steps;
};

template <class Real>
struct Shot {
    ShotKind kind = ShotKind::NoEvent;
    Real V0 = 0;
    Real r_event = 0;
    Real value = 0;
    Real aux = 0;
    long steps = 0;
    long rejected = 0;
    double local_error = 0;
};

template <class Real>
State<Real> initial_state(const ProblemParams& P, const Real& V0, const Real& eps) {
    using std::pow;
    State<Real> y;
    const Real rn1 = ipow(eps, P.N - 1);
    if (P.admissible()) {
        const auto k = series_coeffs<Real>(classify_sigma(P.sigma), P.N, Real(P.m), Real(P.sigma), V0);
        y[0] = V0 - k.c1 * pow(eps, k.e1) + k.c2 * pow(eps, k.e2);
        const Real vp = -k.e1 * k.c1 * pow(eps, k.e1 - 1) + k.e2 * k.c2 * pow(eps, k.e2 - 1);
        y[1] = rn1 * vp;
    } else {
        const Real ns = Real(P.N) + Real(P.sigma);
        if (!(ns > 0)) fail(ErrorCode::NonIntegrable, "N + sigma <= 0: no bounded start value");
        y[0] = V0;
        y[1] = -V0 * pow(eps, ns) / ns;
    }
    return y;
}

template <class Real, class G>
Real bisect_root(G g, Real a, Real b, const Real& tol) {
    Real ga = g(a);
    for (int it = 0; it < 400 && b - a > tol; ++it) {
        const Real c = (a + b) / 2;
        const Real gc = g(c);
        if ((gc > 0) == (ga > 0)) {
            a = c;
            ga = gc;
        } else {
            b = c;
        }
    }
    return (a + b) / 2;
}

template <class Real>
Shot<Real> shoot(const ProblemParams& P, const Real& V0, const ShotSettings<Real>& s, Trajectory<Real>* traj,
                 std::vector<std::array<double, 3>>* trace) {
    using std::abs;
    Shot<Real> out;
    out.V0 = V0;
    if (V0 == 0) {
        out.kind = ShotKind::Touchdown;
        out.r_event = s.eps;
        return out;
    }
    Rhs<Real> rhs(P);
    ode::Dop853Options<Real> opt;
    opt.rtol = s.rtol;
    opt.atol = s.atol;
    opt.max_steps = s.max_steps;
    ode::Dop853<Real, 2, Rhs<Real>> ig(rhs, opt);
    ig.reset(s.eps, initial_state<Real>(P, V0, s.eps));
    const int n1 = P.N - 1;
    auto finish = [&](ShotKind k) {
        out.kind = k;
        out.steps = ig.steps();
        out.rejected = ig.rejects();
        out.local_error = to_d(ig.last_error());
        return out;
    };
    while (ig.step(s.r_max)) {
        const auto& y = ig.y();
        const auto& yo = ig.y_old();
        if (traj) traj->segs.push_back(ig.segment());
        if (trace) trace->push_back({to_d(ig.t()), to_d(y[0]), to_d(y[1] / ipow(ig.t(), n1))});
        const bool cross = y[0] <= 0;
        const bool rebound = yo[1] < 0 && y[1] >= 0;
        if (!cross && !rebound) continue;
        const Real a = ig.t_old();
        const Real b = ig.t();
        const Real tol = s.event_tol * (b > 1 ? b : Real(1));
        Real rc = std::numeric_limits<Real>::infinity();
        Real rr = rc;
        if (cross) rc = bisect_root<Real>([&](const Real& r) { return ig.dense(r)[0]; }, a, b, tol);
        if (rebound) rr = bisect_root<Real>([&](const Real& r) { return ig.dense(r)[1]; }, a, b, tol);
        if (rr < rc) {
            const auto st = ig.dense(rr);
            if (st[0] > 0) {
                out.r_event = rr;
                out.value = st[0];
                if (st[0] <= s.touch_tol_rel * V0) {
                    out.aux = st[1] / ipow(rr, n1);
                    return finish(ShotKind::Touchdown);
                }
                return finish(ShotKind::Rebounded);
            }
        }
        const auto st = ig.dense(rc);
        out.r_event = rc;
        out.value = st[1] / ipow(rc, n1);
        if (abs(out.value) <= s.slope_tol_rel * V0 / rc) {
            out.aux = out.value;
            out.value = st[0];
            return finish(ShotKind::Touchdown);
        }
        return finish(ShotKind::Crossed);
    }
    out.r_event = ig.t();
    out.value = ig.y()[0];
    out.aux = ig.y()[1] / ipow(ig.t(), n1);
    return finish(ShotKind::NoEvent);
}

ShotOutcome to_outcome(const Shot<double>& s) {
    ShotOutcome o;
    o.kind = s.kind;
    o.V0 = s.V0;
    o.r_event = s.r_event;
    o.value = s.value;
    o.aux = s.aux;
    o.steps = s.steps;
    o.rejected = s.rejected;
    o.local_error = s.local_error;
    return o;
}

ShotOutcome to_outcome(const Shot<quad>& s) {
    ShotOutcome o;
    o.kind = s.kind;
    o.V0 = to_d(s.V0);
    o.r_event = to_d(s.r_event);
    o.value = to_d(s.value);
    o.aux = to_d(s.aux);
    o.steps = s.steps;
    o.rejected = s.rejected;
    o.local_error = s.local_error;
    return o;
}

double start_radius(const ProblemParams& P, double V0, const ShootingControls& c) {
    if (!P.admissible()) return c.series_cap;
    if (V0 <= 0) return c.series_cap;
    return validity_radius(origin_expansion(P, V0), c.series_tol, c.series_cap);
}

ShotSettings<double> double_settings(const ProblemParams& P, double V0, double eps, const ShootingControls& c) {
    return {c.rtol, c.atol, c.r_max > 0 ? c.r_max : default_r_max(P, V0), eps, c.event_tol,
            c.touch_tol_rel, c.slope_tol_rel, c.max_steps};
}

ShotSettings<quad> quad_settings(const ProblemParams& P, double V0, double eps, const ShootingControls& c) {
    return {quad(c.quad_rtol), quad(c.quad_atol_rel) * quad(std::max(V0, 1.0)),
            quad(c.r_max > 0 ? c.r_max : default_r_max(P, V0)), quad(eps), quad(1e-32), c.quad_touch_tol_rel,
            c.quad_slope_tol_rel, c.max_steps};
}

bool opposite(ShotKind a, ShotKind b) {
    return (a == ShotKind::Crossed && b == ShotKind::Rebounded) || (a == ShotKind::Rebounded && b == ShotKind::Crossed);
}

template <class Real>
struct Assembly {
    double R = 0;
    double graft_start = 0;
    double trust_radius = 0;
    RadialProfile profile;
};

template <class Real>
Assembly<Real> assemble(const ProblemParams& P, const Trajectory<Real>& tlo, const Shot<Real>& slo,
                        const Trajectory<Real>& thi, const Shot<Real>& shi, const ShootingControls& c) {
    using std::abs;
    using std::pow;
    const int n1 = P.N - 1;
    const Real V0 = (slo.V0 + shi.V0) / 2;
    const Real re = std::min(slo.r_event, shi.r_event);
    auto avg = [&](const Real& r) {
        const auto a = tlo.eval(r);
        const auto b = thi.eval(r);
        return State<Real>{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
    };

    Real x = re / 2;
    Real r_trust = re - x;
    while (x > re * Real(1e-14)) {
        const Real r = re - x;
        const Real va = tlo.eval(r)[0];
        const Real vb = thi.eval(r)[0];
        if (!(va > 0) || !(vb > 0)) break;
        const Real rel = abs(va - vb) / std::max(va, vb);
        if (rel > Real(c.trust_tol)) break;
        r_trust = r;
        x *= Real(0.9);
    }

    Rhs<Real> rhs(P);
    auto R_estimate = [&](const Real& r) {
        const State<Real> y = avg(r);
        State<Real> d;
        rhs(r, y, d);
        const Real rn1 = ipow(r, n1);
        const Real vp = y[1] / rn1;
        const Real vpp = d[1] / rn1 - Real(n1) * y[1] / (rn1 * r);
        const Real g = y[0] / vp;
        const Real gp = 1 - y[0] * vpp / (vp * vp);
        return gp > 0 ? r - g / gp : re;
    };
    Real R = R_estimate(r_trust);
    if (!(R > r_trust)) R = re;

    const Real level = Real(c.graft_level) * V0;
    Real r_g = r_trust;
    if (avg(r_trust)[0] < level) {
        r_g = bisect_root<Real>([&](const Real& r) { return avg(r)[0] - level; }, tlo.start(), r_trust,
                                r_trust * Real(1e-14));
    }
    const Real x_g = R - r_g;
    const Real V_g = avg(r_g)[0];
    const double omega = P.c.omega;

    const double Rd = to_d(R);
    const double hu = Rd / c.uniform_cells;
    const double q = c.grading_ratio;
    std::vector<Real> rs;
    rs.push_back(Real(0));
    Real r = tlo.start();
    while (true) {
        rs.push_back(r);
        const Real nx = r * Real(q);
        if (to_d(nx - r) >= hu || nx >= r_g) break;
        r = nx;
    }
    const double x_sw = hu / (q - 1);
    const double u_end = std::min(Rd - x_sw, to_d(r_g));
    const double u0 = to_d(rs.back());
    if (u_end > u0) {
        const int n = std::max(1, static_cast<int>(std::ceil((u_end - u0) / hu)));
        for (int i = 1; i <= n; ++i) rs.push_back(Real(u0) + (Real(u_end) - Real(u0)) * Real(i) / Real(n));
    }
    for (Real xx = R - rs.back(); xx / Real(q) > x_g;) {
        xx /= Real(q);
        rs.push_back(R - xx);
    }
    if (rs.back() < r_g) rs.push_back(r_g);
    const std::size_t n_int = rs.size();
    std::vector<Real> graft_x;
    for (Real xx = x_g * Real(0.85); xx > x_g * Real(1e-4); xx *= Real(0.85)) graft_x.push_back(xx);

    std::vector<double> nodes, V, D;
    nodes.reserve(n_int + graft_x.size() + 32);
    for (std::size_t i = 0; i < n_int; ++i) {
        nodes.push_back(to_d(rs[i]));
        if (i == 0) {
            V.push_back(to_d(V0));
            const SeriesCase sc = classify_sigma(P.sigma);
            if (sc == SeriesCase::SigmaInMinus1To0) {
                D.push_back(0.0);
            } else if (sc == SeriesCase::SigmaEqMinus1) {
                D.push_back(-to_d(V0) / (P.N - 1));
            } else {
                D.push_back(-std::numeric_limits<double>::infinity());
            }
            continue;
        }
        const State<Real> y = avg(rs[i]);
        V.push_back(to_d(y[0]));
        D.push_back(to_d(y[1] / ipow(rs[i], n1)));
    }
    for (const Real& xx : graft_x) {
        const Real v = V_g * pow(xx / x_g, Real(omega));
        nodes.push_back(to_d(R - xx));
        V.push_back(to_d(v));
        D.push_back(to_d(-Real(omega) * v / xx));
    }
    nodes.push_back(Rd);
    V.push_back(0.0);
    D.push_back(0.0);
    const int n_tail = 20;
    for (int k = 1; k <= n_tail; ++k) {
        nodes.push_back(Rd * (1 + c.tail_factor * k / n_tail));
        V.push_back(0.0);
        D.push_back(0.0);
    }
    // Drop nodes that collapsed in double conversion.
    std::vector<double> n2, V2, D2;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!n2.empty() && !(nodes[i] > n2.back())) continue;
        n2.push_back(nodes[i]);
        V2.push_back(std::max(0.0, V[i]));
        D2.push_back(D[i]);
    }
    for (std::size_t i = 1; i < V2.size(); ++i) {
        V2[i] = std::min(V2[i], V2[i - 1]);
        if (D2[i] > 0) D2[i] = 0;
    }

    Assembly<Real> a;
    a.R = Rd;
    a.graft_start = to_d(r_g);
    a.trust_radius = to_d(r_trust);
    a.profile = make_profile(RadialGrid::from_nodes(std::move(n2)), std::move(V2), std::move(D2), Rd);
    return a;
}

}  // namespace

const char* to_string(ShotKind k) {
    switch (k) {
        case ShotKind::Crossed: return "Crossed";
        case ShotKind::Rebounded: return "Rebounded";
        case ShotKind::Touchdown: return "Touchdown";
        case ShotKind::NoEvent: return "NoEvent";
    }
    return "?";
}

double default_r_max(const ProblemParams& P, double V0) {
    const double m = P.m;
    const double r0 = std::pow(2 * (m - 1) * std::pow(std::max(V0, 0.0), (m - 1) / m), 1 / (-P.sigma));
    return 50 * std::max(r0, 1.0);
}

ShotOutcome integrate_from(const ProblemParams& P, double V0, const ShootingControls& c) {
    if (!(V0 >= 0) || !std::isfinite(V0)) fail(ErrorCode::InvalidParameter, "V0 must be finite and >= 0");
    const double eps = start_radius(P, V0, c);
    std::vector<std::array<double, 3>> trace;
    auto s = shoot<double>(P, V0, double_settings(P, V0, eps, c), nullptr, c.keep_trace ? &trace : nullptr);
    ShotOutcome o = to_outcome(s);
    o.r_start = eps;
    o.trace = std::move(trace);
    return o;
}

ShotOutcome integrate_from_quad(const ProblemParams& P, double V0, const ShootingControls& c) {
    if (!(V0 >= 0) || !std::isfinite(V0)) fail(ErrorCode::InvalidParameter, "V0 must be finite and >= 0");
    const double eps = start_radius(P, V0, c);
    std::vector<std::array<double, 3>> trace;
    auto s = shoot<quad>(P, quad(V0), quad_settings(P, V0, eps, c), nullptr, c.keep_trace ? &trace : nullptr);
    ShotOutcome o = to_outcome(s);
    o.r_start = eps;
    o.trace = std::move(trace);
    return o;
}

std::vector<double> default_scan_grid(const ShootingControls& c) {
    std::vector<double> g;
    const double d0 = std::log10(c.scan_lo), d1 = std::log10(c.scan_hi);
    const int n = std::max(1, static_cast<int>(std::round((d1 - d0) * c.scan_per_decade)));
    for (int i = 0; i <= n; ++i) g.push_back(std::pow(10.0, d0 + (d1 - d0) * i / n));
    return g;
}

std::vector<ScanEntry> scan_bracket(const ProblemParams& P, std::span<const double> grid, const ShootingControls& c,
                                    std::vector<std::string>* log) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0)) fail(ErrorCode::InvalidParameter, "scan grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) fail(ErrorCode::InvalidParameter, "scan grid must be increasing");
    }
    std::vector<ScanEntry> out(grid.size());
    auto one = [&](std::size_t i) {
        ShotKind k;
        try {
            k = integrate_from(P, grid[i], c).kind;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::IntegratorStall) throw;
            k = ShotKind::NoEvent;
        }
        out[i] = {grid[i], k};
    };
    if (c.jobs > 1) {
        std::vector<std::future<void>> fs;
        std::size_t next = 0;
        while (next < grid.size()) {
            fs.clear();
            for (int j = 0; j < c.jobs && next < grid.size(); ++j, ++next) fs.push_back(std::async(std::launch::async, one, next));
            for (auto& f : fs) f.get();
        }
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i) one(i);
    }
    const auto br = brackets_from_scan(out);
    if (log && br.size() > 1) {
        std::ostringstream os;
        os << "non-monotone classification: " << br.size() << " brackets:";
        for (const auto& [a, b] : br) os << " [" << a << ", " << b << "]";
        log->push_back(os.str());
    }
    return out;
}

std::vector<std::pair<double, double>> brackets_from_scan(std::span<const ScanEntry> scan) {
    std::vector<std::pair<double, double>> br;
    for (std::size_t i = 0; i + 1 < scan.size(); ++i)
        if (opposite(scan[i].second, scan[i + 1].second)) br.emplace_back(scan[i].first, scan[i + 1].first);
    return br;
}

ProfileHeader ShootingResult::header() const {
    ProfileHeader h;
    h.N = params.N;
    h.m = params.m;
    h.sigma = params.sigma;
    h.V0 = V0_star;
    h.R = R;
    h.extras["graft_start"] = graft_start;
    h.extras["trust_radius"] = trust_radius;
    h.extras["series_start"] = series_start;
    return h;
}

ShootingResult bisect_for_support(const ProblemParams& P, std::pair<double, double> bracket, const ShootingControls& c) {
    if (!P.admissible()) fail(ErrorCode::WrongRegime, "bisection needs admissible parameters");
    double lo = bracket.first, hi = bracket.second;
    if (!(lo > 0) || !(hi > lo)) fail(ErrorCode::BracketInvalid, "bracket must satisfy 0 < V0_lo < V0_hi");
    const double eps = std::min(start_radius(P, lo, c), start_radius(P, hi, c));

    ShootingResult res;
    res.params = P;
    res.series_start = eps;
    auto dshot = [&](double v) { return shoot<double>(P, v, double_settings(P, hi, eps, c), nullptr, nullptr); };
    Shot<double> slo = dshot(lo), shi = dshot(hi);
    if (slo.kind == ShotKind::Touchdown || shi.kind == ShotKind::Touchdown) {
        const double v = slo.kind == ShotKind::Touchdown ? lo : hi;
        lo = hi = v;
    } else if (!opposite(slo.kind, shi.kind)) {
        std::ostringstream os;
        os << "endpoints classify as " << to_string(slo.kind) << " and " << to_string(shi.kind);
        fail(ErrorCode::BracketInvalid, os.str());
    }
    const ShotKind klo = slo.kind;
    int it = 0;
    while (hi - lo > c.bracket_rel_width * hi) {
        if (++it > c.max_iter) fail(ErrorCode::NonConvergence, "double bisection exceeded max_iter");
        const double mid = hi / lo > 2 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const Shot<double> s = dshot(mid);
        if (s.kind == ShotKind::Touchdown) {
            lo = hi = mid;
            break;
        }
        if (s.kind == ShotKind::NoEvent) fail(ErrorCode::NonConvergence, "NoEvent inside the bracket");
        (s.kind == klo ? lo : hi) = mid;
    }
    res.iterations = it;

    if (c.quad_refine) {
        const double mid = 0.5 * (lo + hi);
        const ShotSettings<quad> qs = quad_settings(P, hi, eps, c);
        auto qshot = [&](const quad& v, Trajectory<quad>* t) { return shoot<quad>(P, v, qs, t, nullptr); };
        quad qlo = 0, qhi = 0;
        bool ok = false;
        for (int k = 0; k < 5 && !ok; ++k) {
            const quad w = quad(mid) * quad(std::pow(10.0, -9 + k));
            qlo = quad(mid) - w;
            qhi = quad(mid) + w;
            ok = qshot(qlo, nullptr).kind == klo && opposite(klo, qshot(qhi, nullptr).kind);
        }
        if (ok) {
            int qi = 0;
            while (qhi - qlo > quad(c.quad_width_rel) * qhi) {
                if (++qi > c.max_iter) fail(ErrorCode::NonConvergence, "binary128 bisection exceeded max_iter");
                const quad qm = (qlo + qhi) / 2;
                if (!(qm > qlo && qm < qhi)) break;
                const Shot<quad> s = qshot(qm, nullptr);
                if (s.kind == ShotKind::NoEvent) fail(ErrorCode::NonConvergence, "NoEvent inside the bracket");
                if (s.kind == ShotKind::Touchdown) {
                    qlo = qhi = qm;
                    break;
                }
                (s.kind == klo ? qlo : qhi) = qm;
            }
            Trajectory<quad> tl, th;
            const Shot<quad> fl = qshot(qlo, &tl), fh = qshot(qhi, &th);
            auto a = assemble<quad>(P, tl, fl, th, fh, c);
            res.quad_refined = true;
            res.quad_iterations = qi;
            res.V0_lo = to_d(qlo);
            res.V0_hi = to_d(qhi);
            res.V0_star = to_d((qlo + qhi) / 2);
            res.bracket_width = to_d(qhi - qlo);
            res.integrator_tolerance = c.quad_rtol;
            res.lo = to_outcome(fl);
            res.hi = to_outcome(fh);
            res.R = a.R;
            res.graft_start = a.graft_start;
            res.trust_radius = a.trust_radius;
            res.profile = std::move(a.profile);
        } else {
            res.warnings.push_back("binary128 stage could not confirm the bracket; double result kept");
        }
    }
    if (!res.quad_refined) {
        Trajectory<double> tl, th;
        const ShotSettings<double> ds = double_settings(P, hi, eps, c);
        const Shot<double> fl = shoot<double>(P, lo, ds, &tl, nullptr);
        const Shot<double> fh = shoot<double>(P, hi, ds, &th, nullptr);
        auto a = assemble<double>(P, tl, fl, th, fh, c);
        res.V0_lo = lo;
        res.V0_hi = hi;
        res.V0_star = 0.5 * (lo + hi);
        res.bracket_width = hi - lo;
        res.integrator_tolerance = c.rtol;
        res.lo = to_outcome(fl);
        res.hi = to_outcome(fh);
        res.R = a.R;
        res.graft_start = a.graft_start;
        res.trust_radius = a.trust_radius;
        res.profile = std::move(a.profile);
    }
    res.tail_r0 = tail_radius(res.profile, P);
    return res;
}

ShootingResult solve_shooting(const ProblemParams& P, const ShootingControls& c) {
    std::vector<std::string> log;
    const auto grid = default_scan_grid(c);
    const auto scan = scan_bracket(P, grid, c, &log);
    const auto br = brackets_from_scan(scan);
    if (br.empty()) fail(ErrorCode::BracketInvalid, "scan found no Crossed/Rebounded sign change");
    ShootingResult r = bisect_for_support(P, br.front(), c);
    r.warnings.insert(r.warnings.begin(), log.begin(), log.end());
    return r;
}

double ode_residual(const RadialProfile& p, const ProblemParams& P) {
    if (!p.derivs) fail(ErrorCode::InvalidParameter, "ODE residual needs nodal derivatives");
    const auto& d = *p.derivs;
    const int n1 = P.N - 1;
    const double R = p.support_radius.value_or(p.grid.r_max());
    std::size_t a = 0;
    while (a < p.size() && (p.r(a) <= 0 || !std::isfinite(d[a]))) ++a;
    if (a + 1 >= p.size()) return 0;
    const GaussRule& g = gauss_rule(8);
    const double inv_m = 1 / P.m, inv_m1 = 1 / (P.m - 1);
    auto flux = [&](std::size_t i) { return std::pow(p.r(i), n1) * d[i]; };
    const double Wa = flux(a);
    double scale = 1;
    for (std::size_t i = a; i < p.size() && p.r(i) <= R; ++i) scale = std::max(scale, std::abs(flux(i)));
    double integral = 0;
    double worst = 0;
    for (std::size_t i = a; i + 1 < p.size() && p.r(i) < R; ++i) {
        const CellPoly cp = cell_poly(p, i);
        double absorb = 0;
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            const double r = cp.a + cp.h * g.x[k];
            absorb += g.w[k] * std::pow(r, n1) * std::pow(std::max(cp(r), 0.0), inv_m);
        }
        integral += cp.h * absorb * inv_m1;
        integral -= integrate_power_poly(n1 + P.sigma, cp.a, cp.a + cp.h, std::span<const double>(cp.c, cp.degree + 1));
        const double W = flux(i + 1);
        worst = std::max(worst, std::abs(W - Wa - integral) / scale);
    }
    return worst;
}

}  // namespace hh
