#include "hh/radial_field.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "hh/error.hpp"

namespace hh {

namespace {

template <unsigned P>
GaussRule build_rule() {
    using G = boost::math::quadrature::gauss<double, P>;
    GaussRule g;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            g.x.push_back(0.5);
            g.w.push_back(0.5 * w[i]);
            continue;
        }
        g.x.push_back(0.5 * (1 - x[i]));
        g.w.push_back(0.5 * w[i]);
        g.x.push_back(0.5 * (1 + x[i]));
        g.w.push_back(0.5 * w[i]);
    }
    return g;
}

double poly_eval(std::span<const double> c, double t) {
    double s = 0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * t + c[k];
    return s;
}

double binom(int n, int k) {
    double b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Square of the cell polynomial (degree <= 6).
std::vector<double> poly_square(const CellPoly& cp) {
    std::vector<double> s(2 * cp.degree + 1, 0.0);
    for (int i = 0; i <= cp.degree; ++i)
        for (int j = 0; j <= cp.degree; ++j) s[i + j] += cp.c[i] * cp.c[j];
    return s;
}

// Square of d/dr of the cell polynomial.
std::vector<double> slope_square(const CellPoly& cp) {
    std::vector<double> d(std::max(cp.degree, 1), 0.0);
    for (int k = 1; k <= cp.degree; ++k) d[k - 1] = k * cp.c[k] / cp.h;
    std::vector<double> s(2 * d.size() - 1, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) s[i + j] += d[i] * d[j];
    return s;
}

void check_tau(const RadialProfile& p, int N, double tau) {
    if (tau <= -N && p.values.front() > 0 && p.r(0) == 0.0) {
        std::ostringstream os;
        os << "tau=" << tau << " <= -N=" << -N << " with V(0) > 0";
        fail(ErrorCode::NonIntegrable, os.str());
    }
}

}  // namespace

const GaussRule& gauss_rule(int points) {
    static const GaussRule g8 = build_rule<8>();
    static const GaussRule g16 = build_rule<16>();
    return points >= 16 ? g16 : g8;
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes, Grading grading) {
    if (nodes.size() < 2) fail(ErrorCode::InvalidParameter, "grid needs at least two nodes");
    if (!(nodes.front() >= 0)) fail(ErrorCode::InvalidParameter, "grid must start at r >= 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) fail(ErrorCode::InvalidParameter, "grid nodes must be strictly increasing");
    if (!std::isfinite(nodes.back())) fail(ErrorCode::InvalidParameter, "grid must be finite");
    return RadialGrid{std::move(nodes), grading};
}

RadialGrid RadialGrid::uniform(double r_max, int cells) {
    if (cells < 1 || !(r_max > 0)) fail(ErrorCode::InvalidParameter, "uniform grid needs r_max > 0 and cells >= 1");
    std::vector<double> n(cells + 1);
    for (int i = 0; i <= cells; ++i) n[i] = r_max * i / cells;
    n.back() = r_max;
    return RadialGrid{std::move(n), Grading::Uniform};
}

RadialGrid RadialGrid::graded(double r_max, int cells, double ratio, double min_cell_rel) {
    if (cells < 1 || !(r_max > 0) || !(ratio > 1) || !(min_cell_rel > 0))
        fail(ErrorCode::InvalidParameter, "graded grid needs r_max > 0, cells >= 1, ratio > 1, min cell > 0");
    const double hu = r_max / cells;
    std::vector<double> n{0.0};
    double h = min_cell_rel * r_max;
    while (h < hu && n.back() + h < r_max) {
        n.push_back(n.back() + h);
        h *= ratio;
    }
    const double rest = r_max - n.back();
    const int k = std::max(1, static_cast<int>(std::ceil(rest / hu - 1e-9)));
    const double r0 = n.back();
    for (int i = 1; i <= k; ++i) n.push_back(r0 + rest * i / k);
    n.back() = r_max;
    return RadialGrid{std::move(n), Grading::GeometricNearOrigin};
}

bool is_nonincreasing(std::span<const double> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

RadialProfile make_profile(RadialGrid grid, std::vector<double> values, std::optional<std::vector<double>> derivs,
                           std::optional<double> support_radius) {
    if (values.size() != grid.size()) fail(ErrorCode::InvalidParameter, "values length differs from grid");
    if (derivs && derivs->size() != grid.size()) fail(ErrorCode::InvalidParameter, "derivs length differs from grid");
    for (double v : values)
        if (!(v >= 0) || !std::isfinite(v)) fail(ErrorCode::InvalidParameter, "profile values must be finite and >= 0");
    RadialProfile p;
    p.grid = std::move(grid);
    p.values = std::move(values);
    p.derivs = std::move(derivs);
    p.support_radius = support_radius;
    p.monotone = is_nonincreasing(p.values);
    return p;
}

double CellPoly::operator()(double r) const {
    const double t = (r - a) / h;
    return poly_eval(std::span<const double>(c, degree + 1), t);
}

double CellPoly::slope(double r) const {
    const double t = (r - a) / h;
    double s = 0;
    for (int k = degree; k >= 1; --k) s = s * t + k * c[k];
    return s / h;
}

CellPoly cell_poly(const RadialProfile& p, std::size_t i) {
    CellPoly cp;
    cp.a = p.r(i);
    cp.h = p.r(i + 1) - p.r(i);
    const double va = p.values[i];
    const double vb = p.values[i + 1];
    if (p.derivs) {
        const double da = (*p.derivs)[i];
        const double db = (*p.derivs)[i + 1];
        if (std::isfinite(da) && std::isfinite(db)) {
            const double h = cp.h;
            cp.degree = 3;
            cp.c[0] = va;
            cp.c[1] = h * da;
            cp.c[2] = -3 * va - 2 * h * da + 3 * vb - h * db;
            cp.c[3] = 2 * va + h * da - 2 * vb + h * db;
            return cp;
        }
    }
    cp.degree = 1;
    cp.c[0] = va;
    cp.c[1] = vb - va;
    return cp;
}

double integrate_power_poly(double alpha, double a, double b, std::span<const double> c) {
    const double h = b - a;
    if (a <= h) {
        const int deg = static_cast<int>(c.size()) - 1;
        double total = 0;
        double hk = 1;
        std::vector<double> d(c.size(), 0.0);
        for (int k = 0; k <= deg; ++k) {
            for (int j = 0; j <= k; ++j) d[j] += c[k] * binom(k, j) * std::pow(-a, k - j) / hk;
            hk *= h;
        }
        for (int j = 0; j <= deg; ++j) {
            if (d[j] == 0.0) continue;
            const double e = alpha + j + 1;
            if (e == 0.0) {
                if (a == 0.0) fail(ErrorCode::NonIntegrable, "log-divergent power weight at origin");
                total += d[j] * std::log(b / a);
            } else {
                if (e < 0 && a == 0.0) fail(ErrorCode::NonIntegrable, "power weight not integrable at origin");
                total += d[j] * (std::pow(b, e) - std::pow(a, e)) / e;
            }
        }
        return total;
    }
    const GaussRule& g = gauss_rule(16);
    double s = 0;
    for (std::size_t q = 0; q < g.x.size(); ++q) s += g.w[q] * std::pow(a + h * g.x[q], alpha) * poly_eval(c, g.x[q]);
    return h * s;
}

double weighted_norm_sq(const RadialProfile& p, int N, double tau) {
    check_tau(p, N, tau);
    double s = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const CellPoly cp = cell_poly(p, i);
        if (cp.c[0] == 0 && cp.c[1] == 0 && cp.c[2] == 0 && cp.c[3] == 0) continue;
        s += integrate_power_poly(N - 1 + tau, cp.a, cp.a + cp.h, poly_square(cp));
    }
    return N * unit_ball_volume(N) * s;
}

double dirichlet_energy(const RadialProfile& p, int N) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const CellPoly cp = cell_poly(p, i);
        if (cp.c[1] == 0 && cp.c[2] == 0 && cp.c[3] == 0) continue;
        s += integrate_power_poly(N - 1, cp.a, cp.a + cp.h, slope_square(cp));
    }
    return N * unit_ball_volume(N) * s;
}

double lp_power(const RadialProfile& p, int N, double power) {
    const GaussRule& g = gauss_rule(8);
    double s = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (p.values[i] == 0 && p.values[i + 1] == 0 && (!p.derivs || ((*p.derivs)[i] == 0 && (*p.derivs)[i + 1] == 0)))
            continue;
        const CellPoly cp = cell_poly(p, i);
        double c = 0;
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const double r = cp.a + cp.h * g.x[q];
            const double v = poly_eval(std::span<const double>(cp.c, cp.degree + 1), g.x[q]);
            c += g.w[q] * std::pow(r, N - 1) * std::pow(std::abs(v), power);
        }
        s += cp.h * c;
    }
    return N * unit_ball_volume(N) * s;
}

double lp_norm(const RadialProfile& p, int N, double power) {
    if (std::isinf(power)) {
        double mx = 0;
        for (double v : p.values) mx = std::max(mx, std::abs(v));
        return mx;
    }
    return std::pow(lp_power(p, N, power), 1 / power);
}

double lmu_norm(const RadialProfile& p, const ProblemParams& params) { return lp_power(p, params.N, params.c.mu); }

double functional_J(const RadialProfile& p, const ProblemParams& params) {
    const double m = params.m;
    return 0.5 * dirichlet_energy(p, params.N) + m / (m * m - 1) * lmu_norm(p, params);
}

double quotient_from(double dirichlet, double lmu, double weighted_sigma, const ProblemParams& params) {
    if (!(weighted_sigma > 0)) fail(ErrorCode::DegenerateProfile, "weighted norm at sigma vanishes");
    return std::pow(dirichlet, params.c.s_dirichlet_exp) * std::pow(lmu, params.c.s_lmu_exp) / weighted_sigma;
}

double quotient_S(const RadialProfile& p, const ProblemParams& params) {
    const double w = weighted_norm_sq(p, params.N, params.sigma);
    return quotient_from(dirichlet_energy(p, params.N), lmu_norm(p, params), w, params);
}

FunctionalReport evaluate_functionals(const RadialProfile& p, const ProblemParams& params,
                                      std::span<const double> extra_taus, std::span<const double> powers) {
    FunctionalReport f;
    f.dirichlet = dirichlet_energy(p, params.N);
    f.lmu = lmu_norm(p, params);
    const double m = params.m;
    f.J = 0.5 * f.dirichlet + m / (m * m - 1) * f.lmu;
    f.weighted[params.sigma] = weighted_norm_sq(p, params.N, params.sigma);
    for (double tau : extra_taus) f.weighted[tau] = weighted_norm_sq(p, params.N, tau);
    for (double q : powers) f.lp[q] = lp_norm(p, params.N, q);
    const double ws = f.weighted[params.sigma];
    f.S = ws > 0 ? quotient_from(f.dirichlet, f.lmu, ws, params) : 0.0;
    return f;
}

double evaluate(const RadialProfile& p, double r) {
    if (p.support_radius && r >= *p.support_radius) return 0.0;
    const auto& n = p.grid.nodes;
    if (r <= n.front()) return p.values.front();
    if (r >= n.back()) return p.values.back();
    const std::size_t i = std::upper_bound(n.begin(), n.end(), r) - n.begin() - 1;
    return std::max(0.0, cell_poly(p, i)(r));
}

RadialProfile resample(const RadialProfile& p, const RadialGrid& g) {
    if (p.support_radius && g.r_max() < *p.support_radius)
        fail(ErrorCode::GridTooShort, "target grid ends before the support radius");
    if (!p.support_radius && g.r_max() > p.grid.r_max() && p.values.back() > 0)
        fail(ErrorCode::GridTooShort, "target grid extends beyond a profile without known support");
    const auto& n = p.grid.nodes;
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double r = g.nodes[k];
        if (r <= n.front()) {
            v[k] = p.values.front();
        } else if (r >= n.back()) {
            v[k] = p.values.back();
        } else {
            const std::size_t i = std::upper_bound(n.begin(), n.end(), r) - n.begin() - 1;
            const double t = (r - n[i]) / (n[i + 1] - n[i]);
            v[k] = std::max(0.0, (1 - t) * p.values[i] + t * p.values[i + 1]);
        }
        if (p.support_radius && r >= *p.support_radius) v[k] = 0.0;
    }
    return make_profile(g, std::move(v), std::nullopt, p.support_radius);
}

std::vector<double> finite_difference_derivs(const RadialProfile& p) {
    const auto& r = p.grid.nodes;
    const auto& f = p.values;
    const std::size_t n = r.size();
    std::vector<double> d(n, 0.0);
    if (n == 2) {
        d[0] = d[1] = (f[1] - f[0]) / (r[1] - r[0]);
        return d;
    }
    {
        const double h1 = r[1] - r[0], h2 = r[2] - r[1];
        d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    {
        const double h1 = r[n - 2] - r[n - 3], h2 = r[n - 1] - r[n - 2];
        d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] + (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
    }
    return d;
}

RadialProfile with_fd_derivs(const RadialProfile& p) {
    RadialProfile q = p;
    q.derivs = finite_difference_derivs(p);
    return q;
}

std::optional<double> detect_support(const RadialProfile& p) {
    std::size_t j = p.size();
    while (j > 0 && p.values[j - 1] == 0.0) --j;
    if (j == p.size()) return std::nullopt;
    if (j == 0) return p.r(0);
    return p.r(j);
}

RadialProfile scale_values(const RadialProfile& p, double c) {
    RadialProfile q = p;
    for (double& v : q.values) v *= c;
    if (q.derivs)
        for (double& d : *q.derivs) d *= c;
    return q;
}

RadialProfile dilate(const RadialProfile& p, double lambda) {
    RadialProfile q = p;
    for (double& r : q.grid.nodes) r /= lambda;
    if (q.derivs)
        for (double& d : *q.derivs) d *= lambda;
    if (q.support_radius) *q.support_radius /= lambda;
    return q;
}

}  // namespace hh
