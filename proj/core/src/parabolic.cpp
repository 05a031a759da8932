#include "hh/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hh/error.hpp"
#include "hh/origin_series.hpp"

namespace hh {

namespace {

// Banded LU without pivoting on the leading n rows; M holds rows as in RescaledOperator.
template <std::size_t W>
bool band_solve(std::vector<std::array<double, W>> M, std::vector<double>& x, std::size_t n) {
    constexpr int b = static_cast<int>(W / 2);
    const int nn = static_cast<int>(n);
    for (int k = 0; k < nn; ++k) {
        const double piv = M[k][b];
        if (piv == 0 || !std::isfinite(piv)) return false;
        for (int i = k + 1; i <= std::min(nn - 1, k + b); ++i) {
            const double f = M[i][b + k - i] / piv;
            if (f == 0) continue;
            for (int j = k; j <= std::min(nn - 1, k + b); ++j) M[i][b + j - i] -= f * M[k][b + j - k];
            x[i] -= f * x[k];
        }
    }
    for (int i = nn - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j <= std::min(nn - 1, i + b); ++j) s -= M[i][b + j - i] * x[j];
        x[i] = s / M[i][b];
    }
    return true;
}

// Coefficients in t = (r - a)/(b - a) of the Lagrange basis polynomial of node k among xs.
std::vector<double> lagrange_poly(const std::vector<double>& xs, std::size_t k, double a, double b) {
    std::vector<double> c{1.0};
    const double h = b - a;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (j == k) continue;
        const double d = xs[k] - xs[j];
        // factor (r - x_j)/d = (a - x_j)/d + (h/d) t
        const double c0 = (a - xs[j]) / d, c1 = h / d;
        std::vector<double> nc(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            nc[i] += c[i] * c0;
            nc[i + 1] += c[i] * c1;
        }
        c = std::move(nc);
    }
    return c;
}

double lagrange_derivative(const std::vector<double>& xs, std::size_t k, double x) {
    double s = 0;
    for (std::size_t l = 0; l < xs.size(); ++l) {
        if (l == k) continue;
        double p = 1 / (xs[k] - xs[l]);
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (j != k && j != l) p *= (x - xs[j]) / (xs[k] - xs[j]);
        s += p;
    }
    return s;
}

double elliptic_support(const RadialProfile& p) {
    if (p.support_radius) return *p.support_radius;
    if (auto s = detect_support(p)) return *s;
    return p.grid.r_max();
}

double numerical_support(const RadialGrid& g, const std::vector<double>& U, double level) {
    const double umax = *std::max_element(U.begin(), U.end());
    if (!(umax > 0)) return 0;
    for (std::size_t i = U.size(); i-- > 0;)
        if (U[i] > level * umax) return i + 1 < U.size() ? g.nodes[i + 1] : g.nodes[i];
    return 0;
}

}  // namespace

ParabolicState make_state(RadialGrid grid, std::vector<double> U, double s) {
    if (U.size() != grid.size()) fail(ErrorCode::InvalidParameter, "state values length differs from grid");
    for (double u : U)
        if (!(u >= 0) || !std::isfinite(u)) fail(ErrorCode::InvalidParameter, "state values must be finite and >= 0");
    ParabolicState st;
    st.grid = std::move(grid);
    st.U = std::move(U);
    st.s = s;
    return st;
}

RescaledOperator::RescaledOperator(const ProblemParams& params, RadialGrid grid, double high_order_rel)
    : params_(params), grid_(std::move(grid)) {
    const auto& r = grid_.nodes;
    const std::size_t n = r.size();
    if (n < 5) fail(ErrorCode::GridTooShort, "parabolic grid needs at least four cells");
    const int N = params_.N;
    const double alpha_s = N - 1 + params_.sigma, alpha_a = N - 1;
    const double r_ho = high_order_rel * grid_.r_max();
    A_.assign(n, {});
    B_.assign(n, {});
    vol_.assign(n, 0.0);
    auto add = [&](std::vector<std::array<double, 2 * band + 1>>& M, std::size_t i, std::size_t j, double v) {
        M[i][band + static_cast<int>(j) - static_cast<int>(i)] += v;
    };
    auto stencil = [&](std::size_t cell) {
        std::size_t lo = cell > 0 ? cell - 1 : 0;
        lo = std::min(lo, n - 4);
        return lo;
    };
    for (std::size_t f = 0; f + 1 < n; ++f) {
        const double mid = 0.5 * (r[f] + r[f + 1]);
        const double w = std::pow(mid, N - 1);
        const std::size_t lo = stencil(f);
        const std::vector<double> xs(r.begin() + lo, r.begin() + lo + 4);
        for (std::size_t k = 0; k < 4; ++k) {
            const double d = w * lagrange_derivative(xs, k, mid);
            add(A_, f, lo + k, d);
            if (f + 1 + 1 < n) add(A_, f + 1, lo + k, -d);
        }
    }
    const double p1[1] = {1.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double lo_edge = i > 0 ? 0.5 * (r[i - 1] + r[i]) : 0.0;
        const double hi_edge = 0.5 * (r[i] + r[i + 1]);
        vol_[i] = integrate_power_poly(alpha_a, r[i], hi_edge, p1);
        if (i > 0) vol_[i] += integrate_power_poly(alpha_a, lo_edge, r[i], p1);
        const bool ho = r[std::min(i + 3, n - 1)] < r_ho;
        if (!ho) {
            double ws = integrate_power_poly(alpha_s, r[i], hi_edge, p1);
            if (i > 0) ws += integrate_power_poly(alpha_s, lo_edge, r[i], p1);
            add(A_, i, i, ws);
            add(B_, i, i, vol_[i]);
            continue;
        }
        auto half = [&](std::size_t cell, double a, double b) {
            const std::size_t lo = stencil(cell);
            const std::vector<double> xs(r.begin() + lo, r.begin() + lo + 4);
            for (std::size_t k = 0; k < 4; ++k) {
                const std::vector<double> c = lagrange_poly(xs, k, a, b);
                add(A_, i, lo + k, integrate_power_poly(alpha_s, a, b, c));
                add(B_, i, lo + k, integrate_power_poly(alpha_a, a, b, c));
            }
        };
        half(i, r[i], hi_edge);
        if (i > 0) half(i - 1, lo_edge, r[i]);
    }
}

std::vector<double> RescaledOperator::rhs(const std::vector<double>& U) const {
    const std::size_t n = U.size();
    const double m = params_.m;
    std::vector<double> V(n), out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) V[i] = std::pow(U[i], m);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double a = 0, b = 0;
        for (int k = 0; k <= 2 * band; ++k) {
            const long j = static_cast<long>(i) - band + k;
            if (j < 0 || j >= static_cast<long>(n)) continue;
            a += A_[i][k] * V[j];
            b += B_[i][k] * U[j];
        }
        out[i] = (a - b / (m - 1)) / vol_[i];
    }
    return out;
}

double RescaledOperator::mass(const std::vector<double>& U) const {
    double s = 0;
    for (std::size_t i = 0; i < U.size(); ++i) s += vol_[i] * U[i];
    return s;
}

double RescaledOperator::stable_dt(const std::vector<double>& U, double safety) const {
    const double umax = *std::max_element(U.begin(), U.end());
    if (!(umax > 0)) return std::numeric_limits<double>::infinity();
    double hmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) hmin = std::min(hmin, grid_.nodes[i + 1] - grid_.nodes[i]);
    const double m = params_.m;
    return safety * hmin * hmin / (2 * params_.N * m * std::pow(umax, m - 1));
}

bool RescaledOperator::implicit_step(std::vector<double>& U, double dt, double tol, int max_iter) const {
    const std::size_t n = U.size(), nf = n - 1;
    const double m = params_.m;
    const std::vector<double> U0 = U;
    std::vector<double> W = U, V(n), dV(n), G(n);
    std::vector<std::array<double, 2 * band + 1>> J(nf);
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::max(W[i], 0.0);
            V[i] = std::pow(w, m);
            dV[i] = m * std::pow(w, m - 1);
        }
        double wmax = 0;
        for (std::size_t i = 0; i < nf; ++i) {
            double a = 0, b = 0;
            J[i].fill(0.0);
            for (int k = 0; k <= 2 * band; ++k) {
                const long j = static_cast<long>(i) - band + k;
                if (j < 0 || j >= static_cast<long>(nf)) continue;
                a += A_[i][k] * V[j];
                b += B_[i][k] * W[j];
                J[i][k] = -A_[i][k] * dV[j] + B_[i][k] / (m - 1);
            }
            J[i][band] += vol_[i] / dt;
            G[i] = vol_[i] * (W[i] - U0[i]) / dt - a + b / (m - 1);
            wmax = std::max(wmax, std::abs(W[i]));
        }
        if (!band_solve(J, G, nf)) return false;
        double step = 0;
        for (std::size_t i = 0; i < nf; ++i) {
            W[i] -= G[i];
            step = std::max(step, std::abs(G[i]));
        }
        if (!std::isfinite(step)) return false;
        if (step <= tol * std::max(wmax, 1e-300)) {
            U = W;
            U.back() = 0;
            return true;
        }
    }
    return false;
}

std::vector<double> rescaled_rhs(const ParabolicState& state, const ProblemParams& params) {
    return RescaledOperator(params, state.grid).rhs(state.U);
}

namespace {

void finish_step(ParabolicState& st, const RescaledOperator& op, double dt) {
    double clipped = 0;
    for (std::size_t i = 0; i < st.U.size(); ++i)
        if (st.U[i] < 0) {
            clipped -= op.volumes()[i] * st.U[i];
            st.U[i] = 0;
        }
    st.clipped_mass += clipped;
    st.s += dt;
    st.dt_last = dt;
    st.mass = op.mass(st.U);
}

ParabolicState explicit_advance(const RescaledOperator& op, const ParabolicState& state, double dt,
                                const ParabolicControls& c) {
    if (!(dt > 0)) fail(ErrorCode::InvalidParameter, "time step must be positive");
    const double h = std::min(dt, op.stable_dt(state.U, c.safety));
    if (h < c.dt_min) fail(ErrorCode::StabilityViolation, "stable time step below dt_min");
    ParabolicState out = state;
    const std::vector<double> f = op.rhs(state.U);
    for (std::size_t i = 0; i < out.U.size(); ++i) out.U[i] += h * f[i];
    out.U.back() = 0;
    finish_step(out, op, h);
    return out;
}

ParabolicState implicit_advance(const RescaledOperator& op, const ParabolicState& state, double dt,
                                const ParabolicControls& c) {
    if (!(dt > 0)) fail(ErrorCode::InvalidParameter, "time step must be positive");
    ParabolicState out = state;
    double h = dt;
    while (!op.implicit_step(out.U, h, c.newton_tol, c.newton_max_iter)) {
        out.U = state.U;
        h *= 0.5;
        if (h < c.dt_min) fail(ErrorCode::StabilityViolation, "implicit step below dt_min");
    }
    finish_step(out, op, h);
    return out;
}

}  // namespace

ParabolicState step(const ParabolicState& state, const ProblemParams& params, double dt,
                    const ParabolicControls& c) {
    return explicit_advance(RescaledOperator(params, state.grid), state, dt, c);
}

ParabolicState implicit_step(const ParabolicState& state, const ProblemParams& params, double dt,
                             const ParabolicControls& c) {
    return implicit_advance(RescaledOperator(params, state.grid), state, dt, c);
}

RadialGrid simulation_grid(const RadialProfile& elliptic, const ProblemParams& params, const ParabolicControls& c) {
    const double r_max = c.r_max_factor * elliptic_support(elliptic);
    const double e = params.sigma + 2;
    if (std::abs(e - std::round(e)) < 1e-12) return RadialGrid::uniform(r_max, c.cells);
    return RadialGrid::graded(r_max, c.cells, c.origin_ratio, c.origin_cell_rel);
}

RadialGrid bisect_cells(const RadialGrid& g) {
    std::vector<double> n;
    n.reserve(2 * g.size() - 1);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        n.push_back(g.nodes[i]);
        n.push_back(0.5 * (g.nodes[i] + g.nodes[i + 1]));
    }
    n.push_back(g.nodes.back());
    return RadialGrid::from_nodes(std::move(n), g.grading);
}

ParabolicState separate_variables_state(const RadialProfile& elliptic, const ProblemParams& params, RadialGrid g) {
    std::optional<OriginExpansion> series;
    double r_series = 0;
    if (params.admissible() && elliptic.size() > 1 && elliptic.r(0) == 0 && elliptic.values[0] > 0 &&
        elliptic.r(1) <= 1e-3 * elliptic.grid.r_max()) {
        series = origin_expansion(params, elliptic.values[0]);
        r_series = elliptic.r(1);
    }
    std::vector<double> U(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.nodes[i];
        const double V = series && r > 0 && r < r_series ? eval_origin(*series, r).V : evaluate(elliptic, r);
        U[i] = std::pow(std::max(V, 0.0), 1 / params.m);
    }
    U.back() = 0;
    ParabolicState st = make_state(std::move(g), std::move(U));
    st.mass = RescaledOperator(params, st.grid).mass(st.U);
    return st;
}

ParabolicState separate_variables_state(const RadialProfile& elliptic, const ProblemParams& params,
                                        const ParabolicControls& c) {
    return separate_variables_state(elliptic, params, simulation_grid(elliptic, params, c));
}

double relative_deviation(const std::vector<double>& U, const std::vector<double>& f) {
    const double fmax = *std::max_element(f.begin(), f.end());
    double d = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] > 0.01 * fmax) d = std::max(d, std::abs(U[i] - f[i]) / f[i]);
    return d;
}

TrackingReport track_separate_variables(const RadialProfile& elliptic, const ProblemParams& params,
                                        double horizon_s, double delta, const ParabolicControls& c) {
    if (!(horizon_s >= 0)) fail(ErrorCode::InvalidParameter, "horizon must be >= 0");
    if (!(delta >= 0 && delta <= 0.1)) fail(ErrorCode::InvalidParameter, "perturbation amplitude must lie in [0, 0.1]");
    const ParabolicState base = separate_variables_state(elliptic, params, c);
    const std::vector<double> f = base.U;
    const double R = elliptic_support(elliptic);
    const RescaledOperator op(params, base.grid);

    ParabolicState st = base;
    for (std::size_t i = 0; i < st.U.size(); ++i) {
        const double x = 2 * st.grid.nodes[i] / R;
        st.U[i] *= 1 + delta * std::exp(-x * x);
    }
    st.mass = op.mass(st.U);
    const double mass0 = st.mass;

    TrackingReport rep;
    rep.horizon_s = horizon_s;
    rep.delta = delta;
    rep.cells = c.cells;
    const double cell = st.grid.nodes.back() - st.grid.nodes[st.grid.size() - 2];
    rep.support_initial = numerical_support(st.grid, st.U, c.support_level);
    rep.deviation_history.emplace_back(0.0, relative_deviation(st.U, f));
    double next_sample = c.sample_ds;
    const double s_orig = 1.0;
    bool orig_done = false;
    auto record_original = [&](const ParabolicState& x) {
        const double scale = std::pow(std::exp(-x.s), -1 / (params.m - 1));
        const double fmax = *std::max_element(f.begin(), f.end());
        double e = 0;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] > 0.01 * fmax) e = std::max(e, std::abs(scale * x.U[i] - scale * f[i]) / (scale * f[i]));
        rep.original_variables_error = e;
        orig_done = true;
    };
    if (horizon_s == 0 && s_orig == 0) record_original(st);

    const double eps = 1e-12 * std::max(1.0, horizon_s);
    while (st.s < horizon_s - eps) {
        double target = std::min(horizon_s, next_sample);
        if (!orig_done && s_orig <= horizon_s) target = std::min(target, s_orig);
        double h = target - st.s;
        if (c.implicit) h = std::min(h, c.dt);
        st = c.implicit ? implicit_advance(op, st, h, c) : explicit_advance(op, st, h, c);
        ++rep.steps;
        if (!orig_done && std::abs(st.s - s_orig) <= eps) record_original(st);
        if (st.s >= next_sample - eps || st.s >= horizon_s - eps) {
            rep.deviation_history.emplace_back(st.s, relative_deviation(st.U, f));
            while (next_sample <= st.s + eps) next_sample += c.sample_ds;
        }
    }
    for (const auto& [s, d] : rep.deviation_history) rep.max_deviation = std::max(rep.max_deviation, d);
    rep.support_final = numerical_support(st.grid, st.U, c.support_level);
    rep.support_growth_cells = (rep.support_final - rep.support_initial) / cell;
    rep.clipped_mass_rel = mass0 > 0 ? st.clipped_mass / mass0 : 0;
    if (delta == 0) rep.passed = rep.max_deviation <= 1e-2;
    return rep;
}

StationarityResidual stationarity_residual(const RadialProfile& elliptic, const ProblemParams& params,
                                           const RadialGrid& grid) {
    const ParabolicState st = separate_variables_state(elliptic, params, grid);
    const RescaledOperator op(params, st.grid);
    const std::vector<double> f = op.rhs(st.U);
    const auto& w = op.volumes();
    double sup = 0, umax = 0, num = 0, den = 0, l1 = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        sup = std::max(sup, std::abs(f[i]));
        umax = std::max(umax, st.U[i]);
        num += w[i] * f[i] * f[i];
        den += w[i] * st.U[i] * st.U[i];
        l1 += w[i] * std::abs(f[i]);
    }
    StationarityResidual r;
    r.cells = grid.size() - 1;
    r.sup_rel = sup / umax;
    r.l2_rel = std::sqrt(num / den);
    r.l1_rel = l1 / op.mass(st.U);
    return r;
}

StationarityOrder stationarity_order(const RadialProfile& elliptic, const ProblemParams& params,
                                     const ParabolicControls& c) {
    const RadialGrid g = simulation_grid(elliptic, params, c);
    StationarityOrder o;
    o.coarse = stationarity_residual(elliptic, params, g);
    o.fine = stationarity_residual(elliptic, params, bisect_cells(g));
    o.order_sup = std::log2(o.coarse.sup_rel / o.fine.sup_rel);
    o.order_l2 = std::log2(o.coarse.l2_rel / o.fine.l2_rel);
    o.order_l1 = std::log2(o.coarse.l1_rel / o.fine.l1_rel);
    return o;
}

}  // namespace hh
