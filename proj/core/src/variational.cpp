#include "hh/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hh/error.hpp"
#include "hh/isotonic.hpp"
#include "hh/shooting.hpp"

namespace hh {

namespace {

// Solves the leading n x n block of a symmetric tridiagonal system in place.
void tridiag_solve(const std::vector<double>& diag, const std::vector<double>& upper, std::vector<double>& x,
                   std::size_t n) {
    std::vector<double> c(n), d(n);
    double denom = diag[0];
    c[0] = n > 1 ? upper[0] / denom : 0;
    d[0] = x[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - upper[i - 1] * c[i - 1];
        c[i] = i + 1 < n ? upper[i] / denom : 0;
        d[i] = (x[i] - upper[i - 1] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
}

double dot(std::span<const double> a, std::span<const double> b, std::size_t n) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> tri_apply(const std::vector<double>& d, const std::vector<double>& u, std::span<const double> V) {
    const std::size_t n = d.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = d[i] * V[i];
        if (i > 0) s += u[i - 1] * V[i - 1];
        if (i + 1 < n) s += u[i] * V[i + 1];
        out[i] = s;
    }
    return out;
}

}  // namespace

P1Discretization::P1Discretization(const ProblemParams& params, RadialGrid grid)
    : params_(params), grid_(std::move(grid)) {
    const std::size_t n = grid_.size();
    const int N = params_.N;
    const double sphere = params_.c.sphere_area;
    const double alpha = N - 1 + params_.sigma;
    kd_.assign(n, 0.0);
    ku_.assign(n - 1, 0.0);
    md_.assign(n, 0.0);
    mu_.assign(n - 1, 0.0);
    lumped_.assign(n, 0.0);
    const GaussRule& g = gauss_rule(8);
    const double p_aa[3] = {1, -2, 1}, p_ab[3] = {0, 1, -1}, p_bb[3] = {0, 0, 1};
    const double p_a[2] = {1, -1}, p_b[2] = {0, 1};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = grid_.nodes[i], b = grid_.nodes[i + 1], h = b - a;
        const double s = sphere * (std::pow(b, N) - std::pow(a, N)) / (N * h * h);
        kd_[i] += s;
        kd_[i + 1] += s;
        ku_[i] -= s;
        md_[i] += sphere * integrate_power_poly(alpha, a, b, p_aa);
        mu_[i] += sphere * integrate_power_poly(alpha, a, b, p_ab);
        md_[i + 1] += sphere * integrate_power_poly(alpha, a, b, p_bb);
        lumped_[i] += sphere * integrate_power_poly(N - 1, a, b, p_a);
        lumped_[i + 1] += sphere * integrate_power_poly(N - 1, a, b, p_b);
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const double r = a + h * g.x[q];
            gw_.push_back(sphere * h * g.w[q] * std::pow(r, N - 1));
        }
    }
    gt_ = g.x;
}

double P1Discretization::dirichlet(std::span<const double> V) const {
    double s = 0;
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        const double d = V[i + 1] - V[i];
        s -= ku_[i] * d * d;
    }
    return s;
}

double P1Discretization::weighted(std::span<const double> V) const {
    double s = 0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        s += md_[i] * V[i] * V[i];
        if (i + 1 < V.size()) s += 2 * mu_[i] * V[i] * V[i + 1];
    }
    return s;
}

double P1Discretization::lmu(std::span<const double> V) const {
    const double mu = params_.c.mu;
    const std::size_t nq = gt_.size();
    double s = 0;
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        if (V[i] == 0 && V[i + 1] == 0) continue;
        for (std::size_t q = 0; q < nq; ++q) {
            const double v = V[i] * (1 - gt_[q]) + V[i + 1] * gt_[q];
            s += gw_[i * nq + q] * std::pow(std::abs(v), mu);
        }
    }
    return s;
}

double P1Discretization::J(std::span<const double> V) const {
    const double m = params_.m;
    return 0.5 * dirichlet(V) + m / (m * m - 1) * lmu(V);
}

double P1Discretization::delta_J(std::span<const double> V, std::span<const double> dV) const {
    const double m = params_.m, mu = params_.c.mu;
    double dD = 0;
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        const double a = V[i + 1] - V[i], e = dV[i + 1] - dV[i];
        dD -= ku_[i] * e * (2 * a + e);
    }
    const std::size_t nq = gt_.size();
    double dL = 0;
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        if (dV[i] == 0 && dV[i + 1] == 0) continue;
        for (std::size_t q = 0; q < nq; ++q) {
            const double t = gt_[q];
            const double v = std::abs(V[i] * (1 - t) + V[i + 1] * t);
            const double e = dV[i] * (1 - t) + dV[i + 1] * t;
            double f;
            if (v > 0 && std::abs(e) < 0.5 * v)
                f = std::pow(v, mu) * std::expm1(mu * std::log1p(e / v));
            else
                f = std::pow(std::abs(v + e), mu) - std::pow(v, mu);
            dL += gw_[i * nq + q] * f;
        }
    }
    return 0.5 * dD + m / (m * m - 1) * dL;
}

std::vector<double> P1Discretization::gradient(std::span<const double> V) const {
    std::vector<double> g = tri_apply(kd_, ku_, V);
    const double inv_m = 1 / params_.m, k = 1 / (params_.m - 1);
    const std::size_t nq = gt_.size();
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        if (V[i] == 0 && V[i + 1] == 0) continue;
        double ga = 0, gb = 0;
        for (std::size_t q = 0; q < nq; ++q) {
            const double t = gt_[q];
            const double v = V[i] * (1 - t) + V[i + 1] * t;
            const double f = gw_[i * nq + q] * std::pow(std::max(v, 0.0), inv_m);
            ga += f * (1 - t);
            gb += f * t;
        }
        g[i] += k * ga;
        g[i + 1] += k * gb;
    }
    return g;
}

std::vector<double> P1Discretization::weighted_mass_times(std::span<const double> V) const {
    return tri_apply(md_, mu_, V);
}

void P1Discretization::absorption_hessian(std::span<const double> V, double floor, std::vector<double>& diag,
                                          std::vector<double>& upper) const {
    const std::size_t n = V.size();
    diag.assign(n, 0.0);
    upper.assign(n - 1, 0.0);
    const double e = 1 / params_.m - 1, k = 1 / (params_.m * (params_.m - 1));
    const std::size_t nq = gt_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double haa = 0, hab = 0, hbb = 0;
        for (std::size_t q = 0; q < nq; ++q) {
            const double t = gt_[q];
            const double v = std::max(V[i] * (1 - t) + V[i + 1] * t, floor);
            const double f = gw_[i * nq + q] * std::pow(v, e);
            haa += f * (1 - t) * (1 - t);
            hab += f * t * (1 - t);
            hbb += f * t * t;
        }
        diag[i] += k * haa;
        diag[i + 1] += k * hbb;
        upper[i] += k * hab;
    }
}

RadialProfile P1Discretization::profile(std::vector<double> V) const {
    RadialProfile p = make_profile(grid_, std::move(V));
    p.support_radius = detect_support(p);
    return p;
}

RadialProfile project_constraint(const RadialProfile& p, const ProblemParams& params) {
    const double w = weighted_norm_sq(p, params.N, params.sigma);
    if (!(w > 0)) fail(ErrorCode::DegenerateProfile, "weighted norm vanishes; cannot normalise");
    RadialProfile q = scale_values(p, 1 / std::sqrt(w));
    return q;
}

std::vector<double> gradient_J(const RadialProfile& p, const ProblemParams& params) {
    return P1Discretization(params, p.grid).gradient(p.values);
}

RadialProfile initial_profile(const ProblemParams& params, const RadialGrid& grid, double support) {
    if (!(support > 0)) fail(ErrorCode::InvalidParameter, "initial support must be positive");
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = 1 - std::pow(grid.nodes[i] / support, 2);
        v[i] = x > 0 ? std::pow(x, params.c.omega) : 0.0;
    }
    v.back() = 0;
    P1Discretization d(params, grid);
    const double w = d.weighted(v);
    if (!(w > 0)) fail(ErrorCode::DegenerateProfile, "initial profile vanishes on the grid");
    for (double& x : v) x /= std::sqrt(w);
    return d.profile(std::move(v));
}

double estimate_minimizer_support(const ProblemParams& params) {
    ShootingControls c;
    c.quad_refine = false;
    c.bracket_rel_width = 1e-9;
    c.uniform_cells = 400;
    const ShootingResult s = solve_shooting(params, c);
    const double W = weighted_norm_sq(s.profile, params.N, params.sigma);
    const double sp = params.c.lambda_space_exp;
    const double lam = std::pow(W, 1 / (2 * params.c.lambda_amp_exp + (params.N + params.sigma) * sp));
    return s.R * std::pow(lam, -sp);
}

MinimizerState minimize(const ProblemParams& params, const RadialProfile& initial, const MinimizerControls& c) {
    if (!params.admissible()) fail(ErrorCode::WrongRegime, "minimisation needs admissible parameters");
    const P1Discretization disc(params, initial.grid);
    const std::size_t n = disc.size(), nf = n - 1;
    const auto& lw = disc.lumped_mass();

    auto normalise = [&](std::vector<double>& V) {
        V.back() = 0;
        for (double& x : V) x = std::max(x, 0.0);
        isotonic_nonincreasing_inplace(V, lw);
        const double w = disc.weighted(V);
        if (!(w > 0) || !std::isfinite(w)) fail(ErrorCode::DegenerateProfile, "iterate collapsed to zero");
        const double s = 1 / std::sqrt(w);
        for (double& x : V) x *= s;
    };

    std::vector<double> V = initial.values;
    normalise(V);
    double Jv = disc.J(V);

    std::vector<double> p0d = disc.stiffness_diag(), p0u = disc.stiffness_upper();
    for (std::size_t i = 0; i < n; ++i) p0d[i] += disc.mass_diag()[i];
    for (std::size_t i = 0; i + 1 < n; ++i) p0u[i] += disc.mass_upper()[i];

    auto kkt_of = [&](const std::vector<double>& X, const std::vector<double>& g, const std::vector<double>& cm,
                      double* lam_out) {
        std::vector<double> gf(n, 0.0), cf(n, 0.0);
        for (std::size_t j = 0; j < nf; ++j)
            if (X[j] > 0) {
                gf[j] = g[j];
                cf[j] = cm[j];
            }
        std::vector<double> z = g, zf = gf, zc = cf;
        tridiag_solve(p0d, p0u, z, nf);
        tridiag_solve(p0d, p0u, zf, nf);
        tridiag_solve(p0d, p0u, zc, nf);
        const double lam0 = dot(cf, zf, nf) / dot(cf, zc, nf);
        std::vector<double> r(n, 0.0);
        for (std::size_t j = 0; j < nf; ++j) {
            r[j] = g[j] - lam0 * cm[j];
            if (X[j] == 0) r[j] = std::min(r[j], 0.0);
        }
        std::vector<double> zr = r;
        tridiag_solve(p0d, p0u, zr, nf);
        if (lam_out) *lam_out = lam0;
        return std::sqrt(std::max(dot(r, zr, nf), 0.0) / dot(g, z, nf));
    };

    MinimizerState st;
    st.J_history.push_back(Jv);
    const double switch_level = std::max(c.tol, c.newton_switch);
    double tau = 1;
    std::vector<double> hd, hu, pd(n), pu(n - 1), trial(n), step(n);
    for (long it = 0;; ++it) {
        const std::vector<double> g = disc.gradient(V);
        const std::vector<double> cm = disc.weighted_mass_times(V);
        st.kkt_residual = kkt_of(V, g, cm, nullptr);
        st.iteration = it;
        if (st.kkt_residual <= switch_level || it >= c.max_iter) break;

        const double vmax = *std::max_element(V.begin(), V.end());
        disc.absorption_hessian(V, c.hessian_floor * vmax, hd, hu);
        for (std::size_t i = 0; i < n; ++i) pd[i] = disc.stiffness_diag()[i] + hd[i];
        for (std::size_t i = 0; i + 1 < n; ++i) pu[i] = disc.stiffness_upper()[i] + hu[i];
        std::vector<double> yg = g, yc = cm;
        tridiag_solve(pd, pu, yg, nf);
        tridiag_solve(pd, pu, yc, nf);
        const double lam = dot(cm, yg, nf) / dot(cm, yc, nf);
        std::vector<double> d(n, 0.0), rt(n, 0.0);
        for (std::size_t j = 0; j < nf; ++j) {
            d[j] = -(yg[j] - lam * yc[j]);
            rt[j] = g[j] - lam * cm[j];
        }

        tau = std::min(1.0, 2 * tau);
        bool accepted = false;
        while (tau > 1e-16) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = V[j] + tau * d[j];
            normalise(trial);
            double pred = 0;
            for (std::size_t j = 0; j < n; ++j) {
                step[j] = trial[j] - V[j];
                if (j < nf) pred += rt[j] * step[j];
            }
            const double dJ = disc.delta_J(V, step);
            if (dJ <= c.sufficient_decrease * std::min(pred, 0.0)) {
                accepted = dJ <= 0;
                if (accepted) {
                    V.swap(trial);
                    Jv = disc.J(V);
                }
                break;
            }
            tau *= c.armijo_factor;
        }
        st.step_size = tau;
        if (!accepted) break;
        st.J_history.push_back(Jv);
    }

    if (st.kkt_residual > c.tol && c.newton_max_iter > 0) {
        std::vector<double> best = V;
        double best_kkt = st.kkt_residual;
        std::size_t k = 0;
        while (k < nf && V[k] > 0) ++k;
        double lam = 0;
        {
            const std::vector<double> g = disc.gradient(V);
            const std::vector<double> cm = disc.weighted_mass_times(V);
            kkt_of(V, g, cm, &lam);
        }
        int worse = 0;
        for (int it = 0; it < c.newton_max_iter && k > 0; ++it) {
            const std::vector<double> g = disc.gradient(V);
            const std::vector<double> cm = disc.weighted_mass_times(V);
            if (k < nf && g[k] - lam * cm[k] < 0) {
                ++k;
                continue;
            }
            const double vmax = *std::max_element(V.begin(), V.end());
            disc.absorption_hessian(V, c.hessian_floor * vmax, hd, hu);
            for (std::size_t i = 0; i < n; ++i)
                pd[i] = disc.stiffness_diag()[i] + hd[i] - lam * disc.mass_diag()[i];
            for (std::size_t i = 0; i + 1 < n; ++i)
                pu[i] = disc.stiffness_upper()[i] + hu[i] - lam * disc.mass_upper()[i];
            std::vector<double> F(n, 0.0);
            for (std::size_t j = 0; j < k; ++j) F[j] = g[j] - lam * cm[j];
            std::vector<double> y = F, zc(n, 0.0);
            for (std::size_t j = 0; j < k; ++j) zc[j] = cm[j];
            tridiag_solve(pd, pu, y, k);
            tridiag_solve(pd, pu, zc, k);
            const double W = disc.weighted(V);
            const double dlam = (dot(cm, y, k) - (W - 1) / 2) / dot(cm, zc, k);
            std::vector<double> dV(n, 0.0);
            for (std::size_t j = 0; j < k; ++j) dV[j] = -y[j] + dlam * zc[j];

            std::size_t first_neg = k;
            for (std::size_t j = 0; j < k; ++j)
                if (V[j] + dV[j] <= 0) {
                    first_neg = j;
                    break;
                }
            if (first_neg < k && first_neg > 0) {
                for (std::size_t j = first_neg; j < nf; ++j) V[j] = 0;
                k = first_neg;
                continue;
            }
            double alpha = 1;
            if (first_neg == 0) alpha = -0.5 * V[0] / dV[0];
            for (std::size_t j = 0; j < k; ++j) V[j] += alpha * dV[j];
            lam += alpha * dlam;

            const std::vector<double> g2 = disc.gradient(V);
            const std::vector<double> cm2 = disc.weighted_mass_times(V);
            const double kk = kkt_of(V, g2, cm2, nullptr);
            ++st.newton_iterations;
            if (kk < best_kkt) {
                best = V;
                best_kkt = kk;
                worse = 0;
            } else if (++worse >= 5) {
                break;
            }
            if (best_kkt <= c.tol) break;
        }
        V = std::move(best);
        bool monotone = true;
        for (std::size_t j = 0; j + 1 < n; ++j)
            if (V[j + 1] > V[j]) monotone = false;
        if (!monotone || V.back() != 0) normalise(V);
        const std::vector<double> g = disc.gradient(V);
        const std::vector<double> cm = disc.weighted_mass_times(V);
        st.kkt_residual = kkt_of(V, g, cm, nullptr);
        Jv = disc.J(V);
    }
    st.J_value = Jv;
    st.profile = disc.profile(std::move(V));
    return st;
}

ScalingReport scaling_report(const MinimizerState& state, const ProblemParams& params) {
    const P1Discretization disc(params, state.profile.grid);
    const auto& V = state.profile.values;
    const std::size_t n = disc.size(), nf = n - 1;
    const double m = params.m;
    const double D = disc.dirichlet(V), L = disc.lmu(V), W = disc.weighted(V);
    const double Jm = 0.5 * D + m / (m * m - 1) * L;
    ScalingReport s;
    s.J_min = Jm;
    s.lambda = (D + L / (m - 1)) / W;

    const std::vector<double> g = disc.gradient(V);
    const std::vector<double> cm = disc.weighted_mass_times(V);
    std::vector<double> p0d = disc.stiffness_diag(), p0u = disc.stiffness_upper();
    for (std::size_t i = 0; i < n; ++i) p0d[i] += disc.mass_diag()[i];
    for (std::size_t i = 0; i + 1 < n; ++i) p0u[i] += disc.mass_upper()[i];
    std::vector<double> gf(n, 0.0), cf(n, 0.0);
    for (std::size_t j = 0; j < nf; ++j)
        if (V[j] > 0) {
            gf[j] = g[j];
            cf[j] = cm[j];
        }
    std::vector<double> z = g, zf = gf, zc = cf;
    tridiag_solve(p0d, p0u, z, nf);
    tridiag_solve(p0d, p0u, zf, nf);
    tridiag_solve(p0d, p0u, zc, nf);
    s.lambda_rayleigh = dot(cf, zf, nf) / dot(cf, zc, nf);
    std::vector<double> r(n, 0.0);
    for (std::size_t j = 0; j < nf; ++j) {
        r[j] = g[j] - s.lambda * cm[j];
        if (V[j] == 0) r[j] = std::min(r[j], 0.0);
    }
    std::vector<double> zr = r;
    tridiag_solve(p0d, p0u, zr, nf);
    s.euler_lagrange_residual = std::sqrt(std::max(dot(r, zr, nf), 0.0) / dot(g, z, nf));

    const double a = params.c.a_exp, b = params.c.b_exp;
    const double ns = params.N + params.sigma;
    s.A_w = 0.5 * std::pow(W, 2 / ns) * D / Jm;
    s.B_w = m / (m * m - 1) * L / Jm;
    s.lambda_opt = std::pow(b * s.B_w / (a * s.A_w), 1 / (a + b));
    s.J_star = std::pow(Jm / (a + b), a + b) * std::pow(a * (m * m - 1) / m, a) * std::pow(2 * b, b);
    s.K_star = std::pow(s.J_star, params.c.kappa_exp);
    s.S_of_minimizer = quotient_from(D, L, W, params);
    s.S_rel_error = std::abs(s.S_of_minimizer - s.K_star) / s.K_star;
    return s;
}

RadialProfile rescale_to_solution(const RadialProfile& w, double lambda, const ProblemParams& params) {
    if (!(lambda > 0)) fail(ErrorCode::InvalidParameter, "multiplier must be positive");
    if (lambda == 1.0) return w;
    const RadialProfile d = dilate(w, std::pow(lambda, -params.c.lambda_space_exp));
    return scale_values(d, std::pow(lambda, params.c.lambda_amp_exp));
}

double ckn_constant(const MinimizerState& state, const ScalingReport& report, const ProblemParams& params,
                    double tol) {
    const double S = quotient_S(state.profile, params);
    const double e = std::abs(S - report.K_star) / report.K_star;
    if (!(e <= tol))
        fail(ErrorCode::ConsistencyFailure,
             "S(v_*) differs from K_* by " + std::to_string(e) + " relative (tolerance " + std::to_string(tol) + ")");
    return report.K_star;
}

RadialProfile scaling_family_member(const RadialProfile& w, double lambda, const ProblemParams& params) {
    const double W = weighted_norm_sq(w, params.N, params.sigma);
    if (!(W > 0)) fail(ErrorCode::DegenerateProfile, "weighted norm vanishes");
    const double ns = params.N + params.sigma;
    const double k = std::pow(lambda, 2 / ns) * std::pow(W, 1 / ns);
    return scale_values(dilate(w, k), lambda);
}

double ScalingMap::operator()(double lambda) const { return A * std::pow(lambda, a) + B * std::pow(lambda, -b); }

double ScalingMap::lambda_opt() const { return std::pow(b * B / (a * A), 1 / (a + b)); }

ScalingMap scaling_map(const RadialProfile& w, const ProblemParams& params, double J_min) {
    const double m = params.m, ns = params.N + params.sigma;
    ScalingMap s;
    s.a = params.c.a_exp;
    s.b = params.c.b_exp;
    s.A = 0.5 * std::pow(weighted_norm_sq(w, params.N, params.sigma), 2 / ns) * dirichlet_energy(w, params.N) / J_min;
    s.B = m / (m * m - 1) * lmu_norm(w, params) / J_min;
    return s;
}

ScalingFamilyCheck scaling_family_check(const RadialProfile& w, const ProblemParams& params, double J_min,
                                        std::span<const double> lambdas) {
    static const double defaults[] = {0.25, 0.5, 2.0, 4.0};
    if (lambdas.empty()) lambdas = defaults;
    ScalingFamilyCheck out;
    out.J_min = J_min;
    out.all_above = true;
    for (double l : lambdas) {
        const double Jl = functional_J(scaling_family_member(w, l, params), params);
        out.samples.emplace_back(l, Jl);
        if (Jl < J_min * (1 - 1e-12)) out.all_above = false;
    }
    const double ns = params.N + params.sigma;
    const double pre = std::pow(weighted_norm_sq(w, params.N, params.sigma), params.N / ns) / J_min;
    auto sampled = [&](double loglam) {
        return pre * functional_J(scaling_family_member(w, std::exp(loglam), params), params);
    };
    double best = 0, fbest = std::numeric_limits<double>::infinity();
    for (int i = -120; i <= 120; ++i) {
        const double x = i * 0.05;
        const double f = sampled(x);
        if (f < fbest) {
            fbest = f;
            best = x;
        }
    }
    double lo = best - 0.05, hi = best + 0.05;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sampled(x1), f2 = sampled(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = sampled(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = sampled(x2);
        }
    }
    out.lambda_opt_numeric = std::exp(0.5 * (lo + hi));
    out.lambda_opt_formula = scaling_map(w, params, J_min).lambda_opt();
    out.lambda_opt_rel_error = std::abs(out.lambda_opt_numeric - out.lambda_opt_formula) / out.lambda_opt_formula;
    return out;
}

MinimizeResult run_variational(const ProblemParams& params, const MinimizerControls& c) {
    MinimizeResult res;
    res.initial_support = c.initial_support > 0 ? c.initial_support : estimate_minimizer_support(params);
    const double r_max = c.r_max > 0 ? c.r_max : (1 + c.tail_margin) * res.initial_support;
    const RadialGrid grid = RadialGrid::graded(r_max, c.grid_size, c.grading_ratio, c.min_cell_rel);
    res.state = minimize(params, initial_profile(params, grid, res.initial_support), c);
    if (!(res.state.kkt_residual <= c.tol))
        fail(ErrorCode::NonConvergence, "minimiser stopped at KKT residual " + std::to_string(res.state.kkt_residual) +
                                            " after " + std::to_string(res.state.iteration) + " iterations");
    if (!res.state.profile.support_radius || *res.state.profile.support_radius >= r_max)
        res.warnings.push_back("minimiser support reaches r_max; enlarge the domain");
    res.report = scaling_report(res.state, params);
    try {
        ckn_constant(res.state, res.report, params, c.ckn_tol);
    } catch (const Error& e) {
        res.warnings.push_back(e.what());
    }
    res.solution = rescale_to_solution(res.state.profile, res.report.lambda, params);
    res.solution_V0 = res.solution.values.front();
    res.solution_R = res.solution.support_radius.value_or(res.solution.grid.r_max());
    return res;
}

RadialProfile random_monotone_profile(std::mt19937_64& rng, int cells) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r_max = 0.5 + 4.5 * u(rng);
    const double support = r_max * (0.3 + 0.7 * u(rng));
    const double amp = std::exp(6 * u(rng) - 3);
    RadialGrid g = RadialGrid::uniform(r_max, cells);
    std::vector<double> V(g.size(), 0.0);
    const int kind = static_cast<int>(3 * u(rng));
    if (kind == 0) {
        const double q = 0.5 + 4 * u(rng), p = 1 + 3 * u(rng);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.nodes[i] / support;
            V[i] = x < 1 ? amp * std::pow(1 - std::pow(x, p), q) : 0;
        }
    } else if (kind == 1) {
        const double w = 0.1 + u(rng);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.nodes[i] / support;
            V[i] = x < 1 ? amp * (std::exp(-x * x / (w * w)) - std::exp(-1 / (w * w))) : 0;
        }
    } else {
        double acc = 0;
        for (std::size_t i = g.size(); i-- > 0;) {
            if (g.nodes[i] < support) acc += std::pow(u(rng), 1 + 3 * u(rng));
            V[i] = acc;
        }
        const double top = V[0];
        for (double& v : V) v *= amp / top;
    }
    V.back() = 0;
    for (std::size_t i = 1; i < V.size(); ++i) V[i] = std::min(std::max(V[i], 0.0), V[i - 1]);
    return make_profile(std::move(g), std::move(V));
}

RandomSuiteResult random_profile_suite(const ProblemParams& params, double reference, std::size_t count,
                                       std::uint64_t seed, double slack) {
    std::mt19937_64 rng(seed);
    RandomSuiteResult out;
    out.seed = seed;
    out.reference = reference;
    out.min_S = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
        const RadialProfile p = random_monotone_profile(rng);
        const double S = quotient_S(p, params);
        ++out.count;
        out.min_S = std::min(out.min_S, S);
        if (S < reference - slack) ++out.below;
    }
    out.min_margin = out.min_S - reference;
    return out;
}

}  // namespace hh
