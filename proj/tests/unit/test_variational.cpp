#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "expect_error.hpp"
#include "hh/certificates.hpp"
#include "hh/variational.hpp"
#include "oracles.hpp"

namespace {

struct Minimized {
    hh::ProblemParams P;
    hh::MinimizeResult r;
};

const Minimized& reference_minimizer() {
    static const Minimized m = [] {
        const hh::ProblemParams P = hh::validate({3, 2.0, -1.0});
        hh::MinimizerControls c;
        c.grid_size = 800;
        return Minimized{P, hh::run_variational(P, c)};
    }();
    return m;
}

double weighted(const hh::RadialProfile& p, const hh::ProblemParams& P) {
    return hh::weighted_norm_sq(p, P.N, P.sigma);
}

TEST(ProjectConstraint, NormalisesAndIsProjective) {
    std::mt19937_64 rng(1);
    const hh::ProblemParams P = hh::validate({3, 1.5, -0.5});
    const hh::RadialProfile p = hh::random_monotone_profile(rng);
    const hh::RadialProfile q = hh::project_constraint(p, P);
    EXPECT_NEAR(weighted(q, P), 1.0, 1e-12);
    EXPECT_TRUE(q.monotone);
    const hh::RadialProfile q2 = hh::project_constraint(hh::scale_values(p, 37.0), P);
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(q2.values[i], q.values[i], 1e-14 * q.values[0]);
    const hh::RadialProfile q3 = hh::project_constraint(q, P);
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(q3.values[i], q.values[i], 1e-14 * q.values[0]);
    const hh::RadialProfile z = hh::make_profile(p.grid, std::vector<double>(p.size(), 0.0));
    EXPECT_EQ(code_of([&] { hh::project_constraint(z, P); }), hh::ErrorCode::DegenerateProfile);
}

TEST(Gradient, CentralDifferences) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (double m : {1.5, 2.0, 3.0})
        for (double sigma : {-1.5, -1.0, -0.5}) {
            const hh::ProblemParams P = hh::validate({3, m, sigma});
            for (int k = 0; k < 4; ++k) {
                const hh::RadialProfile p = hh::random_monotone_profile(rng, 150);
                const std::vector<double> g = hh::gradient_J(p, P);
                const double h = 1e-6 * p.values.front();
                std::vector<double> d(p.size(), 0.0);
                for (std::size_t i = 0; i + 1 < d.size(); ++i)
                    if (p.values[i] > 1e-3 * p.values.front()) d[i] = u(rng);
                auto J = [&](double s) {
                    std::vector<double> v(p.values);
                    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * d[i];
                    return hh::functional_J(hh::make_profile(p.grid, v), P);
                };
                double analytic = 0;
                for (std::size_t i = 0; i < d.size(); ++i) analytic += g[i] * d[i];
                const double fd = (J(h) - J(-h)) / (2 * h);
                EXPECT_NEAR(fd, analytic, 1e-6 * std::abs(analytic)) << "m=" << m << " sigma=" << sigma;
            }
        }
}

TEST(Gradient, ZeroProfile) {
    const hh::ProblemParams P = hh::validate({3, 2.0, -1.0});
    const hh::RadialProfile z = hh::make_profile(hh::RadialGrid::uniform(1, 20), std::vector<double>(21, 0.0));
    for (double g : hh::gradient_J(z, P)) EXPECT_EQ(g, 0.0);
}

TEST(Gradient, HomogeneityOfEachTerm) {
    std::mt19937_64 rng(4);
    const double m = 2.0;
    const hh::ProblemParams P = hh::validate({3, m, -1.0});
    const hh::RadialProfile p = hh::random_monotone_profile(rng);
    const std::vector<double> g1 = hh::gradient_J(p, P);
    const std::vector<double> g4 = hh::gradient_J(hh::scale_values(p, 4.0), P);
    const std::vector<double> g9 = hh::gradient_J(hh::scale_values(p, 9.0), P);
    const double q4 = std::pow(4.0, 1 / m), q9 = std::pow(9.0, 1 / m);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        const double A = (g4[i] - 4 * g1[i]) / (q4 - 4);
        const double S = g1[i] - A;
        EXPECT_NEAR(g9[i], 9 * S + q9 * A, 1e-10 * (std::abs(9 * S) + std::abs(q9 * A) + 1e-300));
    }
}

TEST(Minimizer, DescentAndConstraint) {
    const Minimized& M = reference_minimizer();
    const auto& h = M.r.state.J_history;
    ASSERT_GT(h.size(), 1u);
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
    EXPECT_NEAR(weighted(M.r.state.profile, M.P), 1.0, 1e-12);
    EXPECT_LE(M.r.state.kkt_residual, 1e-8);
    EXPECT_TRUE(M.r.state.profile.monotone);
    EXPECT_LE(M.r.report.euler_lagrange_residual, 1e-6);
}

TEST(Minimizer, MultiplierTwoWays) {
    const Minimized& M = reference_minimizer();
    const hh::RadialProfile& w = M.r.state.profile;
    const double D = hh::dirichlet_energy(w, 3), L = hh::lmu_norm(w, M.P);
    EXPECT_NEAR(M.r.report.lambda, D + L / (M.P.m - 1), 1e-10 * M.r.report.lambda);
    EXPECT_NEAR(M.r.report.lambda_rayleigh, M.r.report.lambda, 1e-6 * M.r.report.lambda);
}

TEST(Minimizer, ScalingBookkeeping) {
    const Minimized& M = reference_minimizer();
    const hh::RadialProfile& w = M.r.state.profile;
    const double m = M.P.m, N = 3, sigma = -1;
    const double D = hh::dirichlet_energy(w, 3), L = hh::lmu_norm(w, M.P);
    const double J = hh::functional_J(w, M.P);
    EXPECT_NEAR(D / (2 * J) + m * L / ((m * m - 1) * J), 1.0, 1e-12);
    EXPECT_NEAR(M.r.report.A_w + M.r.report.B_w, 1.0, 1e-8);
    const double a = oracle::a_exp(3, sigma), b = oracle::b_exp(3, m, sigma);
    const double Jstar = std::pow(J / (a + b), a + b) * std::pow(a * (m * m - 1) / m, a) * std::pow(2 * b, b);
    const double Kstar = std::pow(Jstar, m * (N + sigma) / (N * (m - 1) + 2 * (m + 1)));
    EXPECT_NEAR(M.r.report.J_star, Jstar, 1e-10 * Jstar);
    EXPECT_NEAR(M.r.report.K_star, Kstar, 1e-10 * Kstar);
    EXPECT_NEAR(M.r.report.lambda_opt,
                std::pow(b * M.r.report.B_w / (a * M.r.report.A_w), 1 / (a + b)), 1e-12);
    EXPECT_LE(M.r.report.S_rel_error, 1e-4);
    EXPECT_NEAR(hh::ckn_constant(M.r.state, M.r.report, M.P), Kstar, 1e-10 * Kstar);
    EXPECT_EQ(code_of([&] { hh::ckn_constant(M.r.state, M.r.report, M.P, 0.0); }),
              hh::ErrorCode::ConsistencyFailure);
}

TEST(Minimizer, ScalingFamily) {
    const Minimized& M = reference_minimizer();
    const hh::ScalingFamilyCheck c = hh::scaling_family_check(M.r.state.profile, M.P, M.r.report.J_min);
    EXPECT_TRUE(c.all_above);
    EXPECT_EQ(c.samples.size(), 4u);
    EXPECT_LE(c.lambda_opt_rel_error, 1e-4);
    const hh::ScalingMap s = hh::scaling_map(M.r.state.profile, M.P, M.r.report.J_min);
    EXPECT_NEAR(s(1.0), 1.0, 1e-8);
    const double lo = s.lambda_opt();
    EXPECT_LE(s(lo), s(lo * 1.01));
    EXPECT_LE(s(lo), s(lo / 1.01));
}

TEST(Minimizer, RescaledSolution) {
    const Minimized& M = reference_minimizer();
    const hh::RadialProfile same = hh::rescale_to_solution(M.r.state.profile, 1.0, M.P);
    EXPECT_EQ(same.values, M.r.state.profile.values);
    const hh::PohozaevResiduals p = hh::pohozaev_residuals(M.r.solution, M.P);
    EXPECT_LE(p.rho2, 1e-6);
    const double l = M.r.report.lambda;
    EXPECT_NEAR(M.r.solution_V0, std::pow(l, 4.0) * M.r.state.profile.values.front(), 1e-12 * M.r.solution_V0);
}

TEST(RandomProfiles, MonotoneAndReproducible) {
    std::mt19937_64 a(42), b(42);
    for (int k = 0; k < 50; ++k) {
        const hh::RadialProfile p = hh::random_monotone_profile(a);
        const hh::RadialProfile q = hh::random_monotone_profile(b);
        EXPECT_EQ(p.values, q.values);
        EXPECT_TRUE(p.monotone);
        EXPECT_EQ(p.values.back(), 0.0);
        EXPECT_GT(p.values.front(), 0.0);
    }
    const hh::ProblemParams P = hh::validate({3, 2.0, -1.0});
    const hh::RandomSuiteResult r1 = hh::random_profile_suite(P, 1.0, 50, 7);
    const hh::RandomSuiteResult r2 = hh::random_profile_suite(P, 1.0, 50, 7);
    EXPECT_EQ(r1.min_S, r2.min_S);
    EXPECT_EQ(r1.count, 50u);
}

TEST(RandomProfiles, NoneBelowMinimum) {
    const Minimized& M = reference_minimizer();
    const hh::RandomSuiteResult r = hh::random_profile_suite(M.P, M.r.report.S_of_minimizer, 300, 99);
    EXPECT_EQ(r.below, 0u);
    EXPECT_GT(r.min_margin, 0);
}

}  // namespace
