#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "expect_error.hpp"
#include "hh/certificates.hpp"
#include "hh/profile_io.hpp"
#include "hh/shooting.hpp"
#include "hh/variational.hpp"
#include "oracles.hpp"

namespace {

const hh::ProblemParams& params() {
    static const hh::ProblemParams P = hh::validate({3, 2.0, -1.0});
    return P;
}

const hh::ShootingResult& solution() {
    static const hh::ShootingResult r = hh::solve_shooting(params());
    return r;
}

hh::RadialProfile zero_profile() {
    return hh::make_profile(hh::RadialGrid::uniform(1, 10), std::vector<double>(11, 0.0));
}

TEST(Pohozaev, ZeroProfile) {
    const hh::PohozaevResiduals r = hh::pohozaev_residuals(zero_profile(), params());
    EXPECT_EQ(r.rho1, 0.0);
    EXPECT_EQ(r.rho2, 0.0);
    EXPECT_EQ(r.rho3, 0.0);
    EXPECT_EQ(r.scale1, 1.0);
}

TEST(Pohozaev, ConvergedSolution) {
    const hh::PohozaevResiduals r = hh::pohozaev_residuals(solution().profile, params());
    EXPECT_LE(r.rho1, 1e-6);
    EXPECT_LE(r.rho2, 1e-6);
    EXPECT_LE(r.rho3, 1e-6);
}

TEST(Pohozaev, EliminationIdentity) {
    std::mt19937_64 rng(8);
    for (double m : {1.5, 2.0, 3.0})
        for (double sigma : {-1.5, -1.0, -0.5}) {
            const hh::ProblemParams P = hh::validate({3, m, sigma});
            const hh::RadialProfile p = hh::random_monotone_profile(rng);
            const double D = hh::dirichlet_energy(p, 3), L = hh::lmu_norm(p, P), W = hh::weighted_norm_sq(p, 3, sigma);
            const hh::PohozaevResiduals r = hh::pohozaev_residuals(p, P);
            const double c1 = -0.5 * D - m * 3 / ((m + 1) * (m - 1)) * L + (3 + sigma) / 2 * W;
            const double c2 = D + L / (m - 1) - W;
            const double c3 = (sigma + 2) / 2 * D + (sigma * (m + 1) - 3 * (m - 1)) / (2 * (m * m - 1)) * L;
            const double s = std::max({std::abs(D), std::abs(L), std::abs(W)});
            EXPECT_NEAR(r.comb1, c1, 1e-12 * s);
            EXPECT_NEAR(r.comb2, c2, 1e-12 * s);
            EXPECT_NEAR(r.comb3, c3, 1e-12 * s);
            EXPECT_NEAR(r.comb3, r.comb1 + (3 + sigma) / 2 * r.comb2, 1e-12 * s);
        }
}

TEST(Ratio, ReferenceValue) {
    const hh::RatioCheck r = hh::ratio_check(solution().profile, params());
    EXPECT_DOUBLE_EQ(r.predicted, 2.0);
    EXPECT_LE(r.rel_error, 1e-5);
    EXPECT_EQ(code_of([] { hh::ratio_check(zero_profile(), params()); }), hh::ErrorCode::DegenerateProfile);
}

TEST(Envelope, Constants) {
    EXPECT_DOUBLE_EQ(hh::envelope_bound(2.0), 1.0 / 96);
    EXPECT_DOUBLE_EQ(hh::envelope_bound_loose(2.0), 1.0 / 24);
}

TEST(Envelope, ParamsSatisfyAdmissibility) {
    const double m = 2.0, r0 = 3.0, M0 = 0.4, bound = hh::envelope_bound(m);
    const hh::EnvelopeParams e = hh::envelope_params(r0, M0, m, bound);
    EXPECT_NEAR(e.a, e.b * r0 * r0 + std::pow(M0, (m - 1) / (2 * m)), 1e-15);
    EXPECT_NEAR(e.b * e.a, bound, 1e-14);
    EXPECT_NEAR(hh::envelope_value(e, m, r0), M0, 1e-14);
    EXPECT_EQ(hh::envelope_value(e, m, std::sqrt(e.a / e.b) * 1.001), 0.0);
}

TEST(Envelope, ConvergedSolution) {
    const hh::EnvelopeCheck c = hh::envelope_check(solution().profile, params());
    EXPECT_LE(c.max_violation, 1e-12 * solution().V0_star);
    ASSERT_TRUE(hh::tail_radius(solution().profile, params()));
    const double r0 = c.env.r0;
    EXPECT_LE(std::pow(r0, -1.0) * std::pow(c.env.M0, 0.5), 0.5 + 1e-15);
}

TEST(Envelope, EnvelopeItselfAndPerturbation) {
    const hh::RadialProfile& p = solution().profile;
    const hh::EnvelopeCheck c = hh::envelope_check(p, params());
    std::vector<double> env = p.values, bumped = p.values;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.r(i) > c.env.r0) {
            env[i] = hh::envelope_value(c.env, 2.0, p.r(i));
            bumped[i] *= 1.5;
        }
    double chord = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (p.r(i) < c.env.r0) continue;
        for (int k = 1; k < 4; ++k) {
            const double r = p.r(i) + (p.r(i + 1) - p.r(i)) * k / 4.0;
            const double lin = env[i] + (env[i + 1] - env[i]) * k / 4.0;
            chord = std::max(chord, lin - hh::envelope_value(c.env, 2.0, r));
        }
    }
    const hh::EnvelopeCheck ce = hh::envelope_check(hh::make_profile(p.grid, env), params());
    EXPECT_NEAR(ce.max_violation, chord, 1e-12 * c.env.M0);
    const hh::EnvelopeCheck cb = hh::envelope_check(hh::make_profile(p.grid, bumped), params());
    EXPECT_GT(cb.max_violation, 0.1 * c.env.M0);
}

TEST(Envelope, NoTailRadius) {
    const hh::RadialProfile p = hh::make_profile(hh::RadialGrid::uniform(1e-3, 10), std::vector<double>(11, 1e6));
    EXPECT_EQ(code_of([&] { hh::envelope_check(p, params()); }), hh::ErrorCode::NoTailRadius);
}

TEST(Bounds, UnitStep) {
    const hh::RadialGrid g = hh::RadialGrid::from_nodes({0.0, 0.25, 0.5, 0.75, 1.0, 1.0001, 2.0});
    const hh::RadialProfile p = hh::make_profile(g, {1, 1, 1, 1, 1, 0, 0});
    const hh::BoundMargins b = hh::decay_and_mass_bounds(p, params());
    EXPECT_GE(b.decay_margin, 0);
    EXPECT_GE(b.mass_margin, 0);
    const double L = hh::lmu_norm(p, params());
    const double omega = 4 * std::numbers::pi / 3;
    EXPECT_NEAR(b.decay_margin, 1 - 1 / std::pow(L / omega, 2.0 / 3), 1e-9);
}

TEST(Bounds, ZeroProfileAndSolution) {
    const hh::BoundMargins z = hh::decay_and_mass_bounds(zero_profile(), params());
    EXPECT_EQ(z.decay_margin, std::numeric_limits<double>::infinity());
    EXPECT_EQ(z.mass_margin, std::numeric_limits<double>::infinity());
    const hh::BoundMargins s = hh::decay_and_mass_bounds(solution().profile, params());
    EXPECT_GE(s.decay_margin, 0);
    EXPECT_GE(s.mass_margin, 0);
}

TEST(Nonexistence, SignConditions) {
    const hh::NonexistenceCertificate a = hh::nonexistence_certificate(hh::validate({3, 2.0, -2.0}, true));
    EXPECT_EQ(a.coef_dirichlet, 0.0);
    EXPECT_LT(a.coef_lmu, 0.0);
    EXPECT_TRUE(a.signs_hold);
    const hh::NonexistenceCertificate b = hh::nonexistence_certificate(hh::validate({3, 2.0, -3.0}, true));
    EXPECT_DOUBLE_EQ(b.coef_dirichlet, -0.5);
    EXPECT_DOUBLE_EQ(b.coef_lmu, -2.0);
    EXPECT_TRUE(b.signs_hold);
    EXPECT_EQ(code_of([] { hh::nonexistence_certificate(params()); }), hh::ErrorCode::WrongRegime);
}

TEST(Nonexistence, WitnessNegative) {
    std::mt19937_64 rng(12);
    const hh::ProblemParams P = hh::validate({3, 2.0, -2.5}, true);
    for (int k = 0; k < 20; ++k) {
        const hh::RadialProfile p = hh::random_monotone_profile(rng);
        const hh::NonexistenceCertificate c = hh::nonexistence_certificate(P, &p);
        ASSERT_TRUE(c.witness);
        EXPECT_LT(*c.witness, 0);
    }
}

TEST(Certify, ConvergedSolutionPasses) {
    const hh::CertificateReport r = hh::certify({solution().header(), solution().profile});
    EXPECT_TRUE(r.passed());
    for (const auto& [name, v] : r.verdicts) EXPECT_NE(v, hh::Verdict::Fail) << name;
    const nlohmann::json j = hh::to_json(r);
    EXPECT_TRUE(j.contains("expansion_checks"));
    EXPECT_TRUE(j.contains("tolerances"));
    EXPECT_EQ(j["tolerances"]["pohozaev"], 1e-6);
    ASSERT_TRUE(r.refinement);
}

TEST(Certify, ZeroProfileFails) {
    hh::ProfileHeader h;
    const hh::CertificateReport r = hh::certify({h, zero_profile()});
    EXPECT_FALSE(r.passed());
    bool degenerate = false;
    for (const auto& e : r.errors) degenerate = degenerate || e.find("DegenerateProfile") != std::string::npos;
    EXPECT_TRUE(degenerate);
}

TEST(Certify, VariationalProfilePasses) {
    const hh::MinimizeResult v = hh::run_variational(params());
    hh::ProfileHeader h;
    h.V0 = v.solution_V0;
    h.R = v.solution_R;
    const hh::CertificateReport r = hh::certify({h, v.solution});
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.tolerances.at("pohozaev"), hh::CertificateTolerances{}.pohozaev_piecewise_linear);
    EXPECT_EQ(r.verdicts.at("ode_residual"), hh::Verdict::NotApplicable);
}

}  // namespace
