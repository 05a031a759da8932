#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "expect_error.hpp"
#include "hh/parabolic.hpp"
#include "hh/shooting.hpp"

namespace {

const hh::ProblemParams& params() {
    static const hh::ProblemParams P = hh::validate({3, 2.0, -1.0});
    return P;
}

const hh::ShootingResult& elliptic() {
    static const hh::ShootingResult r = hh::solve_shooting(params());
    return r;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

TEST(RescaledOperator, ZeroState) {
    const hh::RescaledOperator op(params(), hh::RadialGrid::uniform(5, 40));
    for (double v : op.rhs(std::vector<double>(41, 0.0))) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(op.stable_dt(std::vector<double>(41, 0.0), 0.4), std::numeric_limits<double>::infinity());
}

TEST(RescaledOperator, GridTooShort) {
    EXPECT_EQ(code_of([] { hh::RescaledOperator(params(), hh::RadialGrid::uniform(1, 3)); }),
              hh::ErrorCode::GridTooShort);
}

TEST(RescaledOperator, ConstantStateMatchesCellAverages) {
    for (double sigma : {-1.0, -0.5, -1.5})
        for (bool graded : {false, true}) {
            const hh::ProblemParams P = hh::validate({3, 2.0, sigma});
            const hh::RadialGrid g = graded ? hh::RadialGrid::graded(4, 60, 1.1, 1e-4) : hh::RadialGrid::uniform(4, 60);
            const hh::RescaledOperator op(P, g);
            const double c = 0.7, m = P.m, e = 3 + sigma;
            const std::vector<double> f = op.rhs(std::vector<double>(g.size(), c));
            const auto& r = g.nodes;
            for (std::size_t i = 0; i + 1 < g.size(); ++i) {
                const double lo = i > 0 ? 0.5 * (r[i - 1] + r[i]) : 0.0, hi = 0.5 * (r[i] + r[i + 1]);
                const double vol = (hi * hi * hi - lo * lo * lo) / 3;
                const double ws = (std::pow(hi, e) - std::pow(lo, e)) / e;
                EXPECT_NEAR(op.volumes()[i], vol, 1e-13 * vol);
                const double want = std::pow(c, m) * ws / vol - c / (m - 1);
                EXPECT_NEAR(f[i], want, 1e-9 * std::max(1.0, std::abs(want))) << sigma << " " << i;
            }
            EXPECT_EQ(f.back(), 0.0);
        }
}

TEST(RescaledOperator, MassIsVolumeWeightedSum) {
    const hh::RadialGrid g = hh::RadialGrid::uniform(2, 20);
    const hh::RescaledOperator op(params(), g);
    EXPECT_NEAR(op.mass(std::vector<double>(g.size(), 1.0)), std::pow(1.95, 3) / 3, 1e-13);
}

TEST(Stationarity, ResidualSmallAndSecondOrder) {
    const hh::StationarityOrder o = hh::stationarity_order(elliptic().profile, params());
    EXPECT_LE(o.coarse.sup_rel, 1e-4);
    EXPECT_LE(o.fine.sup_rel, o.coarse.sup_rel);
    EXPECT_GE(std::min(o.order_sup, o.order_l2), 1.7);
}

TEST(Stationarity, GradedGridSecondOrderInMass) {
    const hh::ProblemParams P = hh::validate({3, 2.0, -0.5});
    const hh::ShootingResult s = hh::solve_shooting(P);
    hh::ParabolicControls c;
    c.cells = 500;
    EXPECT_EQ(hh::simulation_grid(s.profile, P, c).grading, hh::Grading::GeometricNearOrigin);
    const hh::StationarityOrder o = hh::stationarity_order(s.profile, P, c);
    EXPECT_LE(o.fine.l1_rel, 1e-5);
    EXPECT_GE(o.order_l1, 1.7);
    EXPECT_GE(o.order_l2, 1.7);
}

TEST(Tracking, GradedGridSeparateVariables) {
    const hh::ProblemParams P = hh::validate({3, 2.0, -1.5});
    const hh::ShootingResult s = hh::solve_shooting(P);
    hh::ParabolicControls c;
    c.cells = 500;
    const hh::TrackingReport r = hh::track_separate_variables(s.profile, P, 1, 0, c);
    EXPECT_LE(r.max_deviation, 1e-3);
    EXPECT_LE(r.clipped_mass_rel, 1e-8);
}

TEST(Grid, BisectAndSimulationRadius) {
    const hh::RadialGrid g = hh::RadialGrid::uniform(3, 6);
    const hh::RadialGrid b = hh::bisect_cells(g);
    ASSERT_EQ(b.size(), 13u);
    EXPECT_DOUBLE_EQ(b.nodes[1], 0.25);
    EXPECT_DOUBLE_EQ(b.nodes.back(), 3.0);
    const hh::RadialGrid s = hh::simulation_grid(elliptic().profile, params());
    EXPECT_NEAR(s.r_max(), 1.25 * elliptic().R, 1e-6 * elliptic().R);
    EXPECT_EQ(s.size(), 2001u);
}

TEST(Step, ZeroStateStaysZero) {
    const hh::ParabolicState z = hh::make_state(hh::RadialGrid::uniform(5, 40), std::vector<double>(41, 0.0));
    const hh::ParabolicState a = hh::step(z, params(), 0.1);
    const hh::ParabolicState b = hh::implicit_step(z, params(), 0.1);
    EXPECT_EQ(sup_diff(a.U, z.U), 0.0);
    EXPECT_EQ(sup_diff(b.U, z.U), 0.0);
    EXPECT_DOUBLE_EQ(b.s, 0.1);
}

TEST(Step, RejectsNegativeState) {
    EXPECT_EQ(code_of([] { hh::make_state(hh::RadialGrid::uniform(1, 4), {1, 0.5, -0.1, 0, 0}); }),
              hh::ErrorCode::InvalidParameter);
}

TEST(Step, StationaryProfileMovesByDtTimesResidual) {
    hh::ParabolicControls c;
    c.cells = 400;
    const hh::ParabolicState st = hh::separate_variables_state(elliptic().profile, params(), c);
    const std::vector<double> f = hh::rescaled_rhs(st, params());
    double fmax = 0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    const hh::ParabolicState next = hh::step(st, params(), 1.0, c);
    EXPECT_LT(next.dt_last, 1.0);
    EXPECT_LE(sup_diff(next.U, st.U), next.dt_last * fmax * (1 + 1e-12));
}

TEST(Step, ExplicitEulerFirstOrderInTime) {
    const hh::RadialGrid g = hh::RadialGrid::uniform(6, 30);
    std::vector<double> U0(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) U0[i] = std::max(0.0, 1 - std::pow(g.nodes[i] / 5, 2)) * 1.5;
    const hh::RescaledOperator op(params(), g);
    const double dt0 = 0.5 * op.stable_dt(U0, 0.4);
    const double T = 16 * dt0;
    auto run = [&](int k) {
        hh::ParabolicState st = hh::make_state(g, U0);
        const double dt = dt0 / (1 << k);
        for (int n = 0; n < (16 << k); ++n) st = hh::step(st, params(), dt);
        EXPECT_NEAR(st.s, T, 1e-12);
        return st.U;
    };
    const auto u0 = run(0), u1 = run(1), u2 = run(2);
    const double order = std::log2(sup_diff(u0, u1) / sup_diff(u1, u2));
    EXPECT_NEAR(order, 1.0, 0.1);
}

TEST(Step, ImplicitMatchesExplicitForSmallSteps) {
    const hh::ParabolicState st = hh::separate_variables_state(elliptic().profile, params(), hh::RadialGrid::uniform(11.5, 100));
    hh::ParabolicState pert = st;
    for (std::size_t i = 0; i < pert.U.size(); ++i) pert.U[i] *= 1.05;
    const double dt = 1e-4;
    const hh::ParabolicState a = hh::step(pert, params(), dt);
    const hh::ParabolicState b = hh::implicit_step(pert, params(), a.dt_last);
    const std::vector<double> f = hh::rescaled_rhs(pert, params());
    double fmax = 0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    EXPECT_LE(sup_diff(a.U, b.U), 0.05 * a.dt_last * fmax);
}

TEST(Step, StabilityViolation) {
    const hh::ParabolicState st = hh::separate_variables_state(elliptic().profile, params(), hh::RadialGrid::uniform(11.5, 400));
    hh::ParabolicControls c;
    c.dt_min = 1.0;
    EXPECT_EQ(code_of([&] { hh::step(st, params(), 0.5, c); }), hh::ErrorCode::StabilityViolation);
}

TEST(Tracking, ZeroHorizon) {
    hh::ParabolicControls c;
    c.cells = 200;
    const hh::TrackingReport r = hh::track_separate_variables(elliptic().profile, params(), 0, 0, c);
    EXPECT_EQ(r.max_deviation, 0.0);
    EXPECT_EQ(r.steps, 0);
    ASSERT_TRUE(r.passed);
    EXPECT_TRUE(*r.passed);
}

TEST(Tracking, InvalidArguments) {
    EXPECT_EQ(code_of([] { hh::track_separate_variables(elliptic().profile, params(), -1, 0); }),
              hh::ErrorCode::InvalidParameter);
    EXPECT_EQ(code_of([] { hh::track_separate_variables(elliptic().profile, params(), 1, 0.2); }),
              hh::ErrorCode::InvalidParameter);
}

TEST(Tracking, SeparateVariablesPersist) {
    hh::ParabolicControls c;
    c.cells = 500;
    const hh::TrackingReport r = hh::track_separate_variables(elliptic().profile, params(), 3, 0, c);
    ASSERT_TRUE(r.passed);
    EXPECT_TRUE(*r.passed);
    EXPECT_LE(r.max_deviation, 1e-2);
    EXPECT_LE(r.clipped_mass_rel, 1e-8);
    EXPECT_LT(std::abs(r.support_growth_cells), 2);
    ASSERT_TRUE(r.original_variables_error);
    EXPECT_LE(*r.original_variables_error, 1e-2);
    EXPECT_NEAR(r.deviation_history.back().first, 3.0, 1e-12);
}

TEST(Tracking, PerturbationHasNoVerdict) {
    hh::ParabolicControls c;
    c.cells = 200;
    const hh::TrackingReport r = hh::track_separate_variables(elliptic().profile, params(), 0.5, 0.05, c);
    EXPECT_FALSE(r.passed);
    EXPECT_NEAR(r.deviation_history.front().second, 0.05, 1e-3);
    EXPECT_GT(r.max_deviation, 0);
}

}  // namespace
