#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "expect_error.hpp"
#include "hh/origin_series.hpp"
#include "oracles.hpp"

namespace {

// Integral-form residual of the radial ODE for the truncated series:
// r^{N-1} V'(r) - int_0^r s^{N-1} (V^{1/m}/(m-1) - s^sigma V) ds.
double series_residual(const hh::OriginExpansion& e, double r) {
    const int N = e.N;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double integral = ts.integrate(
        [&](double s) {
            const double V = hh::eval_origin(e, s).V;
            return std::pow(s, N - 1) * std::pow(V, 1 / e.m) / (e.m - 1) - std::pow(s, N - 1 + e.sigma) * V;
        },
        0.0, r);
    return std::pow(r, N - 1) * hh::eval_origin(e, r).Vprime - integral;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TEST(OriginSeries, CaseClassification) {
    EXPECT_EQ(hh::classify_sigma(-0.5), hh::SeriesCase::SigmaInMinus1To0);
    EXPECT_EQ(hh::classify_sigma(-1.0), hh::SeriesCase::SigmaEqMinus1);
    EXPECT_EQ(hh::classify_sigma(-1.5), hh::SeriesCase::SigmaInMinus2ToMinus1);
    const hh::ProblemParams P = hh::validate({3, 2.0, -0.5});
    EXPECT_EQ(code_of([&] { hh::origin_expansion(P, 1.0, hh::SeriesCase::SigmaEqMinus1); }), hh::ErrorCode::OutOfCase);
}

TEST(OriginSeries, LeadingCoefficient) {
    for (double sigma : {-1.5, -1.0, -0.5}) {
        const hh::OriginExpansion e = hh::origin_expansion(hh::validate({3, 2.0, sigma}), 2.0);
        EXPECT_NEAR(e.c1, oracle::origin_coefficient(3, sigma, 2.0), 1e-15);
        EXPECT_DOUBLE_EQ(e.e1, sigma + 2);
        for (double r : {1e-8, 1e-6}) {
            const hh::SeriesValue v = hh::eval_origin(e, r);
            const double lead = std::pow(r, sigma + 2), gap = std::pow(r, e.e2 - e.e1);
            EXPECT_NEAR(v.Vprime / std::pow(r, sigma + 1), -2.0 / (3 + sigma), 10 * gap);
            EXPECT_NEAR(v.V, 2.0 - 2.0 / ((3 + sigma) * (sigma + 2)) * lead, 10 * lead * gap + 1e-15);
        }
    }
}

TEST(OriginSeries, TwoDimensionalSigmaMinusOne) {
    const hh::OriginExpansion e = hh::origin_expansion(hh::validate({2, 2.0, -1.0}), 1.0);
    for (double r : {1e-3, 1e-2}) EXPECT_NEAR(hh::eval_origin(e, r).Vprime, -1 + r, 1e-14);
}

TEST(OriginSeries, ZeroHeight) {
    for (double sigma : {-1.5, -1.0, -0.5}) {
        const hh::OriginExpansion e = hh::origin_expansion(hh::validate({3, 2.0, sigma}), 0.0);
        const hh::SeriesValue v = hh::eval_origin(e, 1e-3);
        EXPECT_EQ(v.V, 0.0);
        EXPECT_EQ(v.Vprime, 0.0);
        const hh::ExpansionPrediction p = hh::second_derivative_limit(hh::validate({3, 2.0, sigma}), 0.0);
        EXPECT_EQ(p.lead_coeff, 0.0);
        EXPECT_EQ(p.next_coeff, 0.0);
        EXPECT_EQ(p.second_derivative_at_zero, 0.0);
    }
}

TEST(OriginSeries, ContinuityAcrossMinusOne) {
    const double V0 = 3.0;
    const double c1 = hh::origin_expansion(hh::validate({3, 2.0, -1.0}), V0).c1;
    for (double d : {1e-6, -1e-6}) {
        const double c = hh::origin_expansion(hh::validate({3, 2.0, -1.0 + d}), V0).c1;
        EXPECT_NEAR(c, c1, 2e-6 * c1);
    }
}

TEST(OriginSeries, ResidualIsHigherOrder) {
    for (int N : {2, 3, 5})
        for (double m : {1.5, 2.0, 3.0})
            for (double sigma : {-1.5, -1.0, -0.5}) {
                if (sigma <= -N) continue;
                const hh::OriginExpansion e = hh::origin_expansion(hh::validate({N, m, sigma}), 1.7);
                std::vector<double> r, res;
                for (double x = 1e-5; x <= 1.01e-3; x *= 1.5) {
                    r.push_back(x);
                    res.push_back(series_residual(e, x));
                }
                const double retained = N + e.e2 - 2;
                EXPECT_GT(loglog_slope(r, res), retained + 0.2) << "N=" << N << " m=" << m << " sigma=" << sigma;
            }
}

TEST(OriginSeries, ValidityRadius) {
    const hh::OriginExpansion e = hh::origin_expansion(hh::validate({3, 2.0, -1.0}), 10.0);
    const double eps = hh::validity_radius(e, 1e-10, 1e-4);
    EXPECT_LE(eps, 1e-4);
    EXPECT_LE(std::abs(e.c2) * std::pow(eps, e.e2), 1e-10 * 10.0 * (1 + 1e-12));
}

TEST(SecondDerivative, ReferenceValues) {
    const hh::ExpansionPrediction a = hh::second_derivative_limit(hh::validate({2, 2.0, -1.0}), 1.0);
    EXPECT_NEAR(a.second_derivative_at_zero, 1.0, 1e-15);
    const hh::ExpansionPrediction b = hh::second_derivative_limit(hh::validate({3, 2.0, -0.5}), 1.0);
    EXPECT_NEAR(b.lead_coeff, -0.2, 1e-15);
    EXPECT_NEAR(b.lead_exp, -0.5, 1e-15);
    EXPECT_NEAR(b.next_coeff, 1.0 / 3, 1e-15);
    const hh::ExpansionPrediction c = hh::second_derivative_limit(hh::validate({3, 2.0, -1.5}), 1.0);
    EXPECT_NEAR(c.lead_coeff, 0.5 / 1.5, 1e-15);
    EXPECT_NEAR(c.next_coeff, 0.0, 1e-15);
    EXPECT_NEAR(c.next_exp, -1.0, 1e-15);
}

TEST(SecondDerivative, MatchesSeriesCurvature) {
    for (double sigma : {-1.5, -0.5}) {
        const hh::ProblemParams P = hh::validate({3, 2.0, sigma});
        const hh::OriginExpansion e = hh::origin_expansion(P, 2.0);
        const hh::ExpansionPrediction p = hh::second_derivative_limit(P, 2.0);
        const double r = 1e-6, h = 1e-10;
        const double d2 = (hh::eval_origin(e, r + h).Vprime - hh::eval_origin(e, r - h).Vprime) / (2 * h);
        const double lead = p.lead_coeff * std::pow(r, p.lead_exp);
        EXPECT_NEAR(d2, lead, 1e-2 * std::abs(lead));
    }
}

TEST(Touchdown, ReferenceValue) {
    const hh::ProblemParams P = hh::validate({3, 2.0, -1.0});
    const hh::TouchdownExpansion t = hh::touchdown_expansion(P, 5.0);
    EXPECT_NEAR(hh::eval_touchdown(t, 4.9).V, 1e-4 / 144, 1e-15);
    EXPECT_NEAR(hh::eval_touchdown(t, 4.9).V, 6.944e-7, 1e-10);
    const hh::SeriesValue at_R = hh::eval_touchdown(t, 5.0);
    EXPECT_EQ(at_R.V, 0.0);
    EXPECT_EQ(at_R.Vprime, 0.0);
}

TEST(Touchdown, DominantBalance) {
    for (double m : {1.5, 2.0, 3.0}) {
        const hh::TouchdownExpansion t = hh::touchdown_expansion(hh::validate({3, m, -1.0}), 1.0);
        for (double x : {1e-2, 1e-3}) {
            const double r = 1 - x, h = x * 1e-4;
            const double d2 = (hh::eval_touchdown(t, r + h).Vprime - hh::eval_touchdown(t, r - h).Vprime) / (2 * h);
            EXPECT_NEAR(d2 * (m - 1) / std::pow(hh::eval_touchdown(t, r).V, 1 / m), 1.0, 1e-6);
        }
    }
}

}  // namespace
