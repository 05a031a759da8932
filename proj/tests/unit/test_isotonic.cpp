#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "hh/isotonic.hpp"
#include "hh/radial_field.hpp"

namespace {

double wdist(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& w) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

TEST(Isotonic, SimpleViolatorPooled) {
    const std::vector<double> y{1, 3, 2}, w{1, 1, 1};
    const std::vector<double> x = hh::isotonic_nonincreasing(y, w);
    EXPECT_DOUBLE_EQ(x[0], 2);
    EXPECT_DOUBLE_EQ(x[1], 2);
    EXPECT_DOUBLE_EQ(x[2], 2);
}

TEST(Isotonic, WeightedMean) {
    const std::vector<double> y{1, 4}, w{3, 1};
    const std::vector<double> x = hh::isotonic_nonincreasing(y, w);
    EXPECT_DOUBLE_EQ(x[0], 1.75);
    EXPECT_DOUBLE_EQ(x[1], 1.75);
}

// Projection onto the closed convex cone of non-increasing vectors: the result is feasible, the residual
// is orthogonal to the result and has non-positive inner product with every feasible vector.
TEST(Isotonic, ProjectionCharacterization) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.1, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        std::vector<double> y(n), w(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = g(rng), w[i] = u(rng);
        const std::vector<double> x = hh::isotonic_nonincreasing(y, w);
        ASSERT_TRUE(hh::is_nonincreasing(x));
        double ortho = 0, scale = 0;
        for (std::size_t i = 0; i < n; ++i) ortho += w[i] * (y[i] - x[i]) * x[i], scale += w[i] * y[i] * y[i];
        EXPECT_NEAR(ortho, 0, 1e-12 * (1 + scale));
        for (int k = 0; k < 20; ++k) {
            std::vector<double> z(n);
            double acc = 2 * g(rng);
            for (std::size_t i = n; i-- > 0;) z[i] = acc += (k % 2 ? 0.1 : 1.0) * std::abs(g(rng));
            double ip = 0;
            for (std::size_t i = 0; i < n; ++i) ip += w[i] * (y[i] - x[i]) * z[i];
            EXPECT_LE(ip, 1e-10 * (1 + scale));
            EXPECT_LE(wdist(x, y, w), wdist(z, y, w) + 1e-12);
        }
    }
}

TEST(Isotonic, Idempotent) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    std::vector<double> y(100), w(100, 1.0);
    for (double& v : y) v = g(rng);
    const std::vector<double> x = hh::isotonic_nonincreasing(y, w);
    EXPECT_EQ(hh::isotonic_nonincreasing(x, w), x);
    std::vector<double> z = y;
    hh::isotonic_nonincreasing_inplace(z, w);
    EXPECT_EQ(z, x);
}

}  // namespace
