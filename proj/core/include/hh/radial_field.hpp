#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hh/params.hpp"

namespace hh {

enum class Grading { Uniform, GeometricNearOrigin, Custom };

struct RadialGrid {
    std::vector<double> nodes;
    Grading grading = Grading::Custom;

    std::size_t size() const { return nodes.size(); }
    double r_max() const { return nodes.back(); }

    // Throws InvalidParameter unless strictly increasing, r_0 >= 0, at least two nodes.
    static RadialGrid from_nodes(std::vector<double> nodes, Grading grading = Grading::Custom);
    static RadialGrid uniform(double r_max, int cells);
    // Geometric cells from min_cell_rel * r_max up to the uniform spacing r_max / cells.
    static RadialGrid graded(double r_max, int cells, double ratio = 1.05, double min_cell_rel = 1e-6);
};

struct RadialProfile {
    RadialGrid grid;
    std::vector<double> values;
    std::optional<std::vector<double>> derivs;
    std::optional<double> support_radius;
    bool monotone = false;

    std::size_t size() const { return values.size(); }
    double r(std::size_t i) const { return grid.nodes[i]; }
    bool has_derivs() const { return derivs.has_value(); }
};

// Validates lengths and V >= 0, sets the monotone flag from the data.
RadialProfile make_profile(RadialGrid grid, std::vector<double> values,
                           std::optional<std::vector<double>> derivs = std::nullopt,
                           std::optional<double> support_radius = std::nullopt);

bool is_nonincreasing(std::span<const double> v);

// Interpolant on cell [r_i, r_{i+1}] as a polynomial in t = (r - r_i)/h.
// Hermite cubic when both endpoint derivatives are finite, linear otherwise.
struct CellPoly {
    double c[4] = {0, 0, 0, 0};
    int degree = 1;
    double a = 0;
    double h = 0;

    double operator()(double r) const;
    double slope(double r) const;
};

CellPoly cell_poly(const RadialProfile& p, std::size_t cell);

// int_a^b r^alpha * sum_k c_k t^k dr, t = (r - a)/(b - a). Exact for cells touching the origin,
// Gauss-Legendre to rounding otherwise.
double integrate_power_poly(double alpha, double a, double b, std::span<const double> c);

// Gauss-Legendre nodes and weights on [0,1]; points is 8 or 16.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_rule(int points = 8);

double weighted_norm_sq(const RadialProfile& p, int N, double tau);
double dirichlet_energy(const RadialProfile& p, int N);
// ||v||_p^p
double lp_power(const RadialProfile& p, int N, double power);
double lp_norm(const RadialProfile& p, int N, double power);
double lmu_norm(const RadialProfile& p, const ProblemParams& params);
double functional_J(const RadialProfile& p, const ProblemParams& params);
double quotient_S(const RadialProfile& p, const ProblemParams& params);
// Same quotient from precomputed integrals.
double quotient_from(double dirichlet, double lmu, double weighted_sigma, const ProblemParams& params);

struct FunctionalReport {
    double dirichlet = 0;
    double lmu = 0;
    std::map<double, double> weighted;
    double J = 0;
    double S = 0;
    std::map<double, double> lp;
};

// S is left at 0 when the weighted norm at sigma vanishes.
FunctionalReport evaluate_functionals(const RadialProfile& p, const ProblemParams& params,
                                      std::span<const double> extra_taus = {},
                                      std::span<const double> powers = {});

RadialProfile resample(const RadialProfile& p, const RadialGrid& g);
// Hermite where derivatives exist, linear otherwise; zero beyond the support radius.
double evaluate(const RadialProfile& p, double r);
std::vector<double> finite_difference_derivs(const RadialProfile& p);
RadialProfile with_fd_derivs(const RadialProfile& p);
// Smallest node beyond which the profile vanishes; nullopt when the last value is positive.
std::optional<double> detect_support(const RadialProfile& p);

RadialProfile scale_values(const RadialProfile& p, double c);
// v(lambda * r): nodes divided by lambda.
RadialProfile dilate(const RadialProfile& p, double lambda);

}  // namespace hh
