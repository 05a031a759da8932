#pragma once

#include <map>
#include <string>

namespace hh {

enum class Regime { Admissible, NonexistenceProbe };

std::string to_string(Regime regime);

struct RawParams {
    int N = 3;
    double m = 2.0;
    double sigma = -1.0;
};

struct DerivedConstants {
    double theta = 0;
    double mu = 0;
    double omega = 0;
    double a_exp = 0;
    double b_exp = 0;
    double lambda_space_exp = 0;
    double lambda_amp_exp = 0;
    double touchdown_K = 0;

    // N * omega_N, surface measure of the unit sphere.
    double sphere_area = 0;
    // Exponents of dirichlet and lmu in the quotient S.
    double s_dirichlet_exp = 0;
    double s_lmu_exp = 0;
    // K_* = J_*^kappa_exp
    double kappa_exp = 0;
    // Pohozaev coefficients of (dirichlet, lmu, weighted).
    double poh1[3] = {0, 0, 0};
    double poh2[3] = {0, 0, 0};
    double poh3[3] = {0, 0, 0};
    // Exact dirichlet / lmu ratio at a solution.
    double dl_ratio = 0;
};

struct ProblemParams {
    int N = 3;
    double m = 2.0;
    double sigma = -1.0;
    Regime regime = Regime::Admissible;
    DerivedConstants c;

    bool admissible() const { return regime == Regime::Admissible; }
};

// Throws InvalidParameter naming the violated inequality.
ProblemParams validate(const RawParams& raw, bool allow_probe = false);

DerivedConstants derive(int N, double m, double sigma);

// Volume of the unit ball in R^N.
double unit_ball_volume(int N);

// key=value lines, '#' comments. Keys: N, m, sigma, regime.
ProblemParams parse_config(const std::string& text);
ProblemParams load_config(const std::string& path);

}  // namespace hh
