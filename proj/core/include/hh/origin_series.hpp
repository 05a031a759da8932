#pragma once

#include <cmath>
#include <utility>

#include "hh/params.hpp"

namespace hh {

enum class SeriesCase { SigmaInMinus1To0, SigmaEqMinus1, SigmaInMinus2ToMinus1 };

const char* to_string(SeriesCase c);

struct OriginExpansion {
    SeriesCase series_case = SeriesCase::SigmaInMinus1To0;
    int N = 3;
    double m = 2;
    double sigma = -1;
    double V0 = 0;
    double c1 = 0;
    double e1 = 0;
    double c2 = 0;
    double e2 = 0;
};

struct SeriesValue {
    double V = 0;
    double Vprime = 0;
};

// sigma within 1e-12 of -1 counts as -1.
SeriesCase classify_sigma(double sigma);

// Throws OutOfCase outside the admissible range.
OriginExpansion origin_expansion(const ProblemParams& params, double V0);
// Throws OutOfCase when the requested case does not match sigma.
OriginExpansion origin_expansion(const ProblemParams& params, double V0, SeriesCase forced);

SeriesValue eval_origin(const OriginExpansion& e, double r);

// min(cap, (tol * V0 / |c2|)^(1/e2)).
double validity_radius(const OriginExpansion& e, double tol = 1e-10, double cap = 1e-4);

// Small-r behaviour of V''. For sigma = -1 only the constant is populated.
struct ExpansionPrediction {
    SeriesCase series_case = SeriesCase::SigmaInMinus1To0;
    // V'' ~ lead_coeff * r^lead_exp + next_coeff * r^next_exp
    double lead_coeff = 0;
    double lead_exp = 0;
    double next_coeff = 0;
    double next_exp = 0;
    // V''(0) for sigma = -1.
    double second_derivative_at_zero = 0;
};

// Series coefficients in an arbitrary floating type; c2 sign convention as in OriginExpansion.
template <class Real>
struct SeriesCoeffs {
    Real c1, e1, c2, e2;
};

template <class Real>
SeriesCoeffs<Real> series_coeffs(SeriesCase sc, int N, Real m, Real sigma, Real V0) {
    using std::pow;
    const Real n = N;
    SeriesCoeffs<Real> k;
    k.e1 = sigma + 2;
    k.c1 = V0 / ((n + sigma) * (sigma + 2));
    switch (sc) {
        case SeriesCase::SigmaInMinus1To0:
            k.e2 = 2;
            k.c2 = pow(V0, 1 / m) / (2 * n * (m - 1));
            break;
        case SeriesCase::SigmaEqMinus1:
            k.e2 = 2;
            k.c2 = (V0 / (n - 1) + pow(V0, 1 / m) / (m - 1)) / (2 * n);
            break;
        case SeriesCase::SigmaInMinus2ToMinus1:
            k.e2 = 2 * sigma + 4;
            k.c2 = V0 / ((n + sigma) * (sigma + 2) * (n + 2 * sigma + 2) * (2 * sigma + 4));
            break;
    }
    return k;
}

ExpansionPrediction second_derivative_limit(const ProblemParams& params, double V0);

struct TouchdownExpansion {
    double R = 0;
    double K = 0;
    double exponent = 0;
};

TouchdownExpansion touchdown_expansion(const ProblemParams& params, double R);
SeriesValue eval_touchdown(const TouchdownExpansion& t, double r);

}  // namespace hh
