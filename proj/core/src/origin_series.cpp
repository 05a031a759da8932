#include "hh/origin_series.hpp"

#include <algorithm>
#include <cmath>

#include "hh/error.hpp"

namespace hh {

const char* to_string(SeriesCase c) {
    switch (c) {
        case SeriesCase::SigmaInMinus1To0: return "SigmaInMinus1To0";
        case SeriesCase::SigmaEqMinus1: return "SigmaEqMinus1";
        case SeriesCase::SigmaInMinus2ToMinus1: return "SigmaInMinus2ToMinus1";
    }
    return "?";
}

SeriesCase classify_sigma(double sigma) {
    if (std::abs(sigma + 1) <= 1e-12) return SeriesCase::SigmaEqMinus1;
    return sigma > -1 ? SeriesCase::SigmaInMinus1To0 : SeriesCase::SigmaInMinus2ToMinus1;
}

OriginExpansion origin_expansion(const ProblemParams& params, double V0) {
    if (!params.admissible() || !(params.sigma > -2) || !(params.sigma < 0))
        fail(ErrorCode::OutOfCase, "origin expansion needs -2 < sigma < 0 in the admissible regime");
    return origin_expansion(params, V0, classify_sigma(params.sigma));
}

OriginExpansion origin_expansion(const ProblemParams& params, double V0, SeriesCase forced) {
    const double s = params.sigma;
    const double m = params.m;
    if (!(s > -2 && s < 0)) fail(ErrorCode::OutOfCase, "sigma outside (-2, 0)");
    if (classify_sigma(s) != forced) fail(ErrorCode::OutOfCase, std::string("sigma does not match case ") + to_string(forced));
    if (V0 < 0) fail(ErrorCode::InvalidParameter, "V0 must be >= 0");
    OriginExpansion e;
    e.series_case = forced;
    e.N = params.N;
    e.m = m;
    e.sigma = s;
    e.V0 = V0;
    if (forced == SeriesCase::SigmaEqMinus1 && params.N < 2) fail(ErrorCode::OutOfCase, "sigma = -1 needs N >= 2");
    const SeriesCoeffs<double> k = series_coeffs<double>(forced, params.N, m, s, V0);
    e.c1 = k.c1;
    e.e1 = k.e1;
    e.c2 = k.c2;
    e.e2 = k.e2;
    return e;
}

SeriesValue eval_origin(const OriginExpansion& e, double r) {
    if (e.V0 == 0) return {};
    SeriesValue v;
    v.V = e.V0 - e.c1 * std::pow(r, e.e1) + e.c2 * std::pow(r, e.e2);
    v.Vprime = -e.e1 * e.c1 * std::pow(r, e.e1 - 1) + e.e2 * e.c2 * std::pow(r, e.e2 - 1);
    return v;
}

double validity_radius(const OriginExpansion& e, double tol, double cap) {
    if (e.c2 == 0) return cap;
    return std::min(cap, std::pow(tol * e.V0 / std::abs(e.c2), 1 / e.e2));
}

ExpansionPrediction second_derivative_limit(const ProblemParams& params, double V0) {
    const double s = params.sigma;
    const double n = params.N;
    const double m = params.m;
    ExpansionPrediction p;
    p.series_case = classify_sigma(s);
    switch (p.series_case) {
        case SeriesCase::SigmaInMinus1To0:
            p.lead_coeff = -((s + 1) / (s + n)) * V0;
            p.lead_exp = s;
            p.next_coeff = std::pow(V0, 1 / m) / (n * (m - 1));
            p.next_exp = 0;
            break;
        case SeriesCase::SigmaEqMinus1:
            p.second_derivative_at_zero = V0 / (n * (n - 1)) + std::pow(V0, 1 / m) / (n * (m - 1));
            p.lead_coeff = p.second_derivative_at_zero;
            p.lead_exp = 0;
            break;
        case SeriesCase::SigmaInMinus2ToMinus1:
            p.lead_coeff = -((s + 1) / (s + n)) * V0;
            p.lead_exp = s;
            p.next_coeff = (2 * s + 3) / ((s + 2) * (n + 2 * s + 2) * (s + n)) * V0;
            p.next_exp = 2 * (s + 1);
            break;
    }
    return p;
}

TouchdownExpansion touchdown_expansion(const ProblemParams& params, double R) {
    return {R, params.c.touchdown_K, params.c.omega};
}

SeriesValue eval_touchdown(const TouchdownExpansion& t, double r) {
    const double x = t.R - r;
    if (x <= 0) return {};
    return {t.K * std::pow(x, t.exponent), -t.K * t.exponent * std::pow(x, t.exponent - 1)};
}

}  // namespace hh
