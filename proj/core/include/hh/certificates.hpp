#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hh/params.hpp"
#include "hh/profile_io.hpp"
#include "hh/radial_field.hpp"

namespace hh {

enum class Verdict { Pass, Fail, NotApplicable };

const char* to_string(Verdict v);

struct PohozaevResiduals {
    double dirichlet = 0;
    double lmu = 0;
    double weighted = 0;
    // Signed combinations before normalisation.
    double comb1 = 0;
    double comb2 = 0;
    double comb3 = 0;
    double scale1 = 1;
    double scale2 = 1;
    double scale3 = 1;
    double rho1 = 0;
    double rho2 = 0;
    double rho3 = 0;
};

PohozaevResiduals pohozaev_residuals(const RadialProfile& p, const ProblemParams& params);
// From precomputed integrals.
PohozaevResiduals pohozaev_from(double dirichlet, double lmu, double weighted, const ProblemParams& params);

struct RatioCheck {
    double observed = 0;
    double predicted = 0;
    double rel_error = 0;
};

// Throws DegenerateProfile when the lmu integral vanishes.
RatioCheck ratio_check(const RadialProfile& p, const ProblemParams& params);

// Smallest grid radius r > 0 with r^sigma V^((m-1)/m) <= 1/(2(m-1)); nullopt if none.
std::optional<double> tail_radius(const RadialProfile& p, const ProblemParams& params);

struct EnvelopeParams {
    double r0 = 0;
    double M0 = 0;
    double a = 0;
    double b = 0;
    // Right-hand side of b (b r0^2 + M0^((m-1)/2m)) <= bound.
    double bound = 0;
};

// (m-1)/(16 m (m+1)): the product bound of the supersolution lemma at c = 1/(2(m-1)).
double envelope_bound(double m);
// (m-1)/(4 m (m+1)): four times the above, kept as a diagnostic.
double envelope_bound_loose(double m);

EnvelopeParams envelope_params(double r0, double M0, double m, double bound);
double envelope_value(const EnvelopeParams& e, double m, double r);

struct EnvelopeCheck {
    EnvelopeParams env;
    // max over r >= r0 of (V - V_{a,b})_+
    double max_violation = 0;
    double violation_at = 0;
    double V_origin = 0;
};

// Throws NoTailRadius when the tail condition never holds on the grid.
EnvelopeCheck envelope_check(const RadialProfile& p, const ProblemParams& params);
EnvelopeCheck envelope_check(const RadialProfile& p, const ProblemParams& params, double bound);

struct BoundMargins {
    // min over r > 0 of (bound - V)/bound; +inf for the zero profile.
    double decay_margin = 0;
    double mass_margin = 0;
    double decay_worst_r = 0;
    double mass_worst_r = 0;
};

BoundMargins decay_and_mass_bounds(const RadialProfile& p, const ProblemParams& params);

struct NonexistenceCertificate {
    double coef_dirichlet = 0;
    double coef_lmu = 0;
    bool signs_hold = false;
    std::string verdict;
    // poh3 combination of a supplied profile; strictly negative for any nontrivial one.
    std::optional<double> witness;
};

// Throws WrongRegime when sigma > -2.
NonexistenceCertificate nonexistence_certificate(const ProblemParams& params,
                                                 const RadialProfile* profile = nullptr);

struct OriginFit {
    double exponent = 0;
    double coefficient = 0;
    // Coefficient of the next-order term in the fit model.
    double next_coefficient = 0;
    double predicted_exponent = 0;
    double predicted_coefficient = 0;
    double exponent_error = 0;
    double coefficient_error = 0;
    int points = 0;
};

// Least squares of V(0) - V(r) = C r^e + D r^e2 over nodes in [r_lo, r_hi], e2 from the series case.
OriginFit origin_fit(const RadialProfile& p, const ProblemParams& params, double r_lo = 1e-5, double r_hi = 1e-3);

struct SecondDerivativeCheck {
    double extrapolated = 0;
    double predicted = 0;
    double rel_error = 0;
    int points = 0;
};

// sigma = -1 only: second differences of V near the origin, extrapolated linearly to r = 0.
SecondDerivativeCheck second_derivative_check(const RadialProfile& p, const ProblemParams& params,
                                              double r_lo = 1e-4, double r_hi = 1e-2);

struct TouchdownCheck {
    double exponent = 0;
    double prefactor = 0;
    double predicted_exponent = 0;
    double predicted_prefactor = 0;
    double exponent_error = 0;
    double prefactor_error = 0;
    double x_lo = 0;
    double x_hi = 0;
    int points = 0;
};

// Log-log fit of V against R - r over x in [x_lo, x_span * x_lo]. x_lo is the graft start when given,
// else the distance to R where V first drops below graft_level * V(0).
TouchdownCheck touchdown_check(const RadialProfile& p, const ProblemParams& params, double R,
                               std::optional<double> graft_start = std::nullopt, double x_span = 3.0,
                               double graft_level = 1e-12);

struct RefinementRecord {
    double rho_fine[3] = {0, 0, 0};
    double rho_coarse[3] = {0, 0, 0};
    double ratio_err_fine = 0;
    double ratio_err_coarse = 0;
    // log2(coarse / fine); nan when either level sits at rounding.
    double order[4] = {0, 0, 0, 0};
};

// Compares the profile with its every-other-node restriction.
RefinementRecord refinement_record(const RadialProfile& p, const ProblemParams& params);

struct CertificateTolerances {
    double pohozaev = 1e-6;
    double pohozaev_piecewise_linear = 1e-3;
    double ratio = 1e-5;
    double envelope_rel = 1e-12;
    double origin_exponent = 0.01;
    double origin_coefficient = 0.02;
    double second_derivative = 0.02;
    double touchdown_exponent = 0.02;
    double touchdown_prefactor = 0.05;
    double ode_residual = 1e-7;
    double rounding_floor = 1e-13;
};

struct CertificateReport {
    ProblemParams params;
    std::optional<PohozaevResiduals> pohozaev;
    std::optional<RatioCheck> ratio;
    std::optional<EnvelopeCheck> envelope;
    std::optional<EnvelopeCheck> envelope_loose;
    std::optional<BoundMargins> bounds;
    std::optional<OriginFit> origin;
    std::optional<SecondDerivativeCheck> second_derivative;
    std::optional<TouchdownCheck> touchdown;
    std::optional<double> ode_residual;
    std::optional<RefinementRecord> refinement;
    std::optional<NonexistenceCertificate> nonexistence;
    std::map<std::string, double> expansion_fit_errors;
    std::map<std::string, Verdict> verdicts;
    std::map<std::string, double> tolerances;
    std::vector<std::string> errors;
    std::vector<std::string> notes;

    bool passed() const;
};

CertificateReport certify(const ProfileFile& file, const CertificateTolerances& tol = {});

nlohmann::json to_json(const CertificateReport& r);

}  // namespace hh
