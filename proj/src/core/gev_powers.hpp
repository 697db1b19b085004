#pragma once

// Covariance, variance and correlation of integer powers of Hüsler-Reiss
// vectors with GEV margins.

#include <vector>

#include "hr_core.hpp"

namespace hrcorr {

struct GevParams {
  double eta;  // location
  double tau;  // scale, > 0
  double xi;   // shape
  GevParams(double eta_, double tau_, double xi_);
};

struct IntegerPower {
  int beta;
  explicit IntegerPower(int b);
  static constexpr int kMax = 30;
};

/// GEV margin together with the power applied to it; enforces beta * xi < 1/2.
struct MarginPowerSpec {
  GevParams gev;
  IntegerPower power;
  MarginPowerSpec(GevParams g, IntegerPower p);
  [[nodiscard]] int beta() const { return power.beta; }
};

/// How the binomial double sums are evaluated.
///  - ClosedForm: the B-coefficient double sum over Gamma functions and I integrals.
///  - Resummed: the binomial sums are folded back into (eta + tau (z^xi - 1)/xi)^beta
///    and the radial integral is done by quadrature. Well conditioned for any xi,
///    including xi = 0.
///  - Auto: ClosedForm unless its cancellation factor times 1e-14 exceeds the
///    requested relative tolerance, or either shape is zero.
enum class CovMethod { Auto, ClosedForm, Resummed };

const char* to_string(CovMethod m);

double gev_transform(double z, const GevParams& g);

/// Coefficient of I_{(b1-k1) xi1, (b2-k2) xi2} in the covariance double sum.
double b_coeff(int k1, int k2, const MarginPowerSpec& s1, const MarginPowerSpec& s2);
/// Same-margin coefficient used by the variance formula.
double b_coeff_same(int k1, int k2, const MarginPowerSpec& s);

double var_gev_power(const MarginPowerSpec& s);
double var_gev_power(const MarginPowerSpec& s, const QuadratureSpec& q, CovMethod method);

double cov_gev_powers(const MarginPowerSpec& s1, const MarginPowerSpec& s2, const HrParams& p,
                      const QuadratureSpec& q, CovMethod method = CovMethod::Auto);

double corr_gev_powers(const MarginPowerSpec& s1, const MarginPowerSpec& s2, const HrParams& p,
                       const QuadratureSpec& q, CovMethod method = CovMethod::Auto);

/// E[X^beta] for one margin.
double mean_gev_power(const MarginPowerSpec& s);

// Same margins on both components.

/// g(h) = sum_{k1,k2} B_{k1,k2} I_{(beta-k1) xi, (beta-k2) xi}(h), i.e. E[X1^beta X2^beta].
double g_function(const MarginPowerSpec& s, const HrParams& p, const QuadratureSpec& q,
                  CovMethod method = CovMethod::ClosedForm);
/// lim_{h -> 0} g.
double g_limit_zero(const MarginPowerSpec& s);
/// lim_{h -> inf} g, i.e. sum B Gamma Gamma.
double g_limit_infinity(const MarginPowerSpec& s);
/// Covariance written as g(h) minus its limit at infinity.
double cov_same_margins(const MarginPowerSpec& s, const HrParams& p, const QuadratureSpec& q);

/// xi = 0 on both margins: average of the covariance at xi = +eps and -eps.
double cov_gev_powers_gumbel_limit(const MarginPowerSpec& s1, const MarginPowerSpec& s2,
                                   const HrParams& p, const QuadratureSpec& q, double eps);

/// Cancellation factor of the closed-form covariance sum, measured against
/// sqrt(Var1 Var2).
double closed_form_cancellation(const MarginPowerSpec& s1, const MarginPowerSpec& s2,
                                const QuadratureSpec& q);

struct CovTerm {
  int k1;
  int k2;
  double b;        // B coefficient
  double i_value;  // I_{a,b}(h)
  double gamma1;   // Gamma(1 - a)
  double gamma2;   // Gamma(1 - b)
  double term;     // B * (I - Gamma1 Gamma2)
};

struct CovBreakdown {
  std::vector<CovTerm> terms;
  double cov = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  double corr = 0.0;
  double cancellation = 0.0;
  CovMethod method_used = CovMethod::ClosedForm;
  double cov_resummed = 0.0;  // cross-check value from the resummed route
};

/// Every intermediate of the closed-form evaluation plus the resummed cross-check.
CovBreakdown cov_breakdown(const MarginPowerSpec& s1, const MarginPowerSpec& s2,
                           const HrParams& p, const QuadratureSpec& q);

}  // namespace hrcorr
