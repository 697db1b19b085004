#pragma once

// Bivariate Hüsler-Reiss law: distribution function, density, the kernels of
// the angular representation and the mixed-moment integral
//
//   I(b1, b2; h) = E[Z1^b1 Z2^b2]
//
// for standard Fréchet margins.

#include "numerics.hpp"

namespace hrcorr {

/// Dependence parameter h in [0, inf]. h = 0 is complete dependence and the
/// independent case is a distinct state rather than a floating infinity.
class HrParams {
 public:
  static HrParams finite(double h);
  static HrParams independent() { return HrParams(0.0, true); }

  [[nodiscard]] bool is_independent() const noexcept { return independent_; }
  [[nodiscard]] bool is_complete() const noexcept { return !independent_ && h_ == 0.0; }
  /// Finite value of h; throws when called on the independent state.
  [[nodiscard]] double h() const;

 private:
  HrParams(double h, bool independent) : h_(h), independent_(independent) {}
  double h_;
  bool independent_;
};

/// Powers (b1, b2) applied to the two standard Fréchet components; both must
/// be < 1/2 for the second moments to exist.
struct SimplePowerPair {
  double beta1;
  double beta2;
  SimplePowerPair(double b1, double b2);
};

double hr_cdf(double z1, double z2, const HrParams& p);

/// Bivariate density; only defined for 0 < h < inf.
double hr_density(double z1, double z2, const HrParams& p);

struct KernelC {
  double c1;
  double c2;
  double c3;
};

/// The three kernels of the radius/angle decomposition, evaluated literally.
KernelC kernel_c(double theta, double h);

double i_integral(const SimplePowerPair& pair, const HrParams& p, const QuadratureSpec& q);
double i_integral_symmetric(double beta, const HrParams& p, const QuadratureSpec& q);

/// Cov(Z1^b1, Z2^b2).
double cov_simple_powers(const SimplePowerPair& pair, const HrParams& p, const QuadratureSpec& q);

namespace detail {

/// Integrand of I in s = log(theta), in log space. Shared with the
/// resummed GEV-power evaluation.
struct AngularWeights {
  double log_c1;     // log C1(theta, h)
  double log_size;   // log of Phi(a) Phi(b) / theta   (weight of the Gamma(2 - .) term)
  double log_shape;  // log of phi(a) / h              (weight of the Gamma(1 - .) term)
};
AngularWeights angular_weights(double s, double h);

/// Breakpoints in s that keep the integrand's features inside panels.
std::vector<double> angular_breakpoints(double h);

}  // namespace detail

}  // namespace hrcorr
