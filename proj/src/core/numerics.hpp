#pragma once

// Special functions and adaptive quadrature shared by every other module.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hrcorr {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

/// Euler gamma function for x > 0. Throws ErrorKind::Domain otherwise.
double gamma_fn(double x);

/// Standard Gaussian distribution and density.
double norm_cdf(double x);
double norm_pdf(double x);

/// log Phi(x), accurate in the far left tail where Phi underflows.
double log_norm_cdf(double x);
inline double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

/// Exact binomial coefficient for n <= 62 (computed in integer arithmetic).
std::uint64_t binomial(int n, int k);

// ---------------------------------------------------------------------------
// Double-double helpers. B-coefficient sums in the GEV-power formulas cancel
// heavily, so products and sums are carried with an error term.

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
  [[nodiscard]] double value() const { return hi + lo; }
};

DoubleDouble dd_add(DoubleDouble a, DoubleDouble b);
DoubleDouble dd_mul(DoubleDouble a, DoubleDouble b);
DoubleDouble dd_div(DoubleDouble a, DoubleDouble b);
DoubleDouble dd_pow(DoubleDouble a, int n);
inline DoubleDouble dd(double x) { return {x, 0.0}; }

/// Accumulates a sum of double-double terms; terms are added in descending
/// order of magnitude when `sorted_sum()` is used.
class CompensatedSum {
 public:
  void add(DoubleDouble term) { terms_.push_back(term); }
  void add(double term) { terms_.push_back({term, 0.0}); }
  [[nodiscard]] double sorted_sum() const;
  /// Sum of |terms|; the ratio abs_sum / |sum| is the cancellation factor.
  [[nodiscard]] double abs_sum() const;

 private:
  std::vector<DoubleDouble> terms_;
};

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureSpec {
  double relative_tolerance = 1e-13;
  double absolute_tolerance = 0.0;
  int max_subdivisions = 4000;

  /// Throws ErrorKind::Domain when an invariant is violated.
  void validate() const;

  /// Accuracy used for headline curve values.
  static QuadratureSpec headline() { return {1e-13, 0.0, 4000}; }
  /// Accuracy used for wide parameter sweeps.
  static QuadratureSpec sweep() { return {1e-5, 0.0, 4000}; }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  long evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (10/21) on a finite interval.
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec);

/// Integral over (0, inf). The domain is mapped by x = t / (1 - t) and split
/// at t = 1/2, the image of x = 1.
QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSpec& spec);

/// Integral over the real line. Finite panels are formed between the sorted
/// breakpoints and both tails are mapped onto (0, 1) with x = p +- t / (1 - t).
QuadratureResult integrate_real_line(const Integrand& f, std::span<const double> breakpoints,
                                     const QuadratureSpec& spec);

}  // namespace hrcorr
