#pragma once

// Independent checks of the analytic formulas: moments from direct
// quadrature of the bivariate density, and Monte Carlo with an exact sampler
// of the Hüsler-Reiss law obtained by conditional inversion.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gev_powers.hpp"

namespace hrcorr {

struct McConfig {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 20261016;
  bool antithetic = false;
  int threads = 1;
  void validate() const;
};

/// Uniform on (0, 1) from a counter: SplitMix64 finalizer applied to seed and index.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Conditional quantile of Z2 given Z1 = z1 at probability u, found by
/// safeguarded Newton iteration in log z2. Throws NonConvergence on failure.
double hr_conditional_quantile(double z1, double u, double h);

/// Conditional distribution function P(Z2 <= z2 | Z1 = z1).
double hr_conditional_cdf(double z2, double z1, double h);

struct HrSample {
  double z1;
  double z2;
};

/// Deterministic sampler: sample i depends only on (seed, i), so streams can be
/// split across threads and replayed exactly.
class HrSampler {
 public:
  HrSampler(const HrParams& p, const McConfig& cfg);
  [[nodiscard]] HrSample operator()(std::uint64_t i) const;
  /// With `swap` the roles of the two components are exchanged in the construction.
  [[nodiscard]] HrSample draw(std::uint64_t i, bool swap) const;

 private:
  double h_;
  McConfig cfg_;
};

std::vector<HrSample> sample_hr(const HrParams& p, const McConfig& cfg);

/// Standard Fréchet draws by inversion of the same counter stream.
std::vector<double> sample_frechet(const McConfig& cfg);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

McEstimate mc_covariance(const std::vector<HrSample>& s, const std::function<double(double)>& f1,
                         const std::function<double(double)>& f2);
McEstimate mc_variance(const std::vector<double>& z, const std::function<double(double)>& f);

/// l(z1, z2) z1 z2 at z1 = e^x1, z2 = e^x2, arranged to stay finite in the tails.
double density_log_coords(double x1, double x2, double h);

/// E[g(Z1, Z2)] by nested adaptive quadrature of g times the density over log z1, log z2.
double expect_by_density(const std::function<double(double, double)>& g, const HrParams& p,
                         const QuadratureSpec& q);
/// E[f(Z)] for standard Fréchet Z by quadrature of the Fréchet density.
double expect_frechet(const std::function<double(double)>& f, const QuadratureSpec& q);

double moment_by_density_quadrature(double beta1, double beta2, const HrParams& p,
                                    const QuadratureSpec& q);

struct SimpleCovTarget {
  double beta1;
  double beta2;
};
struct GevCovTarget {
  MarginPowerSpec spec1;
  MarginPowerSpec spec2;
};
struct GevVarTarget {
  MarginPowerSpec spec;
};
using ValidationTarget = std::variant<SimpleCovTarget, GevCovTarget, GevVarTarget>;

struct OracleReport {
  std::string name;
  double analytic = 0.0;
  double quadrature_oracle = 0.0;
  double mc_estimate = 0.0;
  double mc_std_error = 0.0;
  // |analytic - quadrature| over |analytic|, or over the product of the
  // marginal moments when the quantity vanishes identically (a zero power).
  double relative_error = 0.0;
  double mc_z = 0.0;            // |analytic - mc| / std_error
  bool agrees = false;
};

struct ValidateOptions {
  double tol = 1e-5;
  CovMethod method = CovMethod::ClosedForm;
  QuadratureSpec oracle_quadrature{1e-10, 0.0, 20000};
};

OracleReport validate(const ValidationTarget& target, const HrParams& p, const QuadratureSpec& q,
                      const McConfig& cfg, const ValidateOptions& opts);

/// Same as validate but reusing precomputed samples (bivariate targets) or
/// Fréchet draws (variance targets).
OracleReport validate_with_samples(const ValidationTarget& target, const HrParams& p,
                                   const QuadratureSpec& q, const std::vector<HrSample>* pairs,
                                   const std::vector<double>* singles, const ValidateOptions& opts);

enum class Suite { Quick, Full };

struct SuiteResult {
  std::vector<OracleReport> reports;
  [[nodiscard]] bool all_agree() const;
};

/// Runs a validation suite. Quick: 9 simple-margin cases at 1e5 draws. Full:
/// the simple-margin lattice at 1e6 draws per h, GEV variances at 1e7 draws
/// and GEV covariances backing the distance-5 and distance-10 curve values.
SuiteResult run_suite(Suite suite, const McConfig& cfg, const QuadratureSpec& q,
                      const std::function<void(const OracleReport&)>& progress = {});

}  // namespace hrcorr
