#pragma once

// Semivariograms, the spatial dependence measure D_{X,beta} of a Brown-Resnick
// field with GEV margins, and the correlation between sites with different
// margins.

#include <array>
#include <vector>

#include "gev_powers.hpp"

namespace hrcorr {

using Vec2 = std::array<double, 2>;

class SemivariogramModel {
 public:
  enum class Kind { Power, Smith };

  /// gamma(x) = (|x| / kappa)^psi with kappa > 0 and psi in (0, 2].
  static SemivariogramModel power(double kappa, double psi);
  /// gamma(x) = x' Sigma^{-1} x / 2 with Sigma = [[s11, s12], [s12, s22]] positive definite.
  static SemivariogramModel smith(double s11, double s12, double s22);

  [[nodiscard]] double gamma(Vec2 lag) const;
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool isotropic() const { return kind_ == Kind::Power || (p_[1] == 0.0 && p_[0] == p_[2]); }

  [[nodiscard]] double kappa() const { return p_[0]; }
  [[nodiscard]] double psi() const { return p_[1]; }
  [[nodiscard]] const std::array<double, 3>& params() const { return p_; }

 private:
  SemivariogramModel(Kind k, std::array<double, 3> p) : kind_(k), p_(p) {}
  Kind kind_;
  std::array<double, 3> p_;  // power: kappa, psi, -; smith: s11, s12, s22
  std::array<double, 3> inv_{};  // smith: entries of Sigma^{-1}
};

double lag_to_h(Vec2 lag, const SemivariogramModel& model);

struct BrownResnickSpec {
  SemivariogramModel model;
  MarginPowerSpec margin;
};

/// D_{X,beta}(x1, x2) for spatially constant margins.
double dependence_measure(const BrownResnickSpec& spec, Vec2 x1, Vec2 x2, const QuadratureSpec& q,
                          CovMethod method = CovMethod::Auto);
/// Same quantity from the HR parameter directly.
double dependence_measure_h(const MarginPowerSpec& margin, const HrParams& p,
                            const QuadratureSpec& q, CovMethod method = CovMethod::Auto);

struct SiteMargin {
  Vec2 site;
  MarginPowerSpec margin;
};

double corr_nonstationary(const SemivariogramModel& model, const SiteMargin& a, const SiteMargin& b,
                          const QuadratureSpec& q);

struct CorrelationCurve {
  std::vector<double> distances;
  std::vector<double> values;
};

/// D along `direction` (unit vector, default the first axis) at each distance.
CorrelationCurve correlation_curve(const BrownResnickSpec& spec, const std::vector<double>& distances,
                                   const QuadratureSpec& q, int threads = 1,
                                   Vec2 direction = {1.0, 0.0});

/// Smallest distance along `direction` at which D falls below `level`, located
/// to `distance_tol` by bracketing and a TOMS 748 root search.
double threshold_distance(const BrownResnickSpec& spec, double level, const QuadratureSpec& q,
                          double distance_tol = 1e-9, Vec2 direction = {1.0, 0.0});

/// Row-major grid: values[i * betas.size() + j] = D at distances[i] with beta = betas[j].
struct PowerDistanceSurface {
  std::vector<double> distances;
  std::vector<int> betas;
  std::vector<double> values;
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * betas.size() + j]; }
};

PowerDistanceSurface power_distance_surface(const BrownResnickSpec& spec,
                                            const std::vector<double>& distances,
                                            const std::vector<int>& betas, const QuadratureSpec& q,
                                            int threads = 1);

}  // namespace hrcorr
