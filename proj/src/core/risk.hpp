#pragma once

// Insured-cost correlation under a power damage function and the variance of
// the aggregated loss over a rectangular region.

#include <cstddef>

#include "brown_resnick.hpp"

namespace hrcorr {

/// Damage (w / c1)^beta for wind speed w.
struct DamageFunctionSpec {
  double c1;
  int beta;
  DamageFunctionSpec(double c1_, int beta_);
};

/// Longitude/latitude rectangle in degrees discretized into square-ish cells.
struct Region {
  double lon_min, lon_max, lat_min, lat_max;
  double resolution;
  Region(double lon_min_, double lon_max_, double lat_min_, double lat_max_, double resolution_);

  [[nodiscard]] int cells_lon() const;
  [[nodiscard]] int cells_lat() const;
  [[nodiscard]] double cell_width() const { return (lon_max - lon_min) / cells_lon(); }
  [[nodiscard]] double cell_height() const { return (lat_max - lat_min) / cells_lat(); }
  [[nodiscard]] double cell_area() const { return cell_width() * cell_height(); }
  [[nodiscard]] Vec2 center(int i, int j) const;
};

/// Corr(C(x1), C(x2)); equal to D_{X,beta} with beta taken from the damage function.
double cost_correlation(const BrownResnickSpec& spec, const DamageFunctionSpec& damage, Vec2 x1,
                        Vec2 x2, const QuadratureSpec& q);

struct LossVariance {
  double value = 0.0;                 // Var of the aggregated loss
  double var_c0 = 0.0;                // Var(C(x)) at one site
  double correlation_integral = 0.0;  // double area integral of the correlation
  int cells_lon = 0;
  int cells_lat = 0;
  double cell_area = 0.0;
  std::size_t distinct_lags = 0;
};

/// Midpoint rule over all cell pairs with correlations memoized per grid offset.
LossVariance loss_variance(const BrownResnickSpec& spec, const DamageFunctionSpec& damage,
                           const Region& region, double exposure, const QuadratureSpec& q,
                           int threads = 1);

}  // namespace hrcorr
