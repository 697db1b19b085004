#include "risk.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"

namespace hrcorr {

DamageFunctionSpec::DamageFunctionSpec(double c1_, int beta_) : c1(c1_), beta(beta_) {
  if (!(c1 > 0.0) || !std::isfinite(c1)) {
    std::ostringstream os;
    os << "damage.c1 must be finite and > 0, got " << c1;
    throw_domain(os.str());
  }
  if (beta < 1) {
    std::ostringstream os;
    os << "damage.beta must be an integer >= 1, got " << beta;
    throw_domain(os.str());
  }
}

Region::Region(double lon_min_, double lon_max_, double lat_min_, double lat_max_,
               double resolution_)
    : lon_min(lon_min_), lon_max(lon_max_), lat_min(lat_min_), lat_max(lat_max_),
      resolution(resolution_) {
  const double w = lon_max - lon_min;
  const double hgt = lat_max - lat_min;
  if (!(w > 0.0) || !(hgt > 0.0) || !std::isfinite(w) || !std::isfinite(hgt))
    throw_domain("region must have positive, finite extent");
  if (!(resolution > 0.0) || !(resolution <= std::min(w, hgt))) {
    std::ostringstream os;
    os << "region resolution must lie in (0, " << std::min(w, hgt) << "], got " << resolution;
    throw_domain(os.str());
  }
}

int Region::cells_lon() const {
  return std::max(1, static_cast<int>(std::lround((lon_max - lon_min) / resolution)));
}

int Region::cells_lat() const {
  return std::max(1, static_cast<int>(std::lround((lat_max - lat_min) / resolution)));
}

Vec2 Region::center(int i, int j) const {
  return {lon_min + (i + 0.5) * cell_width(), lat_min + (j + 0.5) * cell_height()};
}

double cost_correlation(const BrownResnickSpec& spec, const DamageFunctionSpec& damage, Vec2 x1,
                        Vec2 x2, const QuadratureSpec& q) {
  const BrownResnickSpec s{spec.model, MarginPowerSpec(spec.margin.gev, IntegerPower(damage.beta))};
  return dependence_measure(s, x1, x2, q);
}

LossVariance loss_variance(const BrownResnickSpec& spec, const DamageFunctionSpec& damage,
                           const Region& region, double exposure, const QuadratureSpec& q,
                           int threads) {
  if (!(exposure > 0.0) || !std::isfinite(exposure))
    throw_domain("exposure must be finite and > 0");
  const int nx = region.cells_lon();
  const int ny = region.cells_lat();
  if (nx < 2 || ny < 2) {
    std::ostringstream os;
    os << "grid too coarse: " << nx << " x " << ny << " cells, need at least 2 per edge";
    throw_domain(os.str());
  }
  const MarginPowerSpec margin(spec.margin.gev, IntegerPower(damage.beta));
  const BrownResnickSpec s{spec.model, margin};
  const double dx = region.cell_width();
  const double dy = region.cell_height();
  const bool iso = spec.model.isotropic();

  // correlation depends on the offset only through gamma(lag), which is even
  auto key = [&](int di, int dj) {
    if (iso) return std::make_pair(std::abs(di), std::abs(dj));
    if (di < 0 || (di == 0 && dj < 0)) return std::make_pair(-di, -dj);
    return std::make_pair(di, dj);
  };

  std::map<std::pair<int, int>, std::size_t> index;
  std::vector<std::pair<int, int>> lags;
  std::vector<double> weight;
  for (int di = -(nx - 1); di <= nx - 1; ++di) {
    for (int dj = -(ny - 1); dj <= ny - 1; ++dj) {
      const auto k = key(di, dj);
      auto [it, inserted] = index.try_emplace(k, lags.size());
      if (inserted) {
        lags.push_back(k);
        weight.push_back(0.0);
      }
      weight[it->second] += static_cast<double>(nx - std::abs(di)) * (ny - std::abs(dj));
    }
  }

  std::vector<double> corr(lags.size());
  parallel_for(lags.size(), threads, [&](std::size_t k) {
    corr[k] = dependence_measure(s, {0.0, 0.0}, {lags[k].first * dx, lags[k].second * dy}, q);
  });

  CompensatedSum sum;
  for (std::size_t k = 0; k < lags.size(); ++k) sum.add(weight[k] * corr[k]);

  LossVariance out;
  out.cells_lon = nx;
  out.cells_lat = ny;
  out.cell_area = region.cell_area();
  out.distinct_lags = lags.size();
  out.correlation_integral = sum.sorted_sum() * out.cell_area * out.cell_area;
  out.var_c0 = exposure * exposure * std::pow(damage.c1, -2.0 * damage.beta) *
               var_gev_power(margin, q, CovMethod::Auto);
  out.value = out.var_c0 * out.correlation_integral;
  return out;
}

}  // namespace hrcorr
