#include "brown_resnick.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace hrcorr {

SemivariogramModel SemivariogramModel::power(double kappa, double psi) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    std::ostringstream os;
    os << "power semivariogram: kappa must be finite and > 0, got " << kappa;
    throw_domain(os.str());
  }
  if (!(psi > 0.0 && psi <= 2.0)) {
    std::ostringstream os;
    os << "power semivariogram: psi must lie in (0, 2], got " << psi;
    throw_domain(os.str());
  }
  return SemivariogramModel(Kind::Power, {kappa, psi, 0.0});
}

SemivariogramModel SemivariogramModel::smith(double s11, double s12, double s22) {
  const double det = s11 * s22 - s12 * s12;
  if (!(s11 > 0.0) || !(det > 0.0) || !std::isfinite(det)) {
    std::ostringstream os;
    os << "smith semivariogram: covariance [[" << s11 << ", " << s12 << "], [" << s12 << ", "
       << s22 << "]] is not positive definite";
    throw_domain(os.str());
  }
  SemivariogramModel m(Kind::Smith, {s11, s12, s22});
  m.inv_ = {s22 / det, -s12 / det, s11 / det};
  return m;
}

double SemivariogramModel::gamma(Vec2 lag) const {
  if (kind_ == Kind::Power) {
    const double r = std::hypot(lag[0], lag[1]);
    if (r == 0.0) return 0.0;
    return std::pow(r / p_[0], p_[1]);
  }
  const double q = inv_[0] * lag[0] * lag[0] + 2.0 * inv_[1] * lag[0] * lag[1] +
                   inv_[2] * lag[1] * lag[1];
  return 0.5 * q;
}

double lag_to_h(Vec2 lag, const SemivariogramModel& model) {
  return std::sqrt(2.0 * model.gamma(lag));
}

double dependence_measure_h(const MarginPowerSpec& margin, const HrParams& p,
                            const QuadratureSpec& q, CovMethod method) {
  if (p.is_independent()) return 0.0;
  if (p.h() == 0.0) return 1.0;
  return cov_gev_powers(margin, margin, p, q, method) / var_gev_power(margin, q, method);
}

double dependence_measure(const BrownResnickSpec& spec, Vec2 x1, Vec2 x2, const QuadratureSpec& q,
                          CovMethod method) {
  const double h = lag_to_h({x2[0] - x1[0], x2[1] - x1[1]}, spec.model);
  if (!std::isfinite(h)) return dependence_measure_h(spec.margin, HrParams::independent(), q, method);
  return dependence_measure_h(spec.margin, HrParams::finite(h), q, method);
}

double corr_nonstationary(const SemivariogramModel& model, const SiteMargin& a, const SiteMargin& b,
                          const QuadratureSpec& q) {
  const double h = lag_to_h({b.site[0] - a.site[0], b.site[1] - a.site[1]}, model);
  const HrParams p = std::isfinite(h) ? HrParams::finite(h) : HrParams::independent();
  return corr_gev_powers(a.margin, b.margin, p, q);
}

namespace {

void check_distances(const std::vector<double>& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] >= 0.0) || !std::isfinite(d[i])) throw_domain("distances must be finite and >= 0");
    if (i > 0 && d[i] < d[i - 1]) throw_domain("distances must be sorted in ascending order");
  }
}

Vec2 along(Vec2 dir, double d) { return {dir[0] * d, dir[1] * d}; }

Vec2 unit(Vec2 dir) {
  const double n = std::hypot(dir[0], dir[1]);
  if (!(n > 0.0) || !std::isfinite(n)) throw_domain("direction must be a nonzero finite vector");
  return {dir[0] / n, dir[1] / n};
}

}  // namespace

CorrelationCurve correlation_curve(const BrownResnickSpec& spec, const std::vector<double>& distances,
                                   const QuadratureSpec& q, int threads, Vec2 direction) {
  check_distances(distances);
  const Vec2 u = unit(direction);
  CorrelationCurve c;
  c.distances = distances;
  c.values.assign(distances.size(), 0.0);
  parallel_for(distances.size(), threads, [&](std::size_t i) {
    c.values[i] = dependence_measure(spec, {0.0, 0.0}, along(u, distances[i]), q);
  });
  return c;
}

double threshold_distance(const BrownResnickSpec& spec, double level, const QuadratureSpec& q,
                          double distance_tol, Vec2 direction) {
  if (!(level > 0.0 && level < 1.0)) throw_domain("threshold level must lie in (0, 1)");
  const Vec2 u = unit(direction);
  auto f = [&](double d) { return dependence_measure(spec, {0.0, 0.0}, along(u, d), q) - level; };
  double lo = 0.0;
  double hi = 1.0;
  double f_hi = f(hi);
  while (f_hi >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw Error(ErrorKind::NonConvergence, "threshold_distance: no crossing below 1e9");
    f_hi = f(hi);
  }
  const double f_lo = lo == 0.0 ? 1.0 - level : f(lo);
  std::uintmax_t iters = 200;
  auto tol = [&](double a, double b) { return std::abs(b - a) <= distance_tol * std::max(1.0, a); };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
  if (iters >= 200) throw Error(ErrorKind::NonConvergence, "threshold_distance: root search did not converge");
  return 0.5 * (r.first + r.second);
}

PowerDistanceSurface power_distance_surface(const BrownResnickSpec& spec,
                                            const std::vector<double>& distances,
                                            const std::vector<int>& betas, const QuadratureSpec& q,
                                            int threads) {
  check_distances(distances);
  std::vector<MarginPowerSpec> margins;
  margins.reserve(betas.size());
  for (int b : betas) margins.emplace_back(spec.margin.gev, IntegerPower(b));
  PowerDistanceSurface s;
  s.distances = distances;
  s.betas = betas;
  s.values.assign(distances.size() * betas.size(), 0.0);
  parallel_for(s.values.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / betas.size();
    const std::size_t j = k % betas.size();
    const BrownResnickSpec cell{spec.model, margins[j]};
    s.values[k] = dependence_measure(cell, {0.0, 0.0}, {distances[i], 0.0}, q);
  });
  return s;
}

}  // namespace hrcorr
