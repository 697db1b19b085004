#include "hr_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace hrcorr {

namespace {

inline double log_add_exp(double x, double y) {
  const double m = std::max(x, y);
  if (m == -INFINITY) return -INFINITY;
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

void require_positive(double z, const char* name) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << name << " must be finite and > 0, got " << z;
    throw_domain(os.str());
  }
}

}  // namespace

HrParams HrParams::finite(double h) {
  if (!(h >= 0.0) || !std::isfinite(h)) {
    std::ostringstream os;
    os << "HrParams: h must be finite and >= 0 (use HrParams::independent() for h = inf), got "
       << h;
    throw_domain(os.str());
  }
  return HrParams(h, false);
}

double HrParams::h() const {
  if (independent_) throw_domain("HrParams: h is infinite (independent state)");
  return h_;
}

SimplePowerPair::SimplePowerPair(double b1, double b2) : beta1(b1), beta2(b2) {
  if (!(b1 < 0.5) || !(b2 < 0.5) || !std::isfinite(b1) || !std::isfinite(b2)) {
    std::ostringstream os;
    os << "power pair (" << b1 << ", " << b2
       << ") violates beta1 < 1/2 and beta2 < 1/2 (second moments must exist)";
    throw_constraint(os.str());
  }
}

double hr_cdf(double z1, double z2, const HrParams& p) {
  require_positive(z1, "hr_cdf: z1");
  require_positive(z2, "hr_cdf: z2");
  if (p.is_independent()) return std::exp(-1.0 / z1 - 1.0 / z2);
  const double h = p.h();
  if (h == 0.0) return std::exp(-1.0 / std::min(z1, z2));
  const double r = std::log(z2 / z1) / h;
  const double w = 0.5 * h + r;
  const double v = 0.5 * h - r;
  return std::exp(-norm_cdf(v) / z2 - norm_cdf(w) / z1);
}

double hr_density(double z1, double z2, const HrParams& p) {
  require_positive(z1, "hr_density: z1");
  require_positive(z2, "hr_density: z2");
  if (p.is_independent() || p.h() == 0.0) {
    throw_domain("hr_density: no bivariate Lebesgue density for h = 0 or h = inf");
  }
  const double h = p.h();
  const double r = std::log(z2 / z1) / h;
  const double w = 0.5 * h + r;
  const double v = 0.5 * h - r;
  const double Pw = norm_cdf(w);
  const double Pv = norm_cdf(v);
  const double pw = norm_pdf(w);
  const double pv = norm_pdf(v);
  const double exponent = Pw / z1 + Pv / z2;
  const double f1 = Pw / (z1 * z1) + pw / (h * z1 * z1) - pv / (h * z1 * z2);
  const double f2 = Pv / (z2 * z2) + pv / (h * z2 * z2) - pw / (h * z1 * z2);
  const double f3 = v * pw / (h * h * z1 * z1 * z2) + w * pv / (h * h * z1 * z2 * z2);
  const double poly = f1 * f2 + f3;
  if (exponent < 700.0) return std::exp(-exponent) * poly;
  if (!(poly > 0.0) || !std::isfinite(poly)) return 0.0;
  return std::exp(std::log(poly) - exponent);
}

KernelC kernel_c(double theta, double h) {
  require_positive(theta, "kernel_c: theta");
  require_positive(h, "kernel_c: h");
  const double lt = std::log(theta) / h;
  const double a = 0.5 * h + lt;
  const double b = 0.5 * h - lt;
  const double Pa = norm_cdf(a);
  const double Pb = norm_cdf(b);
  const double pa = norm_pdf(a);
  const double pb = norm_pdf(b);
  KernelC k{};
  k.c1 = Pa + Pb / theta;
  k.c2 = (Pa + pa / h - pb / (h * theta)) *
         (Pb / (theta * theta) + pb / (h * theta * theta) - pa / (h * theta));
  k.c3 = b * pa / (h * h * theta) + a * pb / (h * h * theta * theta);
  return k;
}

namespace detail {

// With a = h/2 + s/h and b = h/2 - s/h one has phi(b) = theta phi(a), so the
// kernels reduce to C2 = Phi(a) Phi(b) / theta^2 and C3 = phi(a) / (h theta).
AngularWeights angular_weights(double s, double h) {
  const double a = 0.5 * h + s / h;
  const double b = 0.5 * h - s / h;
  const double lPa = log_norm_cdf(a);
  const double lPb = log_norm_cdf(b);
  AngularWeights w{};
  w.log_c1 = log_add_exp(lPa, lPb - s);
  w.log_size = lPa + lPb - s;
  w.log_shape = log_norm_pdf(a) - std::log(h);
  return w;
}

// The mass sits within a few h of s = 0. For small h a panel of length O(1)
// would hide it between Gauss-Kronrod nodes, so panels grow geometrically
// from h outwards.
std::vector<double> angular_breakpoints(double h) {
  std::vector<double> bp{0.0};
  for (double x = std::min(h, 1.0); x < 1.0; x *= 2.0) {
    bp.push_back(x);
    bp.push_back(-x);
  }
  for (double x : {1.0, std::max(h, 1.0)}) {
    bp.push_back(x);
    bp.push_back(-x);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

}  // namespace detail

double i_integral(const SimplePowerPair& pair, const HrParams& p, const QuadratureSpec& q) {
  const double b1 = pair.beta1;
  const double b2 = pair.beta2;
  const double sigma = b1 + b2;
  if (p.is_independent()) return gamma_fn(1.0 - b1) * gamma_fn(1.0 - b2);
  const double h = p.h();
  if (h == 0.0) return gamma_fn(1.0 - sigma);

  const double g2 = gamma_fn(2.0 - sigma);
  const double g1 = gamma_fn(1.0 - sigma);
  const Integrand f = [=](double s) {
    const auto w = detail::angular_weights(s, h);
    const double t1 = std::exp(b2 * s + w.log_size + (sigma - 2.0) * w.log_c1);
    const double t2 = std::exp(b2 * s + w.log_shape + (sigma - 1.0) * w.log_c1);
    return t1 * g2 + t2 * g1;
  };
  const auto bp = detail::angular_breakpoints(h);
  return integrate_real_line(f, bp, q).value;
}

double i_integral_symmetric(double beta, const HrParams& p, const QuadratureSpec& q) {
  return i_integral(SimplePowerPair(beta, beta), p, q);
}

double cov_simple_powers(const SimplePowerPair& pair, const HrParams& p, const QuadratureSpec& q) {
  if (p.is_independent()) return 0.0;
  return i_integral(pair, p, q) - gamma_fn(1.0 - pair.beta1) * gamma_fn(1.0 - pair.beta2);
}

}  // namespace hrcorr
