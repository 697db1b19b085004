#include "numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace hrcorr {

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << "gamma_fn: argument must be finite and > 0, got " << x;
    throw_domain(os.str());
  }
  const double g = std::tgamma(x);
#ifdef HRCORR_GAMMA_MUTATION
  // Mutation-testing build: a deliberately wrong gamma function.
  return g * (1.0 + (HRCORR_GAMMA_MUTATION));
#else
  return g;
#endif
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double log_norm_cdf(double x) {
  if (x > 5.0) {
    // Phi(x) = 1 - Phi(-x) with Phi(-x) tiny.
    return std::log1p(-0.5 * std::erfc(x * 0.70710678118654752440));
  }
  if (x > -35.0) {
    return std::log(0.5 * std::erfc(-x * 0.70710678118654752440));
  }
  // Asymptotic expansion of the Mills ratio; at |x| >= 35 the truncation
  // error of the series below is under 1e-17.
  const double r = 1.0 / (x * x);
  double series = 1.0;
  double term = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * r;
    series += term;
  }
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > 62) {
    throw_domain("binomial: need 0 <= k <= n <= 62");
  }
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c * (n - k + i) / i is exact at every step.
    c = c / static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n - k + i) +
        c % static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n - k + i) /
            static_cast<std::uint64_t>(i);
  }
  return c;
}

// ---------------------------------------------------------------------------

namespace {

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace

DoubleDouble dd_add(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

DoubleDouble dd_mul(DoubleDouble a, DoubleDouble b) {
  DoubleDouble p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

DoubleDouble dd_div(DoubleDouble a, DoubleDouble b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = dd_add(a, dd_mul(b, dd(-q1)));
  const double q2 = r.hi / b.hi;
  r = dd_add(r, dd_mul(b, dd(-q2)));
  const double q3 = r.hi / b.hi;
  return dd_add(quick_two_sum(q1, q2), dd(q3));
}

DoubleDouble dd_pow(DoubleDouble a, int n) {
  DoubleDouble result = dd(1.0);
  DoubleDouble base = a;
  while (n > 0) {
    if (n & 1) result = dd_mul(result, base);
    base = dd_mul(base, base);
    n >>= 1;
  }
  return result;
}

double CompensatedSum::sorted_sum() const {
  std::vector<DoubleDouble> sorted = terms_;
  std::sort(sorted.begin(), sorted.end(), [](const DoubleDouble& x, const DoubleDouble& y) {
    return std::abs(x.hi) > std::abs(y.hi);
  });
  DoubleDouble acc;
  for (const auto& t : sorted) acc = dd_add(acc, t);
  return acc.value();
}

double CompensatedSum::abs_sum() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.hi);
  return s;
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 10/21 (QUADPACK qk21 constants).

namespace {

constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980721859, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the nodes kXgk[1], kXgk[3], ..., kXgk[9].
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

enum class MapKind { Identity, RightTail, LeftTail };

struct Map {
  MapKind kind = MapKind::Identity;
  double anchor = 0.0;
};

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
  double error = 0.0;
  double floor = 0.0;  // roundoff floor of the error estimate
  int map = 0;
  bool frozen = false;
  [[nodiscard]] double reducible() const { return frozen ? 0.0 : error - floor; }
};

class Adaptive {
 public:
  Adaptive(const Integrand& f, const QuadratureSpec& spec) : f_(f), spec_(spec) {
    spec_.validate();
  }

  int add_map(Map m) {
    maps_.push_back(m);
    return static_cast<int>(maps_.size()) - 1;
  }

  void add_panel(double lo, double hi, int map) {
    Panel p{lo, hi, 0, 0, 0, map, false};
    evaluate(p);
    panels_.push_back(p);
  }

  QuadratureResult run() {
    for (;;) {
      double total = 0.0;
      double comp = 0.0;
      double err = 0.0;
      double floor = 0.0;
      for (const auto& p : panels_) {
        // Neumaier summation of panel values.
        const double t = total + p.value;
        comp += std::abs(total) >= std::abs(p.value) ? (total - t) + p.value
                                                      : (p.value - t) + total;
        total = t;
        err += p.error;
        floor += p.floor;
      }
      total += comp;
      const double tol = std::max(spec_.absolute_tolerance, spec_.relative_tolerance * std::abs(total));
      if (err <= tol || err <= 2.0 * floor) {
        return {total, err, static_cast<int>(panels_.size()), evaluations_};
      }
      auto worst = std::max_element(panels_.begin(), panels_.end(),
                                    [](const Panel& a, const Panel& b) {
                                      return a.reducible() < b.reducible();
                                    });
      if (worst->reducible() <= 0.0) {
        return {total, err, static_cast<int>(panels_.size()), evaluations_};
      }
      if (static_cast<int>(panels_.size()) >= spec_.max_subdivisions) {
        std::ostringstream os;
        os << "quadrature did not converge after " << spec_.max_subdivisions
           << " subdivisions (estimate " << total << ", error " << err << ", tolerance " << tol
           << ")";
        throw Error(ErrorKind::NonConvergence, os.str());
      }
      const double mid = 0.5 * (worst->lo + worst->hi);
      if (!(mid > worst->lo && mid < worst->hi)) {
        worst->frozen = true;
        continue;
      }
      Panel right{mid, worst->hi, 0, 0, 0, worst->map, false};
      worst->hi = mid;
      evaluate(*worst);
      evaluate(right);
      panels_.push_back(right);
    }
  }

 private:
  double mapped(double t, const Map& m) {
    double x = t;
    double jac = 1.0;
    switch (m.kind) {
      case MapKind::Identity:
        break;
      case MapKind::RightTail: {
        const double d = 1.0 - t;
        x = m.anchor + t / d;
        jac = 1.0 / (d * d);
        break;
      }
      case MapKind::LeftTail: {
        const double d = 1.0 - t;
        x = m.anchor - t / d;
        jac = 1.0 / (d * d);
        break;
      }
    }
    const double fx = f_(x);
    ++evaluations_;
    if (std::isnan(fx)) {
      std::ostringstream os;
      os << "integrand produced NaN at x = " << x;
      throw Error(ErrorKind::NonConvergence, os.str());
    }
    if (fx == 0.0) return 0.0;  // avoids 0 * inf at the far ends of a tail map
    return fx * jac;
  }

  void evaluate(Panel& p) {
    const Map& m = maps_[static_cast<std::size_t>(p.map)];
    const double center = 0.5 * (p.lo + p.hi);
    const double half = 0.5 * (p.hi - p.lo);
    const double fc = mapped(center, m);
    double resg = 0.0;
    double resk = fc * kWgk[10];
    double resabs = std::abs(resk);
    std::array<double, 10> f1{};
    std::array<double, 10> f2{};
    for (int j = 0; j < 10; ++j) {
      const double dx = half * kXgk[static_cast<std::size_t>(j)];
      f1[static_cast<std::size_t>(j)] = mapped(center - dx, m);
      f2[static_cast<std::size_t>(j)] = mapped(center + dx, m);
      const double pair = f1[static_cast<std::size_t>(j)] + f2[static_cast<std::size_t>(j)];
      resk += kWgk[static_cast<std::size_t>(j)] * pair;
      resabs += kWgk[static_cast<std::size_t>(j)] *
                (std::abs(f1[static_cast<std::size_t>(j)]) + std::abs(f2[static_cast<std::size_t>(j)]));
      if (j % 2 == 1) resg += kWg[static_cast<std::size_t>(j / 2)] * pair;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) {
      resasc += kWgk[static_cast<std::size_t>(j)] *
                (std::abs(f1[static_cast<std::size_t>(j)] - reskh) +
                 std::abs(f2[static_cast<std::size_t>(j)] - reskh));
    }
    const double dhalf = std::abs(half);
    p.value = resk * half;
    resabs *= dhalf;
    resasc *= dhalf;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    // values this small lose digits to gradual underflow inside the integrand
    p.floor = std::max(50.0 * kEps * resabs, 1e-270 * dhalf);
    p.error = std::max(err, p.floor);
    if (!std::isfinite(p.value) || !std::isfinite(p.error)) {
      throw Error(ErrorKind::NonConvergence, "quadrature produced a non-finite panel value");
    }
  }

  const Integrand& f_;
  QuadratureSpec spec_;
  std::vector<Map> maps_;
  std::vector<Panel> panels_;
  long evaluations_ = 0;
};

}  // namespace

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0) || !(relative_tolerance <= 1e-2)) {
    throw_domain("quadrature: relative_tolerance must lie in (0, 1e-2]");
  }
  if (!(absolute_tolerance >= 0.0)) throw_domain("quadrature: absolute_tolerance must be >= 0");
  if (max_subdivisions < 1) throw_domain("quadrature: max_subdivisions must be >= 1");
}

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw_domain("integrate: bounds must be finite");
  if (a == b) return {};
  Adaptive ad(f, spec);
  const int id = ad.add_map({MapKind::Identity, 0.0});
  ad.add_panel(a, b, id);
  return ad.run();
}

QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSpec& spec) {
  Adaptive ad(f, spec);
  const int id = ad.add_map({MapKind::RightTail, 0.0});
  ad.add_panel(0.0, 0.5, id);
  ad.add_panel(0.5, 1.0, id);
  return ad.run();
}

QuadratureResult integrate_real_line(const Integrand& f, std::span<const double> breakpoints,
                                     const QuadratureSpec& spec) {
  std::vector<double> pts(breakpoints.begin(), breakpoints.end());
  for (double p : pts) {
    if (!std::isfinite(p)) throw_domain("integrate_real_line: breakpoints must be finite");
  }
  if (pts.empty()) pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  Adaptive ad(f, spec);
  const int left = ad.add_map({MapKind::LeftTail, pts.front()});
  const int right = ad.add_map({MapKind::RightTail, pts.back()});
  const int id = ad.add_map({MapKind::Identity, 0.0});
  ad.add_panel(0.0, 1.0, left);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) ad.add_panel(pts[i], pts[i + 1], id);
  ad.add_panel(0.0, 1.0, right);
  return ad.run();
}

}  // namespace hrcorr
