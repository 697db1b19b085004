#include "gev_powers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace hrcorr {

namespace {

constexpr double kClosedFormFloor = 1e-14;

DoubleDouble neg(DoubleDouble a) { return {-a.hi, -a.lo}; }

// Binomial weight of the k-th term of one margin: C(beta, k) (eta - tau/xi)^k (tau/xi)^(beta-k).
struct MarginExpansion {
  int beta;
  double xi;
  std::vector<DoubleDouble> factor;  // indexed by k
  std::vector<double> gamma;         // Gamma(1 - (beta - k) xi)

  explicit MarginExpansion(const MarginPowerSpec& s) : beta(s.beta()), xi(s.gev.xi) {
    if (xi == 0.0) throw_domain("closed-form GEV-power sums need xi != 0");
    const DoubleDouble r = dd_div(dd(s.gev.tau), dd(xi));
    const DoubleDouble a = dd_add(dd(s.gev.eta), neg(r));
    factor.resize(beta + 1);
    gamma.resize(beta + 1);
    for (int k = 0; k <= beta; ++k) {
      const DoubleDouble c = dd(static_cast<double>(binomial(beta, k)));
      factor[k] = dd_mul(c, dd_mul(dd_pow(a, k), dd_pow(r, beta - k)));
      gamma[k] = gamma_fn(1.0 - exponent(k));
    }
  }
  [[nodiscard]] double exponent(int k) const { return (beta - k) * xi; }
};

// x -> (eta + tau (x^xi - 1)/xi)^beta written in log x.
struct PowerOfGev {
  double eta, tau, xi;
  int beta;
  explicit PowerOfGev(const MarginPowerSpec& s)
      : eta(s.gev.eta), tau(s.gev.tau), xi(s.gev.xi), beta(s.beta()) {}
  double operator()(double log_z) const {
    const double bc = xi == 0.0 ? log_z : std::expm1(xi * log_z) / xi;
    return std::pow(eta + tau * bc, beta);
  }
};

// Density of y = log E with E ~ Exp(1); log Z = -y for Z standard Frechet.
inline double gumbel_weight(double y) {
  const double e = std::exp(y);
  if (!std::isfinite(e)) return 0.0;
  return std::exp(y - e);
}

const std::array<double, 5> kRadialBreaks{-3.0, -1.0, 0.0, 1.0, 2.0};

double mean_resummed(const MarginPowerSpec& s, const QuadratureSpec& q) {
  const PowerOfGev f(s);
  const Integrand g = [&](double y) {
    const double w = gumbel_weight(y);
    return w == 0.0 ? 0.0 : w * f(-y);
  };
  return integrate_real_line(g, kRadialBreaks, q).value;
}

double var_resummed(const MarginPowerSpec& s, const QuadratureSpec& q) {
  const PowerOfGev f(s);
  const double m = mean_resummed(s, q);
  const Integrand g = [&](double y) {
    const double w = gumbel_weight(y);
    if (w == 0.0) return 0.0;
    const double d = f(-y) - m;
    return w * d * d;
  };
  return integrate_real_line(g, kRadialBreaks, q).value;
}

double cov_resummed(const MarginPowerSpec& s1, const MarginPowerSpec& s2, const HrParams& p,
                    const QuadratureSpec& q) {
  if (p.is_independent()) return 0.0;
  const PowerOfGev f1(s1);
  const PowerOfGev f2(s2);
  const double m1 = mean_resummed(s1, q);
  const double m2 = mean_resummed(s2, q);
  const double h = p.h();
  if (h == 0.0) {
    const Integrand g = [&](double y) {
      const double w = gumbel_weight(y);
      return w == 0.0 ? 0.0 : w * (f1(-y) - m1) * (f2(-y) - m2);
    };
    return integrate_real_line(g, kRadialBreaks, q).value;
  }
  const double scale = std::sqrt(var_resummed(s1, q) * var_resummed(s2, q));

  QuadratureSpec outer = q;
  outer.absolute_tolerance = std::max(q.absolute_tolerance, q.relative_tolerance * scale);
  const Integrand g = [&](double s) {
    const auto aw = detail::angular_weights(s, h);
    const double size = std::exp(aw.log_size - 2.0 * aw.log_c1);
    const double shape = std::exp(aw.log_shape - aw.log_c1);
    if (size + shape == 0.0) return 0.0;
    const double l1 = aw.log_c1;
    const Integrand inner = [&](double y) {
      const double w = gumbel_weight(y);
      if (w == 0.0) return 0.0;
      const double lz1 = l1 - y;
      return w * (size * std::exp(y) + shape) * (f1(lz1) - m1) * (f2(lz1 + s) - m2);
    };
    QuadratureSpec in = q;
    in.absolute_tolerance = 0.01 * q.relative_tolerance * scale * (size + shape);
    return integrate_real_line(inner, kRadialBreaks, in).value;
  };
  return integrate_real_line(g, detail::angular_breakpoints(h), outer).value;
}

double var_closed(const MarginPowerSpec& s, double* cancellation) {
  const MarginExpansion m(s);
  CompensatedSum sum;
  for (int k1 = 0; k1 < m.beta; ++k1) {
    for (int k2 = 0; k2 < m.beta; ++k2) {
      const double g_joint = gamma_fn(1.0 - m.exponent(k1) - m.exponent(k2));
      const DoubleDouble bracket =
          dd_add(dd(g_joint), neg(dd_mul(dd(m.gamma[k1]), dd(m.gamma[k2]))));
      sum.add(dd_mul(dd_mul(m.factor[k1], m.factor[k2]), bracket));
    }
  }
  const double v = sum.sorted_sum();
  if (cancellation) {
    double a = 0.0;
    for (int k1 = 0; k1 < m.beta; ++k1)
      for (int k2 = 0; k2 < m.beta; ++k2)
        a += std::abs(m.factor[k1].hi * m.factor[k2].hi) *
             gamma_fn(1.0 - m.exponent(k1) - m.exponent(k2));
    *cancellation = a / std::abs(v);
  }
  return v;
}

bool has_zero_shape(const MarginPowerSpec& s) { return s.gev.xi == 0.0; }

// Closed-form covariance; i_tol is the tolerance used for each I integral.
double cov_closed(const MarginPowerSpec& s1, const MarginPowerSpec& s2, const HrParams& p,
                  const QuadratureSpec& q, std::vector<CovTerm>* terms) {
  const MarginExpansion e1(s1);
  const MarginExpansion e2(s2);
  if (p.is_independent()) return 0.0;
  CompensatedSum sum;
  for (int k1 = 0; k1 <= e1.beta; ++k1) {
    for (int k2 = 0; k2 <= e2.beta; ++k2) {
      const double a1 = e1.exponent(k1);
      const double a2 = e2.exponent(k2);
      const DoubleDouble b = dd_mul(e1.factor[k1], e2.factor[k2]);
      const DoubleDouble gg = dd_mul(dd(e1.gamma[k1]), dd(e2.gamma[k2]));
      double iv = gg.value();
      DoubleDouble bracket{};
      if (k1 != e1.beta && k2 != e2.beta) {
        iv = i_integral(SimplePowerPair(a1, a2), p, q);
        bracket = dd_add(dd(iv), neg(gg));
      }
      const DoubleDouble term = dd_mul(b, bracket);
      sum.add(term);
      if (terms) {
        terms->push_back(
            {k1, k2, b.value(), iv, e1.gamma[k1], e2.gamma[k2], term.value()});
      }
    }
  }
  return sum.sorted_sum();
}

double cancellation_with(const MarginPowerSpec& s1, const MarginPowerSpec& s2, double v1,
                         double v2) {
  const MarginExpansion e1(s1);
  const MarginExpansion e2(s2);
  double a = 0.0;
  for (int k1 = 0; k1 < e1.beta; ++k1)
    for (int k2 = 0; k2 < e2.beta; ++k2)
      a += std::abs(e1.factor[k1].hi * e2.factor[k2].hi) *
           gamma_fn(1.0 - e1.exponent(k1) - e2.exponent(k2));
  return a / std::sqrt(v1 * v2);
}

QuadratureSpec tightened(const QuadratureSpec& q, double cancellation) {
  QuadratureSpec t = q;
  t.relative_tolerance =
      std::clamp(q.relative_tolerance / std::max(cancellation, 1.0), kClosedFormFloor,
                 q.relative_tolerance);
  return t;
}

}  // namespace

GevParams::GevParams(double eta_, double tau_, double xi_) : eta(eta_), tau(tau_), xi(xi_) {
  if (!std::isfinite(eta) || !std::isfinite(xi) || !(tau > 0.0) || !std::isfinite(tau)) {
    std::ostringstream os;
    os << "GEV parameters need finite eta, xi and tau > 0, got eta=" << eta << " tau=" << tau
       << " xi=" << xi;
    throw_domain(os.str());
  }
}

IntegerPower::IntegerPower(int b) : beta(b) {
  if (b < 1 || b > kMax) {
    std::ostringstream os;
    os << "power beta must be an integer in [1, " << kMax << "], got " << b;
    throw_domain(os.str());
  }
}

MarginPowerSpec::MarginPowerSpec(GevParams g, IntegerPower p) : gev(g), power(p) {
  if (!(p.beta * g.xi < 0.5)) {
    std::ostringstream os;
    os << "beta * xi < 1/2 violated: beta=" << p.beta << " xi=" << g.xi
       << " (Var(X^beta) is infinite)";
    throw_constraint(os.str());
  }
}

const char* to_string(CovMethod m) {
  switch (m) {
    case CovMethod::Auto: return "auto";
    case CovMethod::ClosedForm: return "closed_form";
    case CovMethod::Resummed: return "resummed";
  }
  return "?";
}

double gev_transform(double z, const GevParams& g) {
  if (!(z > 0.0) || !std::isfinite(z)) throw_domain("gev_transform: z must be finite and > 0");
  if (g.xi == 0.0) return g.eta + g.tau * std::log(z);
  return g.eta + g.tau * std::expm1(g.xi * std::log(z)) / g.xi;
}

double b_coeff(int k1, int k2, const MarginPowerSpec& s1, const MarginPowerSpec& s2) {
  if (k1 < 0 || k1 > s1.beta() || k2 < 0 || k2 > s2.beta())
    throw_domain("b_coeff: index out of range");
  const MarginExpansion e1(s1);
  const MarginExpansion e2(s2);
  return dd_mul(e1.factor[k1], e2.factor[k2]).value();
}

double b_coeff_same(int k1, int k2, const MarginPowerSpec& s) {
  const int beta = s.beta();
  if (k1 < 0 || k1 > beta || k2 < 0 || k2 > beta) throw_domain("b_coeff_same: index out of range");
  if (s.gev.xi == 0.0) throw_domain("closed-form GEV-power sums need xi != 0");
  const DoubleDouble r = dd_div(dd(s.gev.tau), dd(s.gev.xi));
  const DoubleDouble a = dd_add(dd(s.gev.eta), neg(r));
  const DoubleDouble c = dd(static_cast<double>(binomial(beta, k1) * binomial(beta, k2)));
  return dd_mul(c, dd_mul(dd_pow(a, k1 + k2), dd_pow(r, 2 * beta - k1 - k2))).value();
}

double mean_gev_power(const MarginPowerSpec& s) {
  if (has_zero_shape(s)) return mean_resummed(s, QuadratureSpec::headline());
  const MarginExpansion m(s);
  CompensatedSum sum;
  for (int k = 0; k <= m.beta; ++k) sum.add(dd_mul(m.factor[k], dd(m.gamma[k])));
  return sum.sorted_sum();
}

double var_gev_power(const MarginPowerSpec& s) {
  return var_gev_power(s, QuadratureSpec::headline(), CovMethod::Auto);
}

double var_gev_power(const MarginPowerSpec& s, const QuadratureSpec& q, CovMethod method) {
  q.validate();
  switch (method) {
    case CovMethod::ClosedForm: return var_closed(s, nullptr);
    case CovMethod::Resummed: return var_resummed(s, q);
    case CovMethod::Auto: break;
  }
  if (has_zero_shape(s)) return var_resummed(s, q);
  double amp = 0.0;
  const double v = var_closed(s, &amp);
  if (amp * kClosedFormFloor <= q.relative_tolerance) return v;
  return var_resummed(s, q);
}

double closed_form_cancellation(const MarginPowerSpec& s1, const MarginPowerSpec& s2,
                                const QuadratureSpec& q) {
  const double v1 = var_gev_power(s1, q, CovMethod::Auto);
  const double v2 = var_gev_power(s2, q, CovMethod::Auto);
  return cancellation_with(s1, s2, v1, v2);
}

double cov_gev_powers(const MarginPowerSpec& s1, const MarginPowerSpec& s2, const HrParams& p,
                      const QuadratureSpec& q, CovMethod method) {
  q.validate();
  switch (method) {
    case CovMethod::ClosedForm: return cov_closed(s1, s2, p, q, nullptr);
    case CovMethod::Resummed: return cov_resummed(s1, s2, p, q);
    case CovMethod::Auto: break;
  }
  if (p.is_independent()) return 0.0;
  if (has_zero_shape(s1) || has_zero_shape(s2)) return cov_resummed(s1, s2, p, q);
  const double amp = closed_form_cancellation(s1, s2, q);
  if (amp * kClosedFormFloor <= q.relative_tolerance)
    return cov_closed(s1, s2, p, tightened(q, amp), nullptr);
  return cov_resummed(s1, s2, p, q);
}

double corr_gev_powers(const MarginPowerSpec& s1, const MarginPowerSpec& s2, const HrParams& p,
                       const QuadratureSpec& q, CovMethod method) {
  const double c = cov_gev_powers(s1, s2, p, q, method);
  const double v1 = var_gev_power(s1, q, method);
  const double v2 = var_gev_power(s2, q, method);
  return c / std::sqrt(v1 * v2);
}

double g_function(const MarginPowerSpec& s, const HrParams& p, const QuadratureSpec& q,
                  CovMethod method) {
  q.validate();
  if (method == CovMethod::Auto) {
    if (has_zero_shape(s)) {
      method = CovMethod::Resummed;
    } else {
      const double amp = closed_form_cancellation(s, s, q);
      method = amp * kClosedFormFloor <= q.relative_tolerance ? CovMethod::ClosedForm
                                                               : CovMethod::Resummed;
    }
  }
  if (method == CovMethod::Resummed) {
    const double m = mean_resummed(s, q);
    return cov_resummed(s, s, p, q) + m * m;
  }
  if (p.is_independent()) return g_limit_infinity(s);
  const MarginExpansion e(s);
  CompensatedSum sum;
  for (int k1 = 0; k1 <= e.beta; ++k1) {
    for (int k2 = 0; k2 <= e.beta; ++k2) {
      const double a1 = e.exponent(k1);
      const double a2 = e.exponent(k2);
      double iv;
      if (k1 == e.beta || k2 == e.beta) {
        iv = gamma_fn(1.0 - a1 - a2);
      } else {
        iv = i_integral(SimplePowerPair(a1, a2), p, q);
      }
      sum.add(dd_mul(dd(b_coeff_same(k1, k2, s)), dd(iv)));
    }
  }
  return sum.sorted_sum();
}

double g_limit_zero(const MarginPowerSpec& s) {
  const MarginExpansion e(s);
  CompensatedSum sum;
  for (int k1 = 0; k1 <= e.beta; ++k1)
    for (int k2 = 0; k2 <= e.beta; ++k2)
      sum.add(dd_mul(dd_mul(e.factor[k1], e.factor[k2]),
                     dd(gamma_fn(1.0 - e.exponent(k1) - e.exponent(k2)))));
  return sum.sorted_sum();
}

double g_limit_infinity(const MarginPowerSpec& s) {
  const MarginExpansion e(s);
  CompensatedSum sum;
  for (int k1 = 0; k1 <= e.beta; ++k1)
    for (int k2 = 0; k2 <= e.beta; ++k2)
      sum.add(dd_mul(dd_mul(e.factor[k1], e.factor[k2]),
                     dd_mul(dd(e.gamma[k1]), dd(e.gamma[k2]))));
  return sum.sorted_sum();
}

double cov_same_margins(const MarginPowerSpec& s, const HrParams& p, const QuadratureSpec& q) {
  q.validate();
  if (p.is_independent()) return 0.0;
  const MarginExpansion e(s);
  CompensatedSum sum;
  for (int k1 = 0; k1 <= e.beta; ++k1) {
    for (int k2 = 0; k2 <= e.beta; ++k2) {
      const double a1 = e.exponent(k1);
      const double a2 = e.exponent(k2);
      const DoubleDouble b = dd(b_coeff_same(k1, k2, s));
      const DoubleDouble gg = dd_mul(dd(e.gamma[k1]), dd(e.gamma[k2]));
      const double iv = (k1 == e.beta || k2 == e.beta)
                            ? gamma_fn(1.0 - a1 - a2)
                            : i_integral(SimplePowerPair(a1, a2), p, q);
      sum.add(dd_mul(b, dd(iv)));
      sum.add(neg(dd_mul(b, gg)));
    }
  }
  return sum.sorted_sum();
}

double cov_gev_powers_gumbel_limit(const MarginPowerSpec& s1, const MarginPowerSpec& s2,
                                   const HrParams& p, const QuadratureSpec& q, double eps) {
  if (s1.gev.xi != 0.0 || s2.gev.xi != 0.0)
    throw_domain("gumbel limit needs xi = 0 on both margins (mixed zero/non-zero shapes are not supported)");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw_domain("gumbel limit: eps must be > 0");
  auto shifted = [](const MarginPowerSpec& s, double xi) {
    return MarginPowerSpec(GevParams(s.gev.eta, s.gev.tau, xi), s.power);
  };
  const double plus = cov_gev_powers(shifted(s1, eps), shifted(s2, eps), p, q);
  const double minus = cov_gev_powers(shifted(s1, -eps), shifted(s2, -eps), p, q);
  return 0.5 * (plus + minus);
}

CovBreakdown cov_breakdown(const MarginPowerSpec& s1, const MarginPowerSpec& s2,
                           const HrParams& p, const QuadratureSpec& q) {
  q.validate();
  CovBreakdown out;
  out.var1 = var_gev_power(s1, q, CovMethod::Auto);
  out.var2 = var_gev_power(s2, q, CovMethod::Auto);
  out.cov_resummed = cov_resummed(s1, s2, p, q);
  if (has_zero_shape(s1) || has_zero_shape(s2)) {
    out.method_used = CovMethod::Resummed;
    out.cov = out.cov_resummed;
  } else {
    out.cancellation = cancellation_with(s1, s2, out.var1, out.var2);
    const double closed = cov_closed(s1, s2, p, tightened(q, out.cancellation), &out.terms);
    if (out.cancellation * kClosedFormFloor <= q.relative_tolerance) {
      out.method_used = CovMethod::ClosedForm;
      out.cov = closed;
    } else {
      out.method_used = CovMethod::Resummed;
      out.cov = out.cov_resummed;
    }
  }
  out.corr = out.cov / std::sqrt(out.var1 * out.var2);
  return out;
}

}  // namespace hrcorr
