#include "oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "brown_resnick.hpp"
#include "defaults.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace hrcorr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::size_t kChunk = 1 << 16;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double frechet_from_uniform(double u) { return -1.0 / std::log(u); }

void require_finite_h(const HrParams& p, const char* who) {
  if (p.is_independent() || p.h() == 0.0) {
    std::ostringstream os;
    os << who << ": needs 0 < h < inf";
    throw_domain(os.str());
  }
}

// log P(Z2 <= z1 e^r | Z1 = z1)
inline double log_cond_cdf(double r, double inv_z1, double h) {
  const double w = 0.5 * h + r / h;
  const double v = 0.5 * h - r / h;
  const double tail = std::exp(log_norm_cdf(v) - r);
  return log_norm_cdf(w) + (norm_cdf(-w) - tail) * inv_z1;
}

inline double dlog_cond_cdf(double r, double inv_z1, double h) {
  const double w = 0.5 * h + r / h;
  const double v = 0.5 * h - r / h;
  return std::exp(log_norm_pdf(w) - log_norm_cdf(w)) / h + std::exp(log_norm_cdf(v) - r) * inv_z1;
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) { return mix64(seed ^ mix64(k + 1)); }

}  // namespace

// l(z1, z2) z1 z2 at z = e^x: the density expression expanded term by term
// and rescaled so that nothing underflows far out in the tails.
double density_log_coords(double x1, double x2, double h) {
  const double r = x2 - x1;
  const double w = 0.5 * h + r / h;
  const double v = 0.5 * h - r / h;
  const double inv1 = std::exp(-x1);
  const double inv2 = std::exp(-x2);
  const double Pw = norm_cdf(w);
  const double Pv = norm_cdf(v);
  const double lpw = log_norm_pdf(w);
  const double lpv = log_norm_pdf(v);
  const double exponent = Pw * inv1 + Pv * inv2;
  if (exponent > 745.0) return 0.0;
  const double a1 = Pw + std::exp(lpw) / h - std::exp(lpv - r) / h;
  const double a2 = Pv + std::exp(lpv) / h - std::exp(lpw + r) / h;
  const double b = (v * std::exp(lpw - x1) + w * std::exp(lpv - x2)) / (h * h);
  return std::exp(-exponent) * (a1 * a2 * std::exp(-x1 - x2) + b);
}

void McConfig::validate() const {
  if (n_samples < 2) throw_domain("mc.n_samples must be >= 2");
  if (threads < 0) throw_domain("mc.threads must be >= 0");
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t z = mix64(mix64(seed) + (counter + 1) * kGolden);
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

double hr_conditional_cdf(double z2, double z1, double h) {
  if (!(z1 > 0.0) || !(z2 > 0.0)) throw_domain("hr_conditional_cdf: z1, z2 must be > 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw_domain("hr_conditional_cdf: needs 0 < h < inf");
  return std::exp(log_cond_cdf(std::log(z2 / z1), 1.0 / z1, h));
}

double hr_conditional_quantile(double z1, double u, double h) {
  if (!(u > 0.0 && u < 1.0)) throw_domain("hr_conditional_quantile: u must lie in (0, 1)");
  if (!(z1 > 0.0) || !std::isfinite(z1)) throw_domain("hr_conditional_quantile: z1 must be finite and > 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw_domain("hr_conditional_quantile: h must be finite and > 0");
  const double lz1 = std::log(z1);
  const double inv_z1 = 1.0 / z1;
  const double lu = std::log(u);
  auto g = [&](double r) { return log_cond_cdf(r, inv_z1, h) - lu; };

  double lo = std::log(1e-8) - lz1;
  double hi = std::log(1e8) - lz1;
  double width = hi - lo;
  int expand = 0;
  while (g(lo) > 0.0) {
    lo -= width;
    width *= 2.0;
    if (++expand > 60) throw Error(ErrorKind::NonConvergence, "conditional inversion: lower bracket");
  }
  width = hi - lo;
  while (g(hi) < 0.0) {
    hi += width;
    width *= 2.0;
    if (++expand > 120) throw Error(ErrorKind::NonConvergence, "conditional inversion: upper bracket");
  }

  double r = std::clamp(0.0, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double gr = g(r);
    if (std::abs(std::expm1(gr)) * u <= 1e-12) return std::exp(r + lz1);
    if (gr < 0.0) lo = r; else hi = r;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(r))) return std::exp(r + lz1);
    double next = r - gr / dlog_cond_cdf(r, inv_z1, h);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
  }
  std::ostringstream os;
  os << "conditional inversion failed for z1=" << z1 << " u=" << u << " h=" << h;
  throw Error(ErrorKind::NonConvergence, os.str());
}

HrSampler::HrSampler(const HrParams& p, const McConfig& cfg) : h_(0.0), cfg_(cfg) {
  require_finite_h(p, "sample_hr");
  cfg.validate();
  h_ = p.h();
}

HrSample HrSampler::draw(std::uint64_t i, bool swap) const {
  double u1;
  if (cfg_.antithetic) {
    u1 = counter_uniform(cfg_.seed, 2 * (i & ~std::uint64_t{1}));
    if (i & 1) u1 = 1.0 - u1;
  } else {
    u1 = counter_uniform(cfg_.seed, 2 * i);
  }
  const double u2 = counter_uniform(cfg_.seed, 2 * i + 1);
  const double a = frechet_from_uniform(u1);
  const double b = hr_conditional_quantile(a, u2, h_);
  return swap ? HrSample{b, a} : HrSample{a, b};
}

HrSample HrSampler::operator()(std::uint64_t i) const { return draw(i, false); }

std::vector<HrSample> sample_hr(const HrParams& p, const McConfig& cfg) {
  const HrSampler s(p, cfg);
  std::vector<HrSample> out(cfg.n_samples);
  const std::size_t chunks = (out.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    const std::size_t end = std::min(out.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) out[i] = s(i);
  });
  return out;
}

std::vector<double> sample_frechet(const McConfig& cfg) {
  cfg.validate();
  std::vector<double> out(cfg.n_samples);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double u = counter_uniform(cfg.seed, 2 * (cfg.antithetic ? (i & ~std::size_t{1}) : i));
    if (cfg.antithetic && (i & 1)) u = 1.0 - u;
    out[i] = frechet_from_uniform(u);
  }
  return out;
}

McEstimate mc_covariance(const std::vector<HrSample>& s, const std::function<double(double)>& f1,
                         const std::function<double(double)>& f2) {
  const std::size_t n = s.size();
  if (n < 2) throw_domain("mc_covariance: need at least 2 samples");
  std::vector<double> a(n), b(n);
  long double sa = 0, sb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = f1(s[i].z1);
    b[i] = f2(s[i].z2);
    sa += a[i];
    sb += b[i];
  }
  const double ma = static_cast<double>(sa / n);
  const double mb = static_cast<double>(sb / n);
  long double sp = 0, sp2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double p = static_cast<long double>(a[i] - ma) * (b[i] - mb);
    sp += p;
    sp2 += p * p;
  }
  const long double mean = sp / n;
  const long double var = (sp2 / n - mean * mean) * n / (n - 1);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(std::max(var, 0.0L) / n))};
}

McEstimate mc_variance(const std::vector<double>& z, const std::function<double(double)>& f) {
  const std::size_t n = z.size();
  if (n < 2) throw_domain("mc_variance: need at least 2 samples");
  std::vector<double> y(n);
  long double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = f(z[i]);
    s += y[i];
  }
  const double m = static_cast<double>(s / n);
  long double s2 = 0, s4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = static_cast<long double>(y[i] - m) * (y[i] - m);
    s2 += d;
    s4 += d * d;
  }
  const long double mean = s2 / n;
  const long double var = (s4 / n - mean * mean) * n / (n - 1);
  return {static_cast<double>(mean * n / (n - 1)), static_cast<double>(std::sqrt(std::max(var, 0.0L) / n))};
}

double expect_by_density(const std::function<double(double, double)>& g, const HrParams& p,
                         const QuadratureSpec& q) {
  require_finite_h(p, "expect_by_density");
  const double h = p.h();
  const std::array<double, 3> outer_bp{-2.0, 0.0, 2.0};
  const auto rel = detail::angular_breakpoints(h);
  const Integrand outer = [&](double x1) {
    // P(Z1 < 1/100) = exp(-100)
    if (x1 < -std::log(100.0) || x1 > 700.0) return 0.0;
    const double z1 = std::exp(x1);
    std::vector<double> bp;
    bp.reserve(rel.size() + 2);
    for (double r : rel) bp.push_back(x1 + r);
    bp.push_back(x1 - 0.5 * h * h);
    bp.push_back(x1 + 0.5 * h * h);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    const Integrand inner = [&](double x2) {
      if (x2 > 700.0 || x2 < -700.0) return 0.0;
      const double l = density_log_coords(x1, x2, h);
      if (l == 0.0) return 0.0;
      return g(z1, std::exp(x2)) * l;
    };
    return integrate_real_line(inner, bp, q).value;
  };
  return integrate_real_line(outer, outer_bp, q).value;
}

double expect_frechet(const std::function<double(double)>& f, const QuadratureSpec& q) {
  // In x = log z the Fréchet density is exp(-x - e^{-x}), which decays
  // exponentially on both sides even when f grows like a power of z.
  const Integrand g = [&](double x) {
    const double dens = std::exp(-x - std::exp(-x));
    if (dens == 0.0) return 0.0;
    return f(std::exp(x)) * dens;
  };
  static const double kBreaks[] = {-3.0, -1.0, 0.0, 2.0, 6.0};
  return integrate_real_line(g, kBreaks, q).value;
}

double moment_by_density_quadrature(double beta1, double beta2, const HrParams& p,
                                    const QuadratureSpec& q) {
  const SimplePowerPair pair(beta1, beta2);
  return expect_by_density(
      [&](double z1, double z2) { return std::pow(z1, pair.beta1) * std::pow(z2, pair.beta2); }, p,
      q);
}

namespace {

std::string describe(const ValidationTarget& t, const HrParams& p) {
  std::ostringstream os;
  os.precision(6);
  if (const auto* s = std::get_if<SimpleCovTarget>(&t)) {
    os << "simple_cov(" << s->beta1 << "," << s->beta2 << ")";
  } else if (const auto* g = std::get_if<GevCovTarget>(&t)) {
    os << "gev_cov(beta1=" << g->spec1.beta() << ",beta2=" << g->spec2.beta() << ")";
  } else {
    os << "gev_var(beta=" << std::get<GevVarTarget>(t).spec.beta() << ")";
  }
  if (!std::holds_alternative<GevVarTarget>(t)) os << " h=" << p.h();
  return os.str();
}

std::function<double(double)> power_of_gev(const MarginPowerSpec& s) {
  return [s](double z) { return std::pow(gev_transform(z, s.gev), s.beta()); };
}

void finish(OracleReport& r, double scale, double tol) {
  r.relative_error = std::abs(r.analytic - r.quadrature_oracle) / scale;
  const double diff = std::abs(r.analytic - r.mc_estimate);
  bool mc_ok;
  if (r.mc_std_error > 0.0) {
    r.mc_z = diff / r.mc_std_error;
    mc_ok = r.mc_z < 3.0;
  } else {
    // degenerate estimator (a constant factor): exact zero on both sides
    r.mc_z = 0.0;
    mc_ok = diff <= tol * scale;
  }
  r.agrees = r.relative_error < tol && mc_ok;
}

}  // namespace

OracleReport validate_with_samples(const ValidationTarget& target, const HrParams& p,
                                   const QuadratureSpec& q, const std::vector<HrSample>* pairs,
                                   const std::vector<double>* singles, const ValidateOptions& opts) {
  OracleReport r;
  const QuadratureSpec& oq = opts.oracle_quadrature;
  if (const auto* s = std::get_if<SimpleCovTarget>(&target)) {
    require_finite_h(p, "validate");
    if (!pairs) throw_domain("validate: bivariate target needs paired samples");
    r.name = describe(target, p);
    const SimplePowerPair pair(s->beta1, s->beta2);
    r.analytic = cov_simple_powers(pair, p, q);
    auto f1 = [b = pair.beta1](double z) { return std::pow(z, b); };
    auto f2 = [b = pair.beta2](double z) { return std::pow(z, b); };
    const double m1 = expect_frechet(f1, oq);
    const double m2 = expect_frechet(f2, oq);
    r.quadrature_oracle = moment_by_density_quadrature(pair.beta1, pair.beta2, p, oq) - m1 * m2;
    const auto mc = mc_covariance(*pairs, f1, f2);
    r.mc_estimate = mc.value;
    r.mc_std_error = mc.std_error;
    const double scale = (pair.beta1 == 0.0 || pair.beta2 == 0.0) ? m1 * m2 : std::abs(r.analytic);
    finish(r, scale, opts.tol);
  } else if (const auto* g = std::get_if<GevCovTarget>(&target)) {
    require_finite_h(p, "validate");
    if (!pairs) throw_domain("validate: bivariate target needs paired samples");
    r.name = describe(target, p);
    r.analytic = cov_gev_powers(g->spec1, g->spec2, p, q, opts.method);
    const auto f1 = power_of_gev(g->spec1);
    const auto f2 = power_of_gev(g->spec2);
    const double m1 = expect_frechet(f1, oq);
    const double m2 = expect_frechet(f2, oq);
    r.quadrature_oracle =
        expect_by_density([&](double a, double b) { return f1(a) * f2(b); }, p, oq) - m1 * m2;
    const auto mc = mc_covariance(*pairs, f1, f2);
    r.mc_estimate = mc.value;
    r.mc_std_error = mc.std_error;
    finish(r, std::abs(r.analytic), opts.tol);
  } else {
    const auto& v = std::get<GevVarTarget>(target);
    if (!singles) throw_domain("validate: variance target needs Fréchet draws");
    r.name = describe(target, p);
    r.analytic = var_gev_power(v.spec, q, opts.method);
    const auto f = power_of_gev(v.spec);
    const double m = expect_frechet(f, oq);
    r.quadrature_oracle = expect_frechet(
        [&](double z) {
          const double d = f(z) - m;
          return d * d;
        },
        oq);
    const auto mc = mc_variance(*singles, f);
    r.mc_estimate = mc.value;
    r.mc_std_error = mc.std_error;
    finish(r, std::abs(r.analytic), opts.tol);
  }
  return r;
}

OracleReport validate(const ValidationTarget& target, const HrParams& p, const QuadratureSpec& q,
                      const McConfig& cfg, const ValidateOptions& opts) {
  if (std::holds_alternative<GevVarTarget>(target)) {
    const auto z = sample_frechet(cfg);
    return validate_with_samples(target, p, q, nullptr, &z, opts);
  }
  const auto s = sample_hr(p, cfg);
  return validate_with_samples(target, p, q, &s, nullptr, opts);
}

bool SuiteResult::all_agree() const {
  return !reports.empty() &&
         std::all_of(reports.begin(), reports.end(), [](const OracleReport& r) { return r.agrees; });
}

SuiteResult run_suite(Suite suite, const McConfig& cfg, const QuadratureSpec& q,
                      const std::function<void(const OracleReport&)>& progress) {
  SuiteResult out;
  const ValidateOptions opts;
  auto emit = [&](OracleReport r) {
    if (progress) progress(r);
    out.reports.push_back(std::move(r));
  };

  const std::array<double, 3> hs{0.2, 1.0, 3.0};
  std::vector<std::pair<double, double>> lattice;
  std::uint64_t n_pairs;
  if (suite == Suite::Quick) {
    lattice = {{0.25, 0.25}, {0.3, -0.5}, {-1.0, 0.45}};
    n_pairs = 100'000;
  } else {
    const std::array<double, 5> b{-1.0, -0.5, 0.0, 0.25, 0.45};
    for (double x : b)
      for (double y : b) lattice.emplace_back(x, y);
    n_pairs = 1'000'000;
  }

  std::uint64_t stream = 0;
  for (double h : hs) {
    McConfig c = cfg;
    c.n_samples = n_pairs;
    c.seed = sub_seed(cfg.seed, stream++);
    const HrParams p = HrParams::finite(h);
    const auto samples = sample_hr(p, c);
    for (const auto& [b1, b2] : lattice)
      emit(validate_with_samples(SimpleCovTarget{b1, b2}, p, q, &samples, nullptr, opts));
  }
  if (suite == Suite::Quick) return out;

  const GevParams g(case_study::eta, case_study::tau, case_study::xi);
  {
    McConfig c = cfg;
    c.n_samples = 10'000'000;
    c.seed = sub_seed(cfg.seed, stream++);
    const auto z = sample_frechet(c);
    for (int beta : {1, 2, 3, 10}) {
      emit(validate_with_samples(GevVarTarget{MarginPowerSpec(g, IntegerPower(beta))},
                                 HrParams::independent(), q, nullptr, &z, opts));
    }
  }

  const auto model = SemivariogramModel::power(case_study::kappa, case_study::psi);
  struct CovCase {
    int b1, b2;
    double h;
  };
  const std::vector<CovCase> cov_cases{
      {2, 3, 1.5},
      {10, 10, lag_to_h({5.0, 0.0}, model)},
      {10, 10, lag_to_h({10.0, 0.0}, model)},
  };
  for (const auto& cc : cov_cases) {
    McConfig c = cfg;
    c.n_samples = n_pairs;
    c.seed = sub_seed(cfg.seed, stream++);
    const HrParams p = HrParams::finite(cc.h);
    const auto samples = sample_hr(p, c);
    emit(validate_with_samples(
        GevCovTarget{MarginPowerSpec(g, IntegerPower(cc.b1)), MarginPowerSpec(g, IntegerPower(cc.b2))},
        p, q, &samples, nullptr, opts));
  }
  return out;
}

}  // namespace hrcorr
