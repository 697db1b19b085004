#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "oracle.hpp"
#include "oracles.hpp"

using namespace hrcorr;
using oracle::rel;

namespace {
const QuadratureSpec kOracleQ{1e-10, 0.0, 20000};
HrParams H(double h) { return HrParams::finite(h); }

// Kolmogorov-Smirnov distance of a sample from the standard Fréchet law.
double ks_frechet(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = std::exp(-1.0 / z[i]);
    d = std::max({d, std::fabs(f - i / n), std::fabs(f - (i + 1) / n)});
  }
  return d;
}
}  // namespace

TEST_CASE("counter uniforms") {
  double sum = 0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = counter_uniform(7, i);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / 100000 - 0.5) < 4 * std::sqrt(1.0 / 12 / 100000));
  CHECK(counter_uniform(7, 5) == counter_uniform(7, 5));
  CHECK(counter_uniform(7, 5) != counter_uniform(8, 5));
}

TEST_CASE("conditional distribution against the joint cdf") {
  for (double h : {0.2, 1.0, 3.0})
    for (double z1 : {0.3, 1.0, 6.0})
      for (double z2 : {0.5, 2.0, 15.0}) {
        CAPTURE(h);
        CAPTURE(z1);
        CAPTURE(z2);
        // dF/dz1 divided by the Fréchet density of Z1.
        const double e = 1e-5 * z1;
        const double dF = (oracle::hr_cdf(z1 + e, z2, h) - oracle::hr_cdf(z1 - e, z2, h)) / (2 * e);
        const double f1 = std::exp(-1.0 / z1) / (z1 * z1);
        CHECK(std::fabs(hr_conditional_cdf(z2, z1, h) - dF / f1) < 1e-7);
      }
}

TEST_CASE("conditional quantile inverts the conditional cdf") {
  for (double h : {0.05, 1.0, 4.0})
    for (double z1 : {0.1, 1.0, 50.0})
      for (double u : {1e-6, 0.01, 0.5, 0.99, 1 - 1e-9}) {
        CAPTURE(h);
        CAPTURE(z1);
        CAPTURE(u);
        const double z2 = hr_conditional_quantile(z1, u, h);
        CHECK(std::fabs(hr_conditional_cdf(z2, z1, h) - u) < 1e-11);
      }
}

TEST_CASE("sampler margins and joint law") {
  McConfig cfg;
  cfg.n_samples = 40000;
  cfg.seed = 99;
  const double h = 0.8;
  const auto s = sample_hr(H(h), cfg);
  std::vector<double> z1, z2;
  for (auto p : s) z1.push_back(p.z1), z2.push_back(p.z2);
  const double crit = 1.95 / std::sqrt(40000.0);  // 0.1% level
  CHECK(ks_frechet(z1) < crit);
  CHECK(ks_frechet(z2) < crit);
  for (auto [a, b] : {std::pair{0.5, 0.5}, std::pair{1.0, 3.0}, std::pair{4.0, 0.8}}) {
    const double p = oracle::hr_cdf(a, b, h);
    double hits = 0;
    for (auto x : s) hits += x.z1 <= a && x.z2 <= b;
    CAPTURE(a);
    CAPTURE(b);
    CHECK(std::fabs(hits / s.size() - p) < 4 * std::sqrt(p * (1 - p) / s.size()));
  }
}

TEST_CASE("sampler is replayable and thread independent") {
  McConfig cfg;
  cfg.n_samples = 5000;
  cfg.seed = 3;
  const auto a = sample_hr(H(1.3), cfg);
  cfg.threads = 4;
  const auto b = sample_hr(H(1.3), cfg);
  const HrSampler one(H(1.3), cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].z1 == b[i].z1);
    REQUIRE(a[i].z2 == b[i].z2);
  }
  CHECK(one(1234).z1 == a[1234].z1);
  CHECK(one(1234).z2 == a[1234].z2);
}

TEST_CASE("swapped construction gives the same law") {
  McConfig cfg;
  cfg.n_samples = 40000;
  const HrSampler s(H(0.6), cfg);
  double hits = 0, hits_swapped = 0;
  for (std::uint64_t i = 0; i < cfg.n_samples; ++i) {
    const auto x = s.draw(i, false);
    const auto y = s.draw(i, true);
    hits += x.z1 <= 2.0 && x.z2 <= 0.7;
    hits_swapped += y.z1 <= 2.0 && y.z2 <= 0.7;
  }
  const double p = oracle::hr_cdf(2.0, 0.7, 0.6);
  const double se = std::sqrt(p * (1 - p) / cfg.n_samples);
  CHECK(std::fabs(hits / cfg.n_samples - p) < 4 * se);
  CHECK(std::fabs(hits_swapped / cfg.n_samples - p) < 4 * se);
}

TEST_CASE("density quadrature") {
  for (double h : {0.2, 1.0, 3.0}) {
    CAPTURE(h);
    CHECK(std::fabs(expect_by_density([](double, double) { return 1.0; }, H(h), kOracleQ) - 1.0) < 1e-9);
    const double p = expect_by_density([](double a, double b) { return a <= 1.5 && b <= 0.9 ? 1.0 : 0.0; }, H(h),
                                       {1e-8, 0.0, 20000});
    CHECK(std::fabs(p - oracle::hr_cdf(1.5, 0.9, h)) < 1e-6);
  }
  for (double b : {-1.0, 0.25, 0.45}) {
    CHECK(rel(expect_frechet([b](double z) { return std::pow(z, b); }, kOracleQ), std::tgamma(1 - b)) < 1e-9);
  }
  CHECK(rel(moment_by_density_quadrature(0.25, 0.25, H(1.0), kOracleQ), 1.728482822806968290964372) < 1e-8);
  CHECK(rel(moment_by_density_quadrature(-1.0, 0.45, H(3.0), kOracleQ), 1.417104453648453111145618) < 1e-8);
}

TEST_CASE("validate reports agreement") {
  McConfig cfg;
  cfg.n_samples = 100000;
  const auto r = validate(SimpleCovTarget{0.25, -0.5}, H(1.0), QuadratureSpec::headline(), cfg, {});
  CHECK(r.agrees);
  CHECK(r.relative_error < 1e-8);
  CHECK(r.mc_z < 3);
  const auto zero = validate(SimpleCovTarget{0.0, 0.3}, H(1.0), QuadratureSpec::headline(), cfg, {});
  CHECK(zero.agrees);
  CHECK(zero.mc_estimate == 0.0);
}

TEST_CASE("quick suite passes") {
  McConfig cfg;
  const auto r = run_suite(Suite::Quick, cfg, QuadratureSpec::headline());
  CHECK(r.reports.size() == 9);
  for (const auto& x : r.reports) {
    CAPTURE(x.name);
    CHECK(x.agrees);
  }
}

TEST_CASE("configuration checks") {
  McConfig cfg;
  cfg.n_samples = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.n_samples = 100;
  cfg.threads = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_THROWS_AS(hr_conditional_quantile(1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(hr_conditional_quantile(1.0, 0.5, 0.0), Error);
}
