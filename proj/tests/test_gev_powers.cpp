#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "error.hpp"
#include "gev_powers.hpp"
#include "oracles.hpp"

using namespace hrcorr;
using oracle::rel;

namespace {
const QuadratureSpec kQ = QuadratureSpec::headline();
HrParams H(double h) { return HrParams::finite(h); }
MarginPowerSpec M(double eta, double tau, double xi, int beta) {
  return {GevParams(eta, tau, xi), IntegerPower(beta)};
}
const MarginPowerSpec kCase = M(25.71, 3.03, -0.12, 10);
double h_of_distance(double d) { return std::sqrt(2 * std::pow(d / 3.39, 0.81)); }
}  // namespace

TEST_CASE("beta = 1 variance and mean against the GEV moments") {
  for (double xi : {-0.4, -0.12, 0.05, 0.2, 0.45}) {
    CAPTURE(xi);
    const auto s = M(7.0, 2.5, xi, 1);
    CHECK(rel(var_gev_power(s), oracle::gev_var_beta1(2.5, xi)) < 1e-12);
    CHECK(rel(mean_gev_power(s), 7.0 + 2.5 * (std::tgamma(1 - xi) - 1) / xi) < 1e-13);
  }
}

// 25-digit values from tests/reference/gen_refs.py.
TEST_CASE("case-study reference values") {
  CHECK(rel(mean_gev_power(kCase), 449848093763035.3352397665) < 1e-12);
  CHECK(rel(var_gev_power(kCase), 7.939095944109548211175152e+29) < 1e-12);
  const double d5 = 0.6532348447070742195775685, d10 = 0.4802895596637607382688404;
  CHECK(rel(corr_gev_powers(kCase, kCase, H(h_of_distance(5)), kQ), d5) < 1e-12);
  CHECK(rel(corr_gev_powers(kCase, kCase, H(h_of_distance(10)), kQ), d10) < 1e-12);
  CHECK(rel(corr_gev_powers(kCase, kCase, H(h_of_distance(5)), kQ, CovMethod::Resummed), d5) < 1e-12);
  // The closed form cancels by a factor ~5e7 here and keeps about 8 digits.
  CHECK(rel(corr_gev_powers(kCase, kCase, H(h_of_distance(5)), kQ, CovMethod::ClosedForm), d5) < 1e-7);
}

TEST_CASE("closed form and resummed routes agree when well conditioned") {
  for (auto [s1, s2] : {std::pair{M(1.0, 1.0, 0.1, 2), M(1.0, 1.0, 0.1, 2)},
                        std::pair{M(3.0, 0.5, -0.3, 3), M(-2.0, 1.5, 0.15, 2)},
                        std::pair{M(0.0, 1.0, 0.2, 1), M(5.0, 2.0, -0.2, 4)}}) {
    for (double h : {0.3, 1.0, 2.5}) {
      CAPTURE(h);
      const double cf = cov_gev_powers(s1, s2, H(h), kQ, CovMethod::ClosedForm);
      const double rs = cov_gev_powers(s1, s2, H(h), kQ, CovMethod::Resummed);
      CHECK(rel(cf, rs) < 1e-10);
      CHECK(rel(cov_gev_powers(s2, s1, H(h), kQ), cov_gev_powers(s1, s2, H(h), kQ)) < 1e-12);
    }
    CHECK(rel(var_gev_power(s1, kQ, CovMethod::ClosedForm), var_gev_power(s1, kQ, CovMethod::Resummed)) <
          1e-10);
  }
}

TEST_CASE("same-margin decomposition matches the general covariance") {
  for (const auto& s : {M(2.0, 1.0, 0.1, 2), M(25.71, 3.03, -0.12, 3), M(0.5, 0.8, -0.3, 5)}) {
    for (double h : {0.2, 1.0, 4.0}) {
      CAPTURE(h);
      CHECK(rel(cov_same_margins(s, H(h), kQ), cov_gev_powers(s, s, H(h), kQ, CovMethod::ClosedForm)) < 1e-12);
    }
  }
}

TEST_CASE("g equals the covariance plus the squared mean") {
  const auto s = M(2.0, 1.0, 0.1, 2);
  const double m = mean_gev_power(s);
  CHECK(rel(g_limit_infinity(s), m * m) < 1e-13);
  CHECK(rel(g_limit_zero(s) - g_limit_infinity(s), var_gev_power(s)) < 1e-12);
  for (double h : {0.2, 1.0, 3.0}) {
    CAPTURE(h);
    CHECK(rel(g_function(s, H(h), kQ) - m * m, cov_gev_powers(s, s, H(h), kQ)) < 1e-10);
  }
}

TEST_CASE("g is strictly decreasing with the right limits") {
  double prev = INFINITY;
  for (int k = 1; k <= 200; ++k) {
    const double g = g_function(kCase, H(0.05 * k), kQ, CovMethod::Auto);
    CAPTURE(k);
    CHECK(g < prev);
    prev = g;
  }
  CHECK(rel(g_function(kCase, H(1e-3), kQ, CovMethod::Auto), g_limit_zero(kCase)) < 1e-4);
  CHECK(rel(g_function(kCase, H(60.0), kQ, CovMethod::Auto), g_limit_infinity(kCase)) < 1e-3);
}

TEST_CASE("dependence extremes") {
  const auto s = M(3.0, 1.2, -0.2, 4);
  CHECK(cov_gev_powers(s, s, HrParams::independent(), kQ) == 0.0);
  CHECK(rel(corr_gev_powers(s, s, H(0.0), kQ), 1.0) < 1e-12);
  CHECK(rel(corr_gev_powers(s, s, H(1e-4), kQ), 1.0) < 1e-3);
}

TEST_CASE("beta = 1 correlation is invariant under affine maps of the margins") {
  const double c1 = corr_gev_powers(M(5.0, 2.0, 0.1, 1), M(5.0, 2.0, 0.1, 1), H(0.8), kQ);
  const double c2 = corr_gev_powers(M(-1.0, 0.3, 0.1, 1), M(40.0, 7.0, 0.1, 1), H(0.8), kQ);
  CHECK(rel(c1, c2) < 1e-12);
}

TEST_CASE("Gumbel margins") {
  const auto g = M(0.0, 1.0, 0.0, 1);
  CHECK(rel(var_gev_power(g), std::numbers::pi * std::numbers::pi / 6) < 1e-13);
  CHECK(rel(mean_gev_power(g), std::numbers::egamma) < 1e-13);
  CHECK_THROWS_AS(cov_gev_powers(g, g, H(1.0), kQ, CovMethod::ClosedForm), Error);
  const auto g2 = M(0.0, 1.0, 0.0, 2);
  const double direct = cov_gev_powers(g2, g2, H(1.0), kQ, CovMethod::Resummed);
  CHECK(rel(cov_gev_powers_gumbel_limit(g2, g2, H(1.0), kQ, 1e-5), direct) < 1e-7);
  CHECK_THROWS_AS(cov_gev_powers_gumbel_limit(M(0, 1, 0.1, 2), g2, H(1.0), kQ, 1e-5), Error);
}

TEST_CASE("shape and power constraints") {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("no throw");
    return ErrorKind::Io;
  };
  CHECK(kind_of([] { (void)M(0, 1, 0.25, 2); }) == ErrorKind::Constraint);
  CHECK(kind_of([] { (void)M(0, 1, 0.06, 10); }) == ErrorKind::Constraint);
  CHECK(kind_of([] { (void)M(0, 0.0, 0.1, 1); }) == ErrorKind::Domain);
  CHECK(kind_of([] { (void)M(0, 1, 0.1, 0); }) == ErrorKind::Domain);
  CHECK(kind_of([] { (void)M(0, 1, 0.1, 31); }) == ErrorKind::Domain);
  CHECK_NOTHROW(M(0, 1, 0.049, 10));
  CHECK_NOTHROW(M(0, 1, -5.0, 30));
}

TEST_CASE("cancellation factor and breakdown") {
  const double c = closed_form_cancellation(kCase, kCase, kQ);
  CHECK(c > 1e7);
  CHECK(c < 1e9);
  const auto b = cov_breakdown(kCase, kCase, H(h_of_distance(5)), kQ);
  CHECK(b.terms.size() == 121);
  CHECK(b.method_used == CovMethod::Resummed);
  CHECK(rel(b.corr, 0.6532348447070742) < 1e-12);
  double sum = 0;
  for (const auto& t : b.terms) sum += t.term;
  CHECK(rel(sum, b.cov) < 1e-6);
}
