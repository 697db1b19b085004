#pragma once

// Run configuration: flat `key = value` sections, e.g.
//
//   [variogram]
//   type = power
//   kappa = 3.39
//   psi = 0.81
//
//   [margin]
//   eta = 25.71
//
// Every field has a default; see RunConfig. Errors name the offending field as
// section.key.

#include <optional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "risk.hpp"

namespace hrcorr {

struct MarginFields {
  double eta;
  double tau;
  double xi;
  int beta;
};

enum class HeatmapParam { Beta, Eta, Tau, Xi };

struct HeatmapAxis {
  HeatmapParam param = HeatmapParam::Beta;
  int site = 1;  // which site's parameter the axis varies
  // Unset bounds fall back to the sweep used for that parameter in the case
  // study: beta 1..12, eta 15..35, tau 2..4, xi -0.2..-0.06.
  std::optional<double> min;
  std::optional<double> max;
  std::optional<int> n;
  [[nodiscard]] double lo() const;
  [[nodiscard]] double hi() const;
  [[nodiscard]] int count() const;
  /// Grid values: every integer in [lo, hi] for beta, otherwise `count` evenly spaced points.
  [[nodiscard]] std::vector<double> values() const;
  /// e.g. "beta1", "xi2".
  [[nodiscard]] std::string name() const;
};

struct RunConfig {
  struct Variogram {
    std::string type = "power";
    double kappa = 3.39;
    double psi = 0.81;
    double s11 = 1.0;
    double s12 = 0.0;
    double s22 = 1.0;
  } variogram;
  MarginFields margin{25.71, 3.03, -0.12, 10};
  std::optional<MarginFields> margin2;  // second site; defaults to `margin`
  struct Damage {
    double c1 = 82.2;
    std::optional<int> beta;  // defaults to margin.beta
  } damage;
  QuadratureSpec quadrature = QuadratureSpec::headline();
  McConfig mc;
  struct Output {
    std::string format = "csv";
    std::string path;  // empty: standard output
  } output;
  struct Curve {
    double min = 0.0;
    double max = 12.0;
    int n = 100;
    std::optional<double> threshold;
  } curve;
  struct Heatmap {
    HeatmapAxis axis1{HeatmapParam::Beta, 1, {}, {}, {}};
    HeatmapAxis axis2{HeatmapParam::Beta, 2, {}, {}, {}};
    double distance = 3.0;
  } heatmap;
  struct Validate {
    std::string suite = "quick";
  } validate;
  struct Loss {
    double lon_min = 5.75;
    double lon_max = 12.0;
    double lat_min = 49.0;
    double lat_max = 52.0;
    double resolution = 0.5;
    double exposure = 1.0;
  } loss;
  struct Cov {
    std::optional<double> h;  // takes precedence over distance
    double distance = 5.0;
  } cov;
  int threads = 1;

  // Typed views; each throws Error(Config) naming the field on failure.
  [[nodiscard]] SemivariogramModel model() const;
  [[nodiscard]] MarginPowerSpec margin_spec() const;
  [[nodiscard]] MarginPowerSpec margin2_spec() const;
  [[nodiscard]] BrownResnickSpec brown_resnick() const;
  [[nodiscard]] DamageFunctionSpec damage_spec() const;
  [[nodiscard]] Region region() const;

  /// Checks every nested invariant.
  void validate_all() const;
};

/// Applies one assignment; `path` is section.key.
void config_set(RunConfig& cfg, const std::string& path, const std::string& value);

RunConfig parse_config(const std::string& text);
/// Reads a config file, or the configuration embedded in a CSV (`#! ` lines)
/// or JSON (`config` object) output file.
RunConfig load_config(const std::string& path);
std::string config_to_ini(const RunConfig& cfg);
/// Flat list of (section.key, value) pairs, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

/// Locale-independent formatting with 17 significant digits.
std::string format_double(double x);
/// Shortest representation that reads back to the same double.
std::string format_double_exact(double x);

}  // namespace hrcorr
