// hrcorr: command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "hrcorr/hrcorr.h"

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kNonConvergence = 3, kValidation = 4 };

int exit_code(hrcorr_status s) {
  switch (s) {
    case HRCORR_OK: return kOk;
    case HRCORR_E_NONCONVERGENCE: return kNonConvergence;
    case HRCORR_E_VALIDATION: return kValidation;
    case HRCORR_E_INTERNAL: return kInternal;
    default: return kUsage;
  }
}

int report(hrcorr_status s) {
  std::cerr << "hrcorr: " << hrcorr_status_name(s) << ": " << hrcorr_last_error() << "\n";
  return exit_code(s);
}

// Owned C string from the library.
struct CStr {
  char* p = nullptr;
  ~CStr() { hrcorr_string_free(p); }
};

struct Config {
  hrcorr_config* p = nullptr;
  ~Config() { hrcorr_config_free(p); }
};

// Options bound as strings and forwarded verbatim to hrcorr_config_set, so the
// library does all parsing and error reporting.
struct Overrides {
  std::vector<std::pair<CLI::Option*, std::string>> keyed;
  std::map<std::string, std::string> values;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    keyed.emplace_back(app->add_option(flag, values[key], help), key);
  }

  hrcorr_status apply(hrcorr_config* cfg) const {
    for (const auto& [opt, key] : keyed) {
      if (opt->count() == 0) continue;
      const hrcorr_status s = hrcorr_config_set(cfg, key.c_str(), values.at(key).c_str());
      if (s != HRCORR_OK) return s;
    }
    return HRCORR_OK;
  }
};

void progress_line(const char* line, void*) { std::cerr << line << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlations between powers of Husler-Reiss vectors and Brown-Resnick fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hrcorr_version()));

  std::string config_path;
  std::string out_path;
  std::vector<std::string> sets;
  Overrides ov;
  app.add_option("--config", config_path, "Config file, or a previous CSV/JSON output to replay");
  app.add_option("--out", out_path, "Output file (default: output.path, else standard output)");
  ov.bind(&app, "--format", "output.format", "csv or json");
  ov.bind(&app, "--tol", "quadrature.rel_tol", "Relative quadrature tolerance");
  ov.bind(&app, "--seed", "mc.seed", "Monte Carlo seed");
  ov.bind(&app, "--threads", "run.threads", "Worker threads (0: all cores)");
  app.add_option("--set", sets, "Override any config key: section.key=value")->take_all();

  CLI::App* curve = app.add_subcommand("curve", "Dependence measure against distance");
  ov.bind(curve, "--min", "curve.min", "Smallest distance");
  ov.bind(curve, "--max", "curve.max", "Largest distance");
  ov.bind(curve, "--n", "curve.n", "Number of distances");
  ov.bind(curve, "--threshold", "curve.threshold", "Report the distance where the measure falls to this level");

  CLI::App* heat = app.add_subcommand("heatmap", "Correlation over a two-parameter grid");
  ov.bind(heat, "--axis1", "heatmap.axis1", "beta|eta|tau|xi, optionally suffixed with site 1 or 2");
  ov.bind(heat, "--axis1-min", "heatmap.axis1_min", "");
  ov.bind(heat, "--axis1-max", "heatmap.axis1_max", "");
  ov.bind(heat, "--axis1-n", "heatmap.axis1_n", "");
  ov.bind(heat, "--axis2", "heatmap.axis2", "beta|eta|tau|xi, optionally suffixed with site 1 or 2");
  ov.bind(heat, "--axis2-min", "heatmap.axis2_min", "");
  ov.bind(heat, "--axis2-max", "heatmap.axis2_max", "");
  ov.bind(heat, "--axis2-n", "heatmap.axis2_n", "");
  ov.bind(heat, "--distance", "heatmap.distance", "Distance between the two sites");

  CLI::App* val = app.add_subcommand("validate", "Check closed forms against quadrature and Monte Carlo");
  std::string suite_pos;
  val->add_option("suite", suite_pos, "quick or full")->check(CLI::IsMember({"quick", "full"}));

  CLI::App* loss = app.add_subcommand("loss-variance", "Variance of the aggregate loss over a region");
  ov.bind(loss, "--lon-min", "loss.lon_min", "");
  ov.bind(loss, "--lon-max", "loss.lon_max", "");
  ov.bind(loss, "--lat-min", "loss.lat_min", "");
  ov.bind(loss, "--lat-max", "loss.lat_max", "");
  ov.bind(loss, "--resolution", "loss.resolution", "Grid cell edge in degrees");
  ov.bind(loss, "--exposure", "loss.exposure", "Constant exposure per unit area");

  CLI::App* cov = app.add_subcommand("cov", "One covariance evaluation with all intermediate terms");
  ov.bind(cov, "--hr", "cov.h", "Husler-Reiss parameter (takes precedence over --distance)");
  ov.bind(cov, "--distance", "cov.distance", "Distance, mapped to h through the variogram");

  for (CLI::App* sub : {curve, heat, val, loss, cov}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  Config cfg;
  hrcorr_status s = config_path.empty() ? hrcorr_config_new(&cfg.p)
                                        : hrcorr_config_load(config_path.c_str(), &cfg.p);
  if (s != HRCORR_OK) return report(s);
  if ((s = ov.apply(cfg.p)) != HRCORR_OK) return report(s);
  if (!suite_pos.empty() && (s = hrcorr_config_set(cfg.p, "validate.suite", suite_pos.c_str())) != HRCORR_OK)
    return report(s);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "hrcorr: --set expects section.key=value, got '" << kv << "'\n";
      return kUsage;
    }
    s = hrcorr_config_set(cfg.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != HRCORR_OK) return report(s);
  }
  if (out_path.empty()) {
    CStr p;
    if (hrcorr_config_get(cfg.p, "output.path", &p.p) == HRCORR_OK) out_path = p.p;
  }
  if ((s = hrcorr_config_validate(cfg.p)) != HRCORR_OK) return report(s);

  CStr doc;
  CStr summary;
  if (curve->parsed()) s = hrcorr_cmd_curve(cfg.p, &doc.p, &summary.p);
  else if (heat->parsed()) s = hrcorr_cmd_heatmap(cfg.p, &doc.p, &summary.p);
  else if (val->parsed()) s = hrcorr_cmd_validate(cfg.p, progress_line, nullptr, &doc.p, &summary.p);
  else if (loss->parsed()) s = hrcorr_cmd_loss_variance(cfg.p, &doc.p, &summary.p);
  else s = hrcorr_cmd_cov(cfg.p, &doc.p, &summary.p);

  // A failed validation still produces its report.
  if (s != HRCORR_OK && s != HRCORR_E_VALIDATION) return report(s);

  if (out_path.empty()) {
    std::cout << doc.p;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << doc.p;
    if (!f) {
      std::cerr << "hrcorr: cannot write " << out_path << "\n";
      return kUsage;
    }
  }
  if (summary.p && *summary.p) std::cerr << summary.p << "\n";
  if (s == HRCORR_E_VALIDATION) {
    std::cerr << "hrcorr: validation failed\n";
    return kValidation;
  }
  return kOk;
}
