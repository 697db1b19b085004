#include "commands.hpp"

#include "json.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace hrcorr {

namespace {

using ojson = nlohmann::ordered_json;

bool json_format(const RunConfig& cfg) { return cfg.output.format == "json"; }

std::string csv_header(const RunConfig& cfg, const char* command) {
  std::string out = std::string("# hrcorr ") + command + "\n";
  std::istringstream ini(config_to_ini(cfg));
  std::string line;
  while (std::getline(ini, line)) out += line.empty() ? "#!\n" : "#! " + line + "\n";
  return out;
}

ojson json_header(const RunConfig& cfg, const char* command) {
  ojson j;
  j["command"] = command;
  ojson c = ojson::object();
  for (const auto& [k, v] : config_entries(cfg)) c[k] = v;
  j["config"] = c;
  return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i == n - 1 ? b : a + (b - a) * i / (n - 1);
  return v;
}

const char* reason_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Constraint: return "beta_xi_constraint";
    case ErrorKind::NonConvergence: return "non_convergence";
    default: return "invalid_parameter";
  }
}

}  // namespace

CommandOutput cmd_curve(const RunConfig& cfg) {
  cfg.validate_all();
  const auto spec = cfg.brown_resnick();
  CommandOutput out;
  if (cfg.curve.threshold) {
    const double level = *cfg.curve.threshold;
    const double d = threshold_distance(spec, level, cfg.quadrature);
    out.summary = "threshold " + format_double(level) + " first reached at distance " + format_double(d);
    if (json_format(cfg)) {
      ojson j = json_header(cfg, "curve");
      j["threshold"] = {{"level", level}, {"distance", d}};
      out.document = dump(j);
    } else {
      out.document = csv_header(cfg, "curve") + "level,distance\n" + format_double(level) + "," +
                     format_double(d) + "\n";
    }
    return out;
  }
  const auto distances = linspace(cfg.curve.min, cfg.curve.max, cfg.curve.n);
  const auto curve = correlation_curve(spec, distances, cfg.quadrature, cfg.threads);
  if (json_format(cfg)) {
    ojson j = json_header(cfg, "curve");
    j["distance"] = curve.distances;
    j["correlation"] = curve.values;
    out.document = dump(j);
  } else {
    std::string doc = csv_header(cfg, "curve") + "distance,correlation\n";
    for (std::size_t i = 0; i < distances.size(); ++i)
      doc += format_double(curve.distances[i]) + "," + format_double(curve.values[i]) + "\n";
    out.document = doc;
  }
  out.summary = std::to_string(distances.size()) + " points";
  return out;
}

namespace {

void apply_axis(MarginFields& m1, MarginFields& m2, const HeatmapAxis& axis, double v) {
  MarginFields& m = axis.site == 1 ? m1 : m2;
  switch (axis.param) {
    case HeatmapParam::Beta: m.beta = static_cast<int>(std::lround(v)); break;
    case HeatmapParam::Eta: m.eta = v; break;
    case HeatmapParam::Tau: m.tau = v; break;
    case HeatmapParam::Xi: m.xi = v; break;
  }
}

}  // namespace

CommandOutput cmd_heatmap(const RunConfig& cfg) {
  cfg.validate_all();
  const auto model = cfg.model();
  const auto v1 = cfg.heatmap.axis1.values();
  const auto v2 = cfg.heatmap.axis2.values();
  const double h = lag_to_h({cfg.heatmap.distance, 0.0}, model);
  const HrParams p = HrParams::finite(h);
  std::vector<double> value(v1.size() * v2.size(), NAN);
  std::vector<std::string> reason(value.size());
  parallel_for(value.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t i = k / v2.size();
    const std::size_t j = k % v2.size();
    MarginFields m1 = cfg.margin;
    MarginFields m2 = cfg.margin2.value_or(cfg.margin);
    apply_axis(m1, m2, cfg.heatmap.axis1, v1[i]);
    apply_axis(m1, m2, cfg.heatmap.axis2, v2[j]);
    try {
      const MarginPowerSpec s1(GevParams(m1.eta, m1.tau, m1.xi), IntegerPower(m1.beta));
      const MarginPowerSpec s2(GevParams(m2.eta, m2.tau, m2.xi), IntegerPower(m2.beta));
      value[k] = corr_gev_powers(s1, s2, p, cfg.quadrature);
    } catch (const Error& e) {
      reason[k] = reason_code(e);
    }
  });

  CommandOutput out;
  std::size_t nulls = 0;
  for (const auto& r : reason) nulls += !r.empty();
  out.summary = std::to_string(v1.size()) + " x " + std::to_string(v2.size()) + " cells, " +
                std::to_string(nulls) + " null";
  const std::string n1 = cfg.heatmap.axis1.name();
  const std::string n2 = cfg.heatmap.axis2.name();
  if (json_format(cfg)) {
    ojson j = json_header(cfg, "heatmap");
    j["distance"] = cfg.heatmap.distance;
    j["h"] = h;
    j["axis1"] = {{"name", n1}, {"values", v1}};
    j["axis2"] = {{"name", n2}, {"values", v2}};
    ojson rows = ojson::array();
    ojson reasons = ojson::array();
    for (std::size_t i = 0; i < v1.size(); ++i) {
      ojson row = ojson::array();
      ojson rrow = ojson::array();
      for (std::size_t jx = 0; jx < v2.size(); ++jx) {
        const std::size_t k = i * v2.size() + jx;
        if (reason[k].empty()) {
          row.push_back(value[k]);
          rrow.push_back(nullptr);
        } else {
          row.push_back(nullptr);
          rrow.push_back(reason[k]);
        }
      }
      rows.push_back(row);
      reasons.push_back(rrow);
    }
    j["correlation"] = rows;
    j["reason"] = reasons;
    out.document = dump(j);
  } else {
    std::string doc = csv_header(cfg, "heatmap") + n1 + "," + n2 + ",correlation,reason\n";
    for (std::size_t i = 0; i < v1.size(); ++i) {
      for (std::size_t jx = 0; jx < v2.size(); ++jx) {
        const std::size_t k = i * v2.size() + jx;
        doc += format_double(v1[i]) + "," + format_double(v2[jx]) + ",";
        doc += reason[k].empty() ? format_double(value[k]) + "," : "," + reason[k];
        doc += "\n";
      }
    }
    out.document = doc;
  }
  return out;
}

CommandOutput cmd_validate(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate_all();
  McConfig mc = cfg.mc;
  mc.threads = cfg.threads;
  const Suite suite = cfg.validate.suite == "full" ? Suite::Full : Suite::Quick;
  const auto result = run_suite(suite, mc, cfg.quadrature, [&](const OracleReport& r) {
    if (progress)
      progress((r.agrees ? "ok    " : "FAIL  ") + r.name + "  rel=" + format_double(r.relative_error) +
               "  mc_z=" + format_double(r.mc_z));
  });
  CommandOutput out;
  out.validation_passed = result.all_agree();
  std::size_t failed = 0;
  for (const auto& r : result.reports) failed += !r.agrees;
  out.summary = std::to_string(result.reports.size()) + " cases, " + std::to_string(failed) + " failed";
  for (const auto& r : result.reports)
    if (!r.agrees) out.summary += "\nfailed: " + r.name;
  if (json_format(cfg)) {
    ojson j = json_header(cfg, "validate");
    ojson arr = ojson::array();
    for (const auto& r : result.reports) {
      arr.push_back({{"name", r.name},
                     {"analytic", r.analytic},
                     {"quadrature_oracle", r.quadrature_oracle},
                     {"mc_estimate", r.mc_estimate},
                     {"mc_std_error", r.mc_std_error},
                     {"relative_error", r.relative_error},
                     {"mc_z", r.mc_z},
                     {"agrees", r.agrees}});
    }
    j["reports"] = arr;
    j["all_agree"] = out.validation_passed;
    out.document = dump(j);
  } else {
    std::string doc = csv_header(cfg, "validate") +
                      "name,analytic,quadrature_oracle,mc_estimate,mc_std_error,relative_error,mc_z,agrees\n";
    for (const auto& r : result.reports) {
      doc += "\"" + r.name + "\"," + format_double(r.analytic) + "," + format_double(r.quadrature_oracle) +
             "," + format_double(r.mc_estimate) + "," + format_double(r.mc_std_error) + "," +
             format_double(r.relative_error) + "," + format_double(r.mc_z) + "," +
             (r.agrees ? "true" : "false") + "\n";
    }
    out.document = doc;
  }
  return out;
}

CommandOutput cmd_loss_variance(const RunConfig& cfg) {
  cfg.validate_all();
  const auto spec = cfg.brown_resnick();
  const auto damage = cfg.damage_spec();
  const Region coarse = cfg.region();
  const Region fine(coarse.lon_min, coarse.lon_max, coarse.lat_min, coarse.lat_max,
                    coarse.resolution / 2.0);
  const auto a = loss_variance(spec, damage, coarse, cfg.loss.exposure, cfg.quadrature, cfg.threads);
  const auto b = loss_variance(spec, damage, fine, cfg.loss.exposure, cfg.quadrature, cfg.threads);
  const double delta = std::abs(b.value - a.value) / std::abs(b.value);

  CommandOutput out;
  out.summary = "loss variance " + format_double(a.value) + " (refined " + format_double(b.value) +
                ", relative change " + format_double(delta) + ")";
  auto row = [](double res, const LossVariance& v) {
    return ojson{{"resolution", res},         {"value", v.value},
                 {"var_c0", v.var_c0},         {"correlation_integral", v.correlation_integral},
                 {"cells_lon", v.cells_lon},   {"cells_lat", v.cells_lat},
                 {"cell_area", v.cell_area},   {"distinct_lags", v.distinct_lags}};
  };
  if (json_format(cfg)) {
    ojson j = json_header(cfg, "loss-variance");
    j["results"] = ojson::array({row(coarse.resolution, a), row(fine.resolution, b)});
    j["refinement_delta"] = delta;
    out.document = dump(j);
  } else {
    std::string doc = csv_header(cfg, "loss-variance") +
                      "resolution,value,var_c0,correlation_integral,cells_lon,cells_lat,cell_area,distinct_lags,"
                      "refinement_delta\n";
    auto line = [&](double res, const LossVariance& v, const std::string& d) {
      return format_double(res) + "," + format_double(v.value) + "," + format_double(v.var_c0) + "," +
             format_double(v.correlation_integral) + "," + std::to_string(v.cells_lon) + "," +
             std::to_string(v.cells_lat) + "," + format_double(v.cell_area) + "," +
             std::to_string(v.distinct_lags) + "," + d + "\n";
    };
    doc += line(coarse.resolution, a, "");
    doc += line(fine.resolution, b, format_double(delta));
    out.document = doc;
  }
  return out;
}

CommandOutput cmd_cov(const RunConfig& cfg) {
  cfg.validate_all();
  const double h = cfg.cov.h ? *cfg.cov.h : lag_to_h({cfg.cov.distance, 0.0}, cfg.model());
  const HrParams p = HrParams::finite(h);
  const auto s1 = cfg.margin_spec();
  const auto s2 = cfg.margin2_spec();
  const auto b = cov_breakdown(s1, s2, p, cfg.quadrature);

  CommandOutput out;
  out.summary = "h " + format_double(h) + "  cov " + format_double(b.cov) + "  corr " + format_double(b.corr) +
                "  method " + to_string(b.method_used);
  if (json_format(cfg)) {
    ojson j = json_header(cfg, "cov");
    j["h"] = h;
    j["cov"] = b.cov;
    j["var1"] = b.var1;
    j["var2"] = b.var2;
    j["corr"] = b.corr;
    j["method"] = to_string(b.method_used);
    j["cancellation"] = b.cancellation;
    j["cov_resummed"] = b.cov_resummed;
    ojson terms = ojson::array();
    for (const auto& t : b.terms) {
      terms.push_back({{"k1", t.k1}, {"k2", t.k2}, {"b", t.b}, {"i_value", t.i_value},
                       {"gamma1", t.gamma1}, {"gamma2", t.gamma2}, {"term", t.term}});
    }
    j["terms"] = terms;
    out.document = dump(j);
  } else {
    std::string doc = csv_header(cfg, "cov") + "quantity,value\n";
    doc += "h," + format_double(h) + "\n";
    doc += "cov," + format_double(b.cov) + "\n";
    doc += "var1," + format_double(b.var1) + "\n";
    doc += "var2," + format_double(b.var2) + "\n";
    doc += "corr," + format_double(b.corr) + "\n";
    doc += std::string("method,") + to_string(b.method_used) + "\n";
    doc += "cancellation," + format_double(b.cancellation) + "\n";
    doc += "cov_resummed," + format_double(b.cov_resummed) + "\n";
    doc += "\nk1,k2,b,i_value,gamma1,gamma2,term\n";
    for (const auto& t : b.terms) {
      doc += std::to_string(t.k1) + "," + std::to_string(t.k2) + "," + format_double(t.b) + "," +
             format_double(t.i_value) + "," + format_double(t.gamma1) + "," + format_double(t.gamma2) +
             "," + format_double(t.term) + "\n";
    }
    out.document = doc;
  }
  return out;
}

}  // namespace hrcorr
