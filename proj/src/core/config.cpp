#include "config.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <system_error>

#include "error.hpp"

namespace hrcorr {

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Config, path + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& path, const std::string& v) {
  double x = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || v.empty()) config_error(path, "expected a number, got '" + v + "'");
  if (!std::isfinite(x)) config_error(path, "must be finite, got '" + v + "'");
  return x;
}

template <class Int>
Int parse_integer(const std::string& path, const std::string& v) {
  Int x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    config_error(path, "expected an integer, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& path, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  config_error(path, "expected true or false, got '" + v + "'");
}

struct Field {
  std::string path;
  std::function<std::optional<std::string>()> get;
  std::function<void(const std::string&)> set;
};

Field dbl(const std::string& path, double& ref) {
  return {path, [&ref] { return std::optional<std::string>(format_double_exact(ref)); },
          [&ref, path](const std::string& v) { ref = parse_double(path, v); }};
}
Field opt_dbl(const std::string& path, std::optional<double>& ref) {
  return {path,
          [&ref]() -> std::optional<std::string> {
            if (!ref) return std::nullopt;
            return format_double_exact(*ref);
          },
          [&ref, path](const std::string& v) { ref = parse_double(path, v); }};
}
Field integer(const std::string& path, int& ref) {
  return {path, [&ref] { return std::optional<std::string>(std::to_string(ref)); },
          [&ref, path](const std::string& v) { ref = parse_integer<int>(path, v); }};
}
Field opt_int(const std::string& path, std::optional<int>& ref) {
  return {path,
          [&ref]() -> std::optional<std::string> {
            if (!ref) return std::nullopt;
            return std::to_string(*ref);
          },
          [&ref, path](const std::string& v) { ref = parse_integer<int>(path, v); }};
}
Field str(const std::string& path, std::string& ref) {
  return {path, [&ref] { return std::optional<std::string>(ref); },
          [&ref](const std::string& v) { ref = v; }};
}

const char* param_name(HeatmapParam p) {
  switch (p) {
    case HeatmapParam::Beta: return "beta";
    case HeatmapParam::Eta: return "eta";
    case HeatmapParam::Tau: return "tau";
    case HeatmapParam::Xi: return "xi";
  }
  return "?";
}

void parse_axis(const std::string& path, const std::string& v, HeatmapAxis& axis, int default_site) {
  std::string base = v;
  int site = default_site;
  if (!base.empty() && (base.back() == '1' || base.back() == '2')) {
    site = base.back() - '0';
    base.pop_back();
  }
  if (base == "beta") axis.param = HeatmapParam::Beta;
  else if (base == "eta") axis.param = HeatmapParam::Eta;
  else if (base == "tau") axis.param = HeatmapParam::Tau;
  else if (base == "xi") axis.param = HeatmapParam::Xi;
  else config_error(path, "expected one of beta, eta, tau, xi (optionally suffixed 1 or 2), got '" + v + "'");
  axis.site = site;
}

Field axis_field(const std::string& path, HeatmapAxis& axis, int default_site) {
  return {path, [&axis] { return std::optional<std::string>(axis.name()); },
          [&axis, path, default_site](const std::string& v) { parse_axis(path, v, axis, default_site); }};
}

void margin_fields(std::vector<Field>& f, const std::string& sec, MarginFields& m) {
  f.push_back(dbl(sec + ".eta", m.eta));
  f.push_back(dbl(sec + ".tau", m.tau));
  f.push_back(dbl(sec + ".xi", m.xi));
  f.push_back(integer(sec + ".beta", m.beta));
}

std::vector<Field> fields(RunConfig& c) {
  std::vector<Field> f;
  f.push_back(str("variogram.type", c.variogram.type));
  f.push_back(dbl("variogram.kappa", c.variogram.kappa));
  f.push_back(dbl("variogram.psi", c.variogram.psi));
  f.push_back(dbl("variogram.s11", c.variogram.s11));
  f.push_back(dbl("variogram.s12", c.variogram.s12));
  f.push_back(dbl("variogram.s22", c.variogram.s22));
  margin_fields(f, "margin", c.margin);
  for (const char* key : {"eta", "tau", "xi", "beta"}) {
    const std::string path = std::string("margin2.") + key;
    f.push_back({path,
                 [&c, key]() -> std::optional<std::string> {
                   if (!c.margin2) return std::nullopt;
                   const std::string k = key;
                   if (k == "beta") return std::to_string(c.margin2->beta);
                   const double v = k == "eta" ? c.margin2->eta : k == "tau" ? c.margin2->tau : c.margin2->xi;
                   return format_double_exact(v);
                 },
                 [&c, key, path](const std::string& v) {
                   if (!c.margin2) c.margin2 = c.margin;
                   const std::string k = key;
                   if (k == "beta") c.margin2->beta = parse_integer<int>(path, v);
                   else if (k == "eta") c.margin2->eta = parse_double(path, v);
                   else if (k == "tau") c.margin2->tau = parse_double(path, v);
                   else c.margin2->xi = parse_double(path, v);
                 }});
  }
  f.push_back(dbl("damage.c1", c.damage.c1));
  f.push_back(opt_int("damage.beta", c.damage.beta));
  f.push_back(dbl("quadrature.rel_tol", c.quadrature.relative_tolerance));
  f.push_back(dbl("quadrature.abs_tol", c.quadrature.absolute_tolerance));
  f.push_back(integer("quadrature.max_subdivisions", c.quadrature.max_subdivisions));
  f.push_back({"mc.seed", [&c] { return std::optional<std::string>(std::to_string(c.mc.seed)); },
               [&c](const std::string& v) { c.mc.seed = parse_integer<std::uint64_t>("mc.seed", v); }});
  f.push_back({"mc.antithetic",
               [&c] { return std::optional<std::string>(c.mc.antithetic ? "true" : "false"); },
               [&c](const std::string& v) { c.mc.antithetic = parse_bool("mc.antithetic", v); }});
  f.push_back(str("output.format", c.output.format));
  f.push_back(str("output.path", c.output.path));
  f.push_back(dbl("curve.min", c.curve.min));
  f.push_back(dbl("curve.max", c.curve.max));
  f.push_back(integer("curve.n", c.curve.n));
  f.push_back(opt_dbl("curve.threshold", c.curve.threshold));
  f.push_back(axis_field("heatmap.axis1", c.heatmap.axis1, 1));
  f.push_back(opt_dbl("heatmap.axis1_min", c.heatmap.axis1.min));
  f.push_back(opt_dbl("heatmap.axis1_max", c.heatmap.axis1.max));
  f.push_back(opt_int("heatmap.axis1_n", c.heatmap.axis1.n));
  f.push_back(axis_field("heatmap.axis2", c.heatmap.axis2, 2));
  f.push_back(opt_dbl("heatmap.axis2_min", c.heatmap.axis2.min));
  f.push_back(opt_dbl("heatmap.axis2_max", c.heatmap.axis2.max));
  f.push_back(opt_int("heatmap.axis2_n", c.heatmap.axis2.n));
  f.push_back(dbl("heatmap.distance", c.heatmap.distance));
  f.push_back(str("validate.suite", c.validate.suite));
  f.push_back(dbl("loss.lon_min", c.loss.lon_min));
  f.push_back(dbl("loss.lon_max", c.loss.lon_max));
  f.push_back(dbl("loss.lat_min", c.loss.lat_min));
  f.push_back(dbl("loss.lat_max", c.loss.lat_max));
  f.push_back(dbl("loss.resolution", c.loss.resolution));
  f.push_back(dbl("loss.exposure", c.loss.exposure));
  f.push_back(opt_dbl("cov.h", c.cov.h));
  f.push_back(dbl("cov.distance", c.cov.distance));
  f.push_back(integer("run.threads", c.threads));
  return f;
}

// Re-raise a library error as a configuration error for `path`.
template <class Fn>
auto as_config(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    config_error(path, e.what());
  }
}

MarginPowerSpec margin_from(const std::string& path, const MarginFields& m) {
  return as_config(path, [&] {
    return MarginPowerSpec(GevParams(m.eta, m.tau, m.xi), IntegerPower(m.beta));
  });
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string format_double_exact(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double HeatmapAxis::lo() const {
  if (min) return *min;
  switch (param) {
    case HeatmapParam::Beta: return 1;
    case HeatmapParam::Eta: return 15;
    case HeatmapParam::Tau: return 2;
    case HeatmapParam::Xi: return -0.2;
  }
  return 0;
}

double HeatmapAxis::hi() const {
  if (max) return *max;
  switch (param) {
    case HeatmapParam::Beta: return 12;
    case HeatmapParam::Eta: return 35;
    case HeatmapParam::Tau: return 4;
    case HeatmapParam::Xi: return -0.06;
  }
  return 0;
}

int HeatmapAxis::count() const {
  if (n) return *n;
  switch (param) {
    case HeatmapParam::Beta: return static_cast<int>(std::floor(hi()) - std::ceil(lo())) + 1;
    case HeatmapParam::Eta: return 21;
    case HeatmapParam::Tau: return 21;
    case HeatmapParam::Xi: return 15;
  }
  return 0;
}

std::vector<double> HeatmapAxis::values() const {
  std::vector<double> v;
  if (param == HeatmapParam::Beta) {
    for (double b = std::ceil(lo()); b <= hi(); b += 1.0) v.push_back(b);
    return v;
  }
  const int k = count();
  for (int i = 0; i < k; ++i) {
    v.push_back(k == 1 ? lo() : lo() + (hi() - lo()) * i / (k - 1));
  }
  return v;
}

std::string HeatmapAxis::name() const { return std::string(param_name(param)) + std::to_string(site); }

SemivariogramModel RunConfig::model() const {
  if (variogram.type == "power") {
    return as_config("variogram", [&] { return SemivariogramModel::power(variogram.kappa, variogram.psi); });
  }
  if (variogram.type == "smith") {
    return as_config("variogram",
                     [&] { return SemivariogramModel::smith(variogram.s11, variogram.s12, variogram.s22); });
  }
  config_error("variogram.type", "expected power or smith, got '" + variogram.type + "'");
}

MarginPowerSpec RunConfig::margin_spec() const { return margin_from("margin", margin); }

MarginPowerSpec RunConfig::margin2_spec() const {
  return margin2 ? margin_from("margin2", *margin2) : margin_spec();
}

BrownResnickSpec RunConfig::brown_resnick() const { return {model(), margin_spec()}; }

DamageFunctionSpec RunConfig::damage_spec() const {
  const int b = damage.beta.value_or(margin.beta);
  DamageFunctionSpec d = as_config("damage", [&] { return DamageFunctionSpec(damage.c1, b); });
  margin_from("damage", {margin.eta, margin.tau, margin.xi, b});
  return d;
}

Region RunConfig::region() const {
  return as_config("loss", [&] {
    return Region(loss.lon_min, loss.lon_max, loss.lat_min, loss.lat_max, loss.resolution);
  });
}

void RunConfig::validate_all() const {
  (void)model();
  (void)margin_spec();
  (void)margin2_spec();
  (void)damage_spec();
  (void)region();
  as_config("quadrature", [&] { quadrature.validate(); });
  as_config("mc", [&] { mc.validate(); });
  if (output.format != "csv" && output.format != "json")
    config_error("output.format", "expected csv or json, got '" + output.format + "'");
  if (!(curve.min >= 0.0)) config_error("curve.min", "must be >= 0");
  if (!(curve.max > curve.min)) config_error("curve.max", "must be > curve.min");
  if (curve.n < 2) config_error("curve.n", "must be >= 2");
  if (curve.threshold && !(*curve.threshold > 0.0 && *curve.threshold < 1.0))
    config_error("curve.threshold", "must lie in (0, 1)");
  for (const auto* ax : {&heatmap.axis1, &heatmap.axis2}) {
    const std::string sec = ax == &heatmap.axis1 ? "heatmap.axis1" : "heatmap.axis2";
    if (!(ax->hi() >= ax->lo())) config_error(sec + "_max", "must be >= " + sec + "_min");
    if (ax->count() < 1 || ax->values().empty()) config_error(sec + "_n", "axis has no grid points");
  }
  if (heatmap.axis1.param == heatmap.axis2.param && heatmap.axis1.site == heatmap.axis2.site)
    config_error("heatmap.axis2", "both axes vary " + heatmap.axis1.name());
  if (!(heatmap.distance >= 0.0)) config_error("heatmap.distance", "must be >= 0");
  if (validate.suite != "quick" && validate.suite != "full")
    config_error("validate.suite", "expected quick or full, got '" + validate.suite + "'");
  if (!(loss.exposure > 0.0)) config_error("loss.exposure", "must be > 0");
  if (cov.h && !(*cov.h >= 0.0)) config_error("cov.h", "must be >= 0");
  if (!(cov.distance >= 0.0)) config_error("cov.distance", "must be >= 0");
  if (threads < 1) config_error("run.threads", "must be >= 1");
}

void config_set(RunConfig& cfg, const std::string& path, const std::string& value) {
  auto f = fields(cfg);
  const auto it = std::find_if(f.begin(), f.end(), [&](const Field& x) { return x.path == path; });
  if (it == f.end()) config_error(path, "unknown key");
  it->set(trim(value));
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') config_error("line " + std::to_string(lineno), "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno), "expected key = value");
    if (section.empty()) config_error("line " + std::to_string(lineno), "key outside of a [section]");
    std::string value = trim(t.substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    config_set(cfg, section + "." + trim(t.substr(0, eq)), value);
  }
  cfg.validate_all();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Config, path + ": invalid JSON: " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object())
      throw Error(ErrorKind::Config, path + ": JSON file has no 'config' object");
    RunConfig cfg;
    for (const auto& [k, v] : j["config"].items()) {
      config_set(cfg, k, v.is_string() ? v.get<std::string>() : v.dump());
    }
    cfg.validate_all();
    return cfg;
  }
  std::istringstream in(text);
  std::string line;
  std::string embedded;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("#! ", 0) == 0) {
      embedded += line.substr(3) + "\n";
      found = true;
    } else if (line == "#!") {
      embedded += "\n";
      found = true;
    }
  }
  return parse_config(found ? embedded : text);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields(copy)) {
    if (auto v = f.get()) out.emplace_back(f.path, *v);
  }
  return out;
}

std::string config_to_ini(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& [path, value] : config_entries(cfg)) {
    const auto dot = path.find('.');
    const std::string sec = path.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += path.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

}  // namespace hrcorr
