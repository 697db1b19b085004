#include "hrcorr/hrcorr.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "error.hpp"

struct hrcorr_config {
  hrcorr::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

hrcorr_status status_of(hrcorr::ErrorKind k) {
  using hrcorr::ErrorKind;
  switch (k) {
    case ErrorKind::Domain: return HRCORR_E_DOMAIN;
    case ErrorKind::Constraint: return HRCORR_E_CONSTRAINT;
    case ErrorKind::NonConvergence: return HRCORR_E_NONCONVERGENCE;
    case ErrorKind::Config: return HRCORR_E_CONFIG;
    case ErrorKind::Io: return HRCORR_E_IO;
  }
  return HRCORR_E_INTERNAL;
}

hrcorr_status fail(hrcorr_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
hrcorr_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const hrcorr::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HRCORR_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HRCORR_E_INTERNAL, e.what());
  } catch (...) {
    return fail(HRCORR_E_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

hrcorr::QuadratureSpec quad(double rel_tol) {
  auto q = hrcorr::QuadratureSpec::headline();
  if (rel_tol > 0.0) q.relative_tolerance = rel_tol;
  q.validate();
  return q;
}

hrcorr::HrParams hr(double h) {
  if (std::isinf(h) && h > 0.0) return hrcorr::HrParams::independent();
  return hrcorr::HrParams::finite(h);
}

hrcorr::MarginPowerSpec margin(const hrcorr_margin* m) {
  return {hrcorr::GevParams(m->eta, m->tau, m->xi), hrcorr::IntegerPower(m->beta)};
}

hrcorr::CovMethod method_of(hrcorr_method m) {
  switch (m) {
    case HRCORR_METHOD_CLOSED_FORM: return hrcorr::CovMethod::ClosedForm;
    case HRCORR_METHOD_RESUMMED: return hrcorr::CovMethod::Resummed;
    default: return hrcorr::CovMethod::Auto;
  }
}

template <class Cmd>
hrcorr_status run_command(const hrcorr_config* cfg, char** document, char** summary, Cmd&& cmd) {
  if (!cfg) return fail(HRCORR_E_ARGUMENT, "config is null");
  return guarded([&] {
    hrcorr::CommandOutput o = cmd(cfg->cfg);
    char* d = document ? dup(o.document) : nullptr;
    char* s = nullptr;
    try {
      s = summary ? dup(o.summary) : nullptr;
    } catch (...) {
      std::free(d);
      throw;
    }
    if (document) *document = d;
    if (summary) *summary = s;
    if (!o.validation_passed) return fail(HRCORR_E_VALIDATION, "validation failed: " + o.summary);
    return HRCORR_OK;
  });
}

#define HRCORR_REQUIRE(p)                                              \
  do {                                                                 \
    if (!(p)) return fail(HRCORR_E_ARGUMENT, #p " is null");           \
  } while (0)

}  // namespace

extern "C" {

const char* hrcorr_version(void) { return "1.0.0"; }

const char* hrcorr_last_error(void) { return g_last_error.c_str(); }

const char* hrcorr_status_name(hrcorr_status s) {
  switch (s) {
    case HRCORR_OK: return "ok";
    case HRCORR_E_DOMAIN: return "domain error";
    case HRCORR_E_CONSTRAINT: return "constraint violation";
    case HRCORR_E_NONCONVERGENCE: return "non-convergence";
    case HRCORR_E_CONFIG: return "configuration error";
    case HRCORR_E_IO: return "i/o error";
    case HRCORR_E_VALIDATION: return "validation failure";
    case HRCORR_E_ARGUMENT: return "invalid argument";
    case HRCORR_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void hrcorr_string_free(char* s) { std::free(s); }

hrcorr_status hrcorr_config_new(hrcorr_config** out) {
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = new hrcorr_config{};
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_config_load(const char* path, hrcorr_config** out) {
  HRCORR_REQUIRE(path);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = new hrcorr_config{hrcorr::load_config(path)};
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_config_parse(const char* text, hrcorr_config** out) {
  HRCORR_REQUIRE(text);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = new hrcorr_config{hrcorr::parse_config(text)};
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_config_set(hrcorr_config* cfg, const char* key, const char* value) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(key);
  HRCORR_REQUIRE(value);
  return guarded([&] {
    hrcorr::config_set(cfg->cfg, key, value);
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_config_get(const hrcorr_config* cfg, const char* key, char** value) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(key);
  HRCORR_REQUIRE(value);
  return guarded([&] {
    for (const auto& [k, v] : hrcorr::config_entries(cfg->cfg)) {
      if (k == key) {
        *value = dup(v);
        return HRCORR_OK;
      }
    }
    return fail(HRCORR_E_CONFIG, std::string(key) + ": unknown or unset key");
  });
}

hrcorr_status hrcorr_config_validate(const hrcorr_config* cfg) {
  HRCORR_REQUIRE(cfg);
  return guarded([&] {
    cfg->cfg.validate_all();
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_config_to_ini(const hrcorr_config* cfg, char** text) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(text);
  return guarded([&] {
    *text = dup(hrcorr::config_to_ini(cfg->cfg));
    return HRCORR_OK;
  });
}

void hrcorr_config_free(hrcorr_config* cfg) { delete cfg; }

hrcorr_status hrcorr_cmd_curve(const hrcorr_config* cfg, char** document, char** summary) {
  return run_command(cfg, document, summary, [](const hrcorr::RunConfig& c) { return hrcorr::cmd_curve(c); });
}

hrcorr_status hrcorr_cmd_heatmap(const hrcorr_config* cfg, char** document, char** summary) {
  return run_command(cfg, document, summary,
                     [](const hrcorr::RunConfig& c) { return hrcorr::cmd_heatmap(c); });
}

hrcorr_status hrcorr_cmd_validate(const hrcorr_config* cfg, hrcorr_progress_fn progress, void* user,
                                  char** document, char** summary) {
  hrcorr::ProgressFn fn;
  if (progress) fn = [progress, user](const std::string& line) { progress(line.c_str(), user); };
  return run_command(cfg, document, summary,
                     [&](const hrcorr::RunConfig& c) { return hrcorr::cmd_validate(c, fn); });
}

hrcorr_status hrcorr_cmd_loss_variance(const hrcorr_config* cfg, char** document, char** summary) {
  return run_command(cfg, document, summary,
                     [](const hrcorr::RunConfig& c) { return hrcorr::cmd_loss_variance(c); });
}

hrcorr_status hrcorr_cmd_cov(const hrcorr_config* cfg, char** document, char** summary) {
  return run_command(cfg, document, summary, [](const hrcorr::RunConfig& c) { return hrcorr::cmd_cov(c); });
}

hrcorr_status hrcorr_gamma(double x, double* out) {
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::gamma_fn(x);
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_hr_cdf(double z1, double z2, double h, double* out) {
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::hr_cdf(z1, z2, hr(h));
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_hr_density(double z1, double z2, double h, double* out) {
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::hr_density(z1, z2, hr(h));
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_i_integral(double beta1, double beta2, double h, double rel_tol, double* out) {
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::i_integral({beta1, beta2}, hr(h), quad(rel_tol));
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_cov_simple_powers(double beta1, double beta2, double h, double rel_tol, double* out) {
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::cov_simple_powers({beta1, beta2}, hr(h), quad(rel_tol));
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_gev_var(const hrcorr_margin* m, double rel_tol, hrcorr_method method, double* out) {
  HRCORR_REQUIRE(m);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::var_gev_power(margin(m), quad(rel_tol), method_of(method));
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_gev_cov(const hrcorr_margin* m1, const hrcorr_margin* m2, double h, double rel_tol,
                             hrcorr_method method, double* out) {
  HRCORR_REQUIRE(m1);
  HRCORR_REQUIRE(m2);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::cov_gev_powers(margin(m1), margin(m2), hr(h), quad(rel_tol), method_of(method));
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_gev_corr(const hrcorr_margin* m1, const hrcorr_margin* m2, double h, double rel_tol,
                              hrcorr_method method, double* out) {
  HRCORR_REQUIRE(m1);
  HRCORR_REQUIRE(m2);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::corr_gev_powers(margin(m1), margin(m2), hr(h), quad(rel_tol), method_of(method));
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_gev_cov_gumbel_limit(const hrcorr_margin* m1, const hrcorr_margin* m2, double h,
                                          double rel_tol, double eps, double* out) {
  HRCORR_REQUIRE(m1);
  HRCORR_REQUIRE(m2);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::cov_gev_powers_gumbel_limit(margin(m1), margin(m2), hr(h), quad(rel_tol), eps);
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_lag_to_h(const hrcorr_config* cfg, double dx, double dy, double* out) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::lag_to_h({dx, dy}, cfg->cfg.model());
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_dependence_measure(const hrcorr_config* cfg, double dx, double dy, double* out) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::dependence_measure(cfg->cfg.brown_resnick(), {0.0, 0.0}, {dx, dy}, cfg->cfg.quadrature);
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_threshold_distance(const hrcorr_config* cfg, double level, double* out) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::threshold_distance(cfg->cfg.brown_resnick(), level, cfg->cfg.quadrature);
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_cost_correlation(const hrcorr_config* cfg, double c1, int beta, double dx, double dy,
                                      double* out) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    *out = hrcorr::cost_correlation(cfg->cfg.brown_resnick(), hrcorr::DamageFunctionSpec(c1, beta), {0.0, 0.0},
                                    {dx, dy}, cfg->cfg.quadrature);
    return HRCORR_OK;
  });
}

hrcorr_status hrcorr_loss_variance(const hrcorr_config* cfg, double resolution, double exposure,
                                   double* out) {
  HRCORR_REQUIRE(cfg);
  HRCORR_REQUIRE(out);
  return guarded([&] {
    hrcorr::RunConfig c = cfg->cfg;
    c.loss.resolution = resolution;
    const auto r = hrcorr::loss_variance(c.brown_resnick(), c.damage_spec(), c.region(), exposure,
                                         c.quadrature, c.threads);
    *out = r.value;
    return HRCORR_OK;
  });
}

}  // extern "C"
