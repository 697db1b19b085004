#ifndef HRCORR_HRCORR_H
#define HRCORR_HRCORR_H

/* C interface to the hrcorr library: correlations between powers of
 * bivariate Hüsler-Reiss vectors and Brown-Resnick fields.
 *
 * Every function returns an hrcorr_status. On failure the message of the
 * most recent error on the calling thread is available from
 * hrcorr_last_error(). Strings handed out by the library are released with
 * hrcorr_string_free(). */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HRCORR_API __declspec(dllexport)
#else
#define HRCORR_API __attribute__((visibility("default")))
#endif

typedef enum hrcorr_status {
  HRCORR_OK = 0,
  HRCORR_E_DOMAIN = 1,
  HRCORR_E_CONSTRAINT = 2,
  HRCORR_E_NONCONVERGENCE = 3,
  HRCORR_E_CONFIG = 4,
  HRCORR_E_IO = 5,
  HRCORR_E_VALIDATION = 6,
  HRCORR_E_ARGUMENT = 7,
  HRCORR_E_INTERNAL = 8
} hrcorr_status;

/* Covariance evaluation strategy; see README. */
typedef enum hrcorr_method {
  HRCORR_METHOD_AUTO = 0,
  HRCORR_METHOD_CLOSED_FORM = 1,
  HRCORR_METHOD_RESUMMED = 2
} hrcorr_method;

/* GEV margin (eta, tau, xi) and integer power beta. */
typedef struct hrcorr_margin {
  double eta;
  double tau;
  double xi;
  int beta;
} hrcorr_margin;

typedef struct hrcorr_config hrcorr_config;

HRCORR_API const char* hrcorr_version(void);
HRCORR_API const char* hrcorr_last_error(void);
HRCORR_API const char* hrcorr_status_name(hrcorr_status s);
HRCORR_API void hrcorr_string_free(char* s);

/* Configuration ----------------------------------------------------------- */

HRCORR_API hrcorr_status hrcorr_config_new(hrcorr_config** out);
/* Reads a config file or the configuration embedded in a CSV/JSON output. */
HRCORR_API hrcorr_status hrcorr_config_load(const char* path, hrcorr_config** out);
HRCORR_API hrcorr_status hrcorr_config_parse(const char* text, hrcorr_config** out);
/* key is "section.key", e.g. "variogram.psi". */
HRCORR_API hrcorr_status hrcorr_config_set(hrcorr_config* cfg, const char* key, const char* value);
HRCORR_API hrcorr_status hrcorr_config_get(const hrcorr_config* cfg, const char* key, char** value);
HRCORR_API hrcorr_status hrcorr_config_validate(const hrcorr_config* cfg);
HRCORR_API hrcorr_status hrcorr_config_to_ini(const hrcorr_config* cfg, char** text);
HRCORR_API void hrcorr_config_free(hrcorr_config* cfg);

/* Commands: each renders a CSV or JSON document (per output.format) into
 * *document and a one-line summary into *summary (either may be NULL).
 * hrcorr_cmd_validate returns HRCORR_E_VALIDATION when a case disagrees; the
 * document is still produced. */

typedef void (*hrcorr_progress_fn)(const char* line, void* user);

HRCORR_API hrcorr_status hrcorr_cmd_curve(const hrcorr_config* cfg, char** document, char** summary);
HRCORR_API hrcorr_status hrcorr_cmd_heatmap(const hrcorr_config* cfg, char** document, char** summary);
HRCORR_API hrcorr_status hrcorr_cmd_validate(const hrcorr_config* cfg, hrcorr_progress_fn progress,
                                             void* user, char** document, char** summary);
HRCORR_API hrcorr_status hrcorr_cmd_loss_variance(const hrcorr_config* cfg, char** document,
                                                  char** summary);
HRCORR_API hrcorr_status hrcorr_cmd_cov(const hrcorr_config* cfg, char** document, char** summary);

/* Numerical functions ------------------------------------------------------ */
/* h = INFINITY selects the independent case. rel_tol <= 0 selects 1e-13. */

HRCORR_API hrcorr_status hrcorr_gamma(double x, double* out);
HRCORR_API hrcorr_status hrcorr_hr_cdf(double z1, double z2, double h, double* out);
HRCORR_API hrcorr_status hrcorr_hr_density(double z1, double z2, double h, double* out);
HRCORR_API hrcorr_status hrcorr_i_integral(double beta1, double beta2, double h, double rel_tol,
                                           double* out);
HRCORR_API hrcorr_status hrcorr_cov_simple_powers(double beta1, double beta2, double h, double rel_tol,
                                                  double* out);
HRCORR_API hrcorr_status hrcorr_gev_var(const hrcorr_margin* m, double rel_tol, hrcorr_method method,
                                        double* out);
HRCORR_API hrcorr_status hrcorr_gev_cov(const hrcorr_margin* m1, const hrcorr_margin* m2, double h,
                                        double rel_tol, hrcorr_method method, double* out);
HRCORR_API hrcorr_status hrcorr_gev_corr(const hrcorr_margin* m1, const hrcorr_margin* m2, double h,
                                         double rel_tol, hrcorr_method method, double* out);
/* Average of the covariance at xi = +eps and -eps for margins with xi = 0. */
HRCORR_API hrcorr_status hrcorr_gev_cov_gumbel_limit(const hrcorr_margin* m1, const hrcorr_margin* m2,
                                                     double h, double rel_tol, double eps, double* out);

/* Brown-Resnick quantities under the variogram and margin of cfg. */
HRCORR_API hrcorr_status hrcorr_lag_to_h(const hrcorr_config* cfg, double dx, double dy, double* out);
HRCORR_API hrcorr_status hrcorr_dependence_measure(const hrcorr_config* cfg, double dx, double dy,
                                                   double* out);
HRCORR_API hrcorr_status hrcorr_threshold_distance(const hrcorr_config* cfg, double level, double* out);
/* Cost correlation with damage (c1, beta) and constant exposure. */
HRCORR_API hrcorr_status hrcorr_cost_correlation(const hrcorr_config* cfg, double c1, int beta,
                                                 double dx, double dy, double* out);
HRCORR_API hrcorr_status hrcorr_loss_variance(const hrcorr_config* cfg, double resolution,
                                              double exposure, double* out);

#ifdef __cplusplus
}
#endif

#endif
