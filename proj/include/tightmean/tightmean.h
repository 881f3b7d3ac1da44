#ifndef TIGHTMEAN_H
#define TIGHTMEAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TM_API __declspec(dllexport)
#else
#define TM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tm_status {
  TM_OK = 0,
  TM_INVALID_ARGUMENT = 1,
  TM_TOO_FEW_SAMPLES = 2,
  TM_EMPTY_INPUT = 3,
  TM_EMPTY_REGION = 4,
  TM_NO_IMPROVED_SLACK = 5,
  TM_NET_TOO_LARGE = 6,
  TM_INFEASIBLE = 7,
  TM_HYPOTHESIS_VIOLATED = 8,
  TM_INVALID_SPEC = 9,
  TM_IO_ERROR = 10,
  TM_INTERNAL = 11
} tm_status;

typedef struct tm_psi tm_psi;
typedef struct tm_estimator2d tm_estimator2d;

/* Message for the last failing call on this thread; never NULL. */
TM_API const char* tm_last_error(void);
TM_API const char* tm_status_string(tm_status status);

/* kind: "clipped-cubic-sqrt2", "clipped-cubic-one", "catoni-upper-log",
   "catoni-lower-log" or "identity". */
TM_API tm_status tm_psi_create(const char* kind, tm_psi** out);
TM_API void tm_psi_destroy(tm_psi* psi);
TM_API tm_status tm_psi_eval(const tm_psi* psi, double x, double* out);
TM_API tm_status tm_psi_eta(const tm_psi* psi, double beta, double* eta);

TM_API tm_status tm_median_of_means(const double* samples, size_t n, double delta, double* out);

/* psi may be NULL for the default clipped cubic. */
TM_API tm_status tm_catoni(const double* samples, size_t n, double delta, double sigma,
                           const tm_psi* psi, double xi, double* value, double* half_width);

/* Pass tau < 0 to derive it from the psi slack. */
TM_API tm_status tm_estimator2d_create(double delta, double sigma, const tm_psi* psi, double beta,
                                       double L, double xi, double tau, tm_estimator2d** out);
TM_API void tm_estimator2d_destroy(tm_estimator2d* est);
/* xy holds n points interleaved (x0, y0, x1, y1, ...). inlier_path may be NULL. */
TM_API tm_status tm_estimator2d_run(const tm_estimator2d* est, const double* xy, size_t n,
                                    double out[2], double* claimed_radius, int* inlier_path);

/* points is column-major d x n (point k at points + k d). */
TM_API tm_status tm_hd_estimate(const double* points, size_t d, size_t n, double delta,
                                double sigma, double* out, double* claimed_radius, int* feasible);
TM_API tm_status tm_min_enclosing_ball(const double* points, size_t d, size_t n, double* center,
                                       double* radius);
TM_API tm_status tm_jung_constant(int d, double* out);

/* Runs a harness subcommand with a JSON config. *report_json receives the
   summary (free it with tm_string_free); *exit_code the process exit code. */
TM_API tm_status tm_run_command(const char* command, const char* config_json, char** report_json,
                                int* exit_code);
TM_API void tm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
