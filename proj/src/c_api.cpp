#include "tightmean/tightmean.h"

#include <cstring>
#include <new>
#include <string>

#include "tightmean/error.hpp"
#include "tightmean/estimators1d.hpp"
#include "tightmean/estimators2d.hpp"
#include "tightmean/estimators_hd.hpp"
#include "tightmean/geometry.hpp"
#include "tightmean/harness.hpp"
#include "tightmean/psi.hpp"

struct tm_psi {
  tightmean::PsiFunction f;
};

struct tm_estimator2d {
  tightmean::Estimator2DConfig cfg;
};

namespace {

thread_local std::string last_error;

tm_status status_of(tightmean::ErrorCode c) {
  using tightmean::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return TM_INVALID_ARGUMENT;
    case ErrorCode::TooFewSamples: return TM_TOO_FEW_SAMPLES;
    case ErrorCode::EmptyInput: return TM_EMPTY_INPUT;
    case ErrorCode::EmptyRegion: return TM_EMPTY_REGION;
    case ErrorCode::NoImprovedSlack: return TM_NO_IMPROVED_SLACK;
    case ErrorCode::NetTooLarge: return TM_NET_TOO_LARGE;
    case ErrorCode::Infeasible: return TM_INFEASIBLE;
    case ErrorCode::HypothesisViolated: return TM_HYPOTHESIS_VIOLATED;
    case ErrorCode::InvalidSpec: return TM_INVALID_SPEC;
    case ErrorCode::IoError: return TM_IO_ERROR;
    case ErrorCode::Internal: return TM_INTERNAL;
  }
  return TM_INTERNAL;
}

template <class F>
tm_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TM_OK;
  } catch (const tightmean::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return TM_INVALID_SPEC;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TM_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TM_INTERNAL;
  }
}

tm_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return TM_INVALID_ARGUMENT;
}

tightmean::PsiFunction psi_or_default(const tm_psi* psi) {
  return psi ? psi->f : tightmean::PsiFunction{};
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* tm_last_error(void) { return last_error.c_str(); }

const char* tm_status_string(tm_status status) {
  switch (status) {
    case TM_OK: return "ok";
    case TM_INVALID_ARGUMENT: return "invalid argument";
    case TM_TOO_FEW_SAMPLES: return "too few samples";
    case TM_EMPTY_INPUT: return "empty input";
    case TM_EMPTY_REGION: return "empty region";
    case TM_NO_IMPROVED_SLACK: return "no improved slack";
    case TM_NET_TOO_LARGE: return "net too large";
    case TM_INFEASIBLE: return "infeasible";
    case TM_HYPOTHESIS_VIOLATED: return "hypothesis violated";
    case TM_INVALID_SPEC: return "invalid spec";
    case TM_IO_ERROR: return "i/o error";
    case TM_INTERNAL: return "internal error";
  }
  return "unknown status";
}

tm_status tm_psi_create(const char* kind, tm_psi** out) {
  if (!kind) return null_argument("kind");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new tm_psi{tightmean::PsiFunction(tightmean::psi_kind_from_string(kind))}; });
}

void tm_psi_destroy(tm_psi* psi) { delete psi; }

tm_status tm_psi_eval(const tm_psi* psi, double x, double* out) {
  if (!psi) return null_argument("psi");
  if (!out) return null_argument("out");
  *out = psi->f(x);
  last_error.clear();
  return TM_OK;
}

tm_status tm_psi_eta(const tm_psi* psi, double beta, double* eta) {
  if (!psi) return null_argument("psi");
  if (!eta) return null_argument("eta");
  return guarded([&] { *eta = tightmean::compute_eta(psi->f, beta); });
}

tm_status tm_median_of_means(const double* samples, size_t n, double delta, double* out) {
  if (!samples && n > 0) return null_argument("samples");
  if (!out) return null_argument("out");
  return guarded([&] { *out = tightmean::median_of_means({samples, n}, delta); });
}

tm_status tm_catoni(const double* samples, size_t n, double delta, double sigma, const tm_psi* psi,
                    double xi, double* value, double* half_width) {
  if (!samples && n > 0) return null_argument("samples");
  if (!value) return null_argument("value");
  return guarded([&] {
    const auto e = tightmean::catoni({samples, n}, delta, sigma, psi_or_default(psi), xi);
    *value = e.value;
    if (half_width) *half_width = e.half_width;
  });
}

tm_status tm_estimator2d_create(double delta, double sigma, const tm_psi* psi, double beta, double L,
                                double xi, double tau, tm_estimator2d** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new tm_estimator2d{
        tightmean::Estimator2DConfig::make(delta, sigma, psi_or_default(psi), beta, L, xi, tau)};
  });
}

void tm_estimator2d_destroy(tm_estimator2d* est) { delete est; }

tm_status tm_estimator2d_run(const tm_estimator2d* est, const double* xy, size_t n, double out[2],
                             double* claimed_radius, int* inlier_path) {
  if (!est) return null_argument("est");
  if (!xy && n > 0) return null_argument("xy");
  if (!out) return null_argument("out");
  return guarded([&] {
    const Eigen::Map<const Eigen::MatrixXd> pts(xy, 2, static_cast<Eigen::Index>(n));
    const auto e = tightmean::heavy_tailed_estimator_2d(pts, est->cfg);
    out[0] = e.value.x();
    out[1] = e.value.y();
    if (claimed_radius) *claimed_radius = e.claimed_radius;
    if (inlier_path) *inlier_path = e.path == tightmean::EstimatorPath::InlierLight;
  });
}

tm_status tm_hd_estimate(const double* points, size_t d, size_t n, double delta, double sigma,
                         double* out, double* claimed_radius, int* feasible) {
  if (!points && n > 0) return null_argument("points");
  if (!out) return null_argument("out");
  return guarded([&] {
    const Eigen::Map<const Eigen::MatrixXd> pts(points, static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(n));
    const auto e = tightmean::hd_estimator(pts, delta, sigma);
    Eigen::Map<Eigen::VectorXd>(out, static_cast<Eigen::Index>(d)) = e.value;
    if (claimed_radius) *claimed_radius = e.diagnostics.claimed_radius;
    if (feasible) *feasible = e.diagnostics.feasible;
  });
}

tm_status tm_min_enclosing_ball(const double* points, size_t d, size_t n, double* center, double* radius) {
  if (!points && n > 0) return null_argument("points");
  if (!center) return null_argument("center");
  if (!radius) return null_argument("radius");
  return guarded([&] {
    const Eigen::Map<const Eigen::MatrixXd> pts(points, static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(n));
    const auto b = tightmean::min_enclosing_ball(pts);
    Eigen::Map<Eigen::VectorXd>(center, static_cast<Eigen::Index>(d)) = b.center;
    *radius = b.radius;
  });
}

tm_status tm_jung_constant(int d, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = tightmean::jung_constant(d); });
}

tm_status tm_run_command(const char* command, const char* config_json, char** report_json, int* exit_code) {
  if (!command) return null_argument("command");
  if (!report_json) return null_argument("report_json");
  if (!exit_code) return null_argument("exit_code");
  *report_json = nullptr;
  const tm_status st = guarded([&] {
    const auto doc = nlohmann::json::parse(config_json && *config_json ? config_json : "{}");
    const auto cfg = tightmean::config_from_json(doc);
    const auto result = tightmean::run_command(command, cfg);
    *report_json = copy_string(result.summary.dump());
    *exit_code = result.exit_code;
  });
  if (st != TM_OK) {
    *exit_code = st == TM_IO_ERROR ? tightmean::kExitIoError : tightmean::kExitConfigError;
    *report_json = copy_string(nlohmann::json{{"error", last_error}, {"status", tm_status_string(st)}}.dump());
  }
  return st;
}

void tm_string_free(char* s) { delete[] s; }

}  // extern "C"
