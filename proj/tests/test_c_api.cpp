#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "tightmean/tightmean.h"

TEST_CASE("status strings and last error") {
  CHECK(std::string(tm_status_string(TM_OK)) == "ok");
  CHECK(std::string(tm_status_string(TM_TOO_FEW_SAMPLES)) == "too few samples");
  double x = 0;
  CHECK(tm_jung_constant(2, &x) == TM_OK);
  CHECK(x == doctest::Approx(std::sqrt(4.0 / 3.0)));
  CHECK(std::string(tm_last_error()).empty());
  CHECK(tm_jung_constant(0, &x) == TM_INVALID_ARGUMENT);
  CHECK(std::strlen(tm_last_error()) > 0);
  CHECK(tm_jung_constant(2, nullptr) == TM_INVALID_ARGUMENT);
}

TEST_CASE("psi handles") {
  tm_psi* psi = nullptr;
  REQUIRE(tm_psi_create("clipped-cubic-sqrt2", &psi) == TM_OK);
  double y = 0;
  CHECK(tm_psi_eval(psi, 0.5, &y) == TM_OK);
  CHECK(y == doctest::Approx(0.5 - 0.125 / 6));
  CHECK(tm_psi_eval(psi, 10.0, &y) == TM_OK);
  CHECK(y == doctest::Approx(2 * std::sqrt(2.0) / 3));
  double eta = 0;
  CHECK(tm_psi_eta(psi, 0.125, &eta) == TM_OK);
  CHECK(eta > 0);
  tm_psi_destroy(psi);

  tm_psi* log_form = nullptr;
  REQUIRE(tm_psi_create("catoni-upper-log", &log_form) == TM_OK);
  CHECK(tm_psi_eta(log_form, 0.125, &eta) == TM_NO_IMPROVED_SLACK);
  tm_psi_destroy(log_form);

  tm_psi* bad = nullptr;
  CHECK(tm_psi_create("cubic", &bad) == TM_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(tm_psi_eval(nullptr, 1.0, &y) == TM_INVALID_ARGUMENT);
  tm_psi_destroy(nullptr);
}

TEST_CASE("one-dimensional estimators") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g(4.0, 1.0);
  std::vector<double> xs(5000);
  for (double& v : xs) v = g(gen);
  double mom = 0;
  CHECK(tm_median_of_means(xs.data(), xs.size(), 0.01, &mom) == TM_OK);
  CHECK(std::abs(mom - 4.0) < 0.1);
  double value = 0, hw = 0;
  CHECK(tm_catoni(xs.data(), xs.size(), 0.01, 1.0, nullptr, 0.05, &value, &hw) == TM_OK);
  CHECK(std::abs(value - 4.0) < 0.1);
  CHECK(hw > 0);
  CHECK(tm_catoni(xs.data(), 10, 0.01, 1.0, nullptr, 0.05, &value, &hw) == TM_TOO_FEW_SAMPLES);
  CHECK(tm_median_of_means(xs.data(), 0, 0.01, &mom) == TM_EMPTY_INPUT);
}

TEST_CASE("two-dimensional estimator handle") {
  tm_estimator2d* est = nullptr;
  CHECK(tm_estimator2d_create(0.01, 1.0, nullptr, 0.1, 0.35, 0.05, -1, &est) == TM_INVALID_ARGUMENT);
  REQUIRE(tm_estimator2d_create(0.01, 1.0, nullptr, 1.0 / 96, 0.35, 0.05, -1, &est) == TM_OK);
  std::mt19937_64 gen(2);
  std::normal_distribution<double> g(0.0, 1.0);
  const size_t n = 20000;
  std::vector<double> xy(2 * n);
  for (size_t i = 0; i < n; ++i) {
    xy[2 * i] = 1.0 + g(gen);
    xy[2 * i + 1] = -2.0 + g(gen);
  }
  double out[2] = {0, 0}, radius = 0;
  int inlier = -1;
  CHECK(tm_estimator2d_run(est, xy.data(), n, out, &radius, &inlier) == TM_OK);
  CHECK(std::hypot(out[0] - 1.0, out[1] + 2.0) < 0.1);
  CHECK(radius > 0);
  CHECK((inlier == 0 || inlier == 1));
  CHECK(tm_estimator2d_run(est, xy.data(), 10, out, &radius, nullptr) == TM_TOO_FEW_SAMPLES);
  tm_estimator2d_destroy(est);
}

TEST_CASE("geometry and high-dimensional entry points") {
  const double pts[] = {0, 0, 0, 2, 0, 0, 0, 2, 0};
  double center[3], radius = 0;
  CHECK(tm_min_enclosing_ball(pts, 3, 3, center, &radius) == TM_OK);
  CHECK(radius == doctest::Approx(std::sqrt(2.0)));
  CHECK(center[0] == doctest::Approx(1.0));
  CHECK(center[1] == doctest::Approx(1.0));
  CHECK(std::abs(center[2]) < 1e-12);

  const size_t d = 3, n = 4800;
  std::vector<double> x(d * n, 0.5);
  double out[3];
  int feasible = 0;
  CHECK(tm_hd_estimate(x.data(), d, n, 0.05, 1.0, out, &radius, &feasible) == TM_OK);
  for (double v : out) CHECK(std::abs(v - 0.5) < 1e-9);
  CHECK(feasible == 1);
  CHECK(tm_hd_estimate(x.data(), d, 100, 0.05, 1.0, out, &radius, &feasible) == TM_TOO_FEW_SAMPLES);
}

TEST_CASE("command runner") {
  char* report = nullptr;
  int code = -1;
  CHECK(tm_run_command("geometry-verify", "{}", &report, &code) == TM_OK);
  REQUIRE(report != nullptr);
  CHECK(code == 0);
  CHECK(nlohmann::json::parse(report)["passed"] == true);
  tm_string_free(report);

  CHECK(tm_run_command("coverage", "{\"n\": 2000, \"trials\": 2, \"seed\": 5}", &report, &code) == TM_OK);
  const auto first = nlohmann::json::parse(report);
  tm_string_free(report);
  CHECK(tm_run_command("coverage", "{\"n\": 2000, \"trials\": 2, \"seed\": 5}", &report, &code) == TM_OK);
  CHECK(nlohmann::json::parse(report)["determinism_hash"] == first["determinism_hash"]);
  tm_string_free(report);

  CHECK(tm_run_command("coverage", "{\"unknown\": 1}", &report, &code) == TM_INVALID_SPEC);
  CHECK(code == 2);
  CHECK(nlohmann::json::parse(report).contains("error"));
  tm_string_free(report);
  CHECK(tm_run_command("coverage", "{not json", &report, &code) == TM_INVALID_SPEC);
  CHECK(code == 2);
  tm_string_free(report);
  CHECK(tm_run_command("coverage", "{\"dist\": \"file:/nonexistent/law.json\", \"n\": 2000}", &report, &code) ==
        TM_IO_ERROR);
  CHECK(code == 3);
  tm_string_free(report);
  CHECK(tm_run_command(nullptr, "{}", &report, &code) == TM_INVALID_ARGUMENT);
}
