#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tightmean/distributions.hpp"

namespace tightmean {

/// Parameters shared by every subcommand. Keys in the JSON form match the
/// long CLI flag names.
struct ExperimentConfig {
  std::string estimator = "catoni";  // catoni | mom | heavy2d | hd
  std::string dist = "gaussian";     // gaussian | student-t | two-point | inlier-instance | point-mass | file:<path>
  std::size_t n = 100'000;
  double delta = 0.01;
  double sigma = 1.0;
  double beta = 1.0 / 96.0;
  double L = 0.35;
  double xi = 0.05;
  double tau = -1.0;  // negative: derive from the psi slack
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  int dim = 1;
  double eps = -1.0;  // negative: robust-verify runs its default grid
  std::string out;
  std::string format = "csv";  // csv | json
  std::string psi = "clipped-cubic-sqrt2";
  double mean = 0.0;
  double dof = 3.0;
  double outlier_multiple = 3.0;  // two-point outliers sit at this multiple of T
  double zeta = 0.2;
  bool inject_broken_psi = false;  // psi-check negative control
};

/// Throws InvalidSpec on unknown keys, wrong types or out-of-range values.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

/// The sampler a coverage or tester-eval trial draws from.
SamplerSpec sampler_for(const ExperimentConfig& cfg, std::uint64_t seed);

struct TrialReport {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::string path_taken;
  double error_norm = 0.0;
  double claimed_radius = 0.0;
  bool covered = false;
  double wall_time_ms = 0.0;
};

/// CSV header naming every TrialReport field.
std::string trial_csv_header();
std::string trial_csv_row(const TrialReport& r, bool with_time = true);
nlohmann::json to_json(const TrialReport& r);

/// 64-bit FNV-1a over the CSV rows without the wall-time column, as 16 hex digits.
std::string determinism_hash(const std::vector<TrialReport>& rows);

/// Inverse-CDF empirical quantile: the ceil(q N)-th smallest value.
double empirical_quantile(std::vector<double> values, double q);

struct CommandResult {
  int exit_code = 0;
  nlohmann::json summary;
  std::vector<TrialReport> trials;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;

/// psi-check | coverage | tester-eval | robust-verify | geometry-verify.
/// Library errors propagate as tightmean::Error.
CommandResult run_command(const std::string& command, const ExperimentConfig& cfg);

/// Worker count: TIGHTMEAN_THREADS if set and positive, else the hardware
/// concurrency, never more than `jobs`.
unsigned worker_count(std::size_t jobs);

/// Runs body(i) for i in [0, jobs) on the worker pool. The first exception
/// thrown by any job is rethrown after all workers stop.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace tightmean
