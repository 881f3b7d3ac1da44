#include "tightmean/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "tightmean/error.hpp"
#include "tightmean/estimators1d.hpp"
#include "tightmean/estimators2d.hpp"
#include "tightmean/estimators_hd.hpp"
#include "tightmean/geometry.hpp"
#include "tightmean/psi.hpp"
#include "tightmean/rng.hpp"
#include "tightmean/robust.hpp"

namespace tightmean {

using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

const std::set<std::string> kEstimators = {"catoni", "mom", "heavy2d", "hd"};
const std::set<std::string> kBuiltinDists = {"gaussian", "student-t", "two-point", "inlier-instance",
                                             "point-mass"};

template <class T>
T integral_field(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    require(i >= 0 || std::is_signed_v<T>, ErrorCode::InvalidSpec, key + " must be non-negative");
    return static_cast<T>(i);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    require(std::floor(d) == d && (d >= 0 || std::is_signed_v<T>), ErrorCode::InvalidSpec,
            key + " must be a whole number");
    return static_cast<T>(d);
  }
  fail(ErrorCode::InvalidSpec, key + " must be a number");
}

double real_field(const json& v, const std::string& key) {
  require(v.is_number(), ErrorCode::InvalidSpec, key + " must be a number");
  return v.get<double>();
}

std::string string_field(const json& v, const std::string& key) {
  require(v.is_string(), ErrorCode::InvalidSpec, key + " must be a string");
  return v.get<std::string>();
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  require(doc.is_object(), ErrorCode::InvalidSpec, "config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "estimator") c.estimator = string_field(v, key);
    else if (key == "dist") c.dist = string_field(v, key);
    else if (key == "n") c.n = integral_field<std::size_t>(v, key);
    else if (key == "delta") c.delta = real_field(v, key);
    else if (key == "sigma") c.sigma = real_field(v, key);
    else if (key == "beta") c.beta = real_field(v, key);
    else if (key == "L") c.L = real_field(v, key);
    else if (key == "xi") c.xi = real_field(v, key);
    else if (key == "tau") c.tau = real_field(v, key);
    else if (key == "trials") c.trials = integral_field<std::size_t>(v, key);
    else if (key == "seed") c.seed = integral_field<std::uint64_t>(v, key);
    else if (key == "dim") c.dim = integral_field<int>(v, key);
    else if (key == "eps") c.eps = real_field(v, key);
    else if (key == "out") c.out = string_field(v, key);
    else if (key == "format") c.format = string_field(v, key);
    else if (key == "psi") c.psi = string_field(v, key);
    else if (key == "mean") c.mean = real_field(v, key);
    else if (key == "dof") c.dof = real_field(v, key);
    else if (key == "outlier_multiple") c.outlier_multiple = real_field(v, key);
    else if (key == "zeta") c.zeta = real_field(v, key);
    else if (key == "inject_broken_psi") {
      require(v.is_boolean(), ErrorCode::InvalidSpec, key + " must be a boolean");
      c.inject_broken_psi = v.get<bool>();
    } else {
      fail(ErrorCode::InvalidSpec, "unknown config key: " + key);
    }
  }
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  return json{{"estimator", c.estimator}, {"dist", c.dist},   {"n", c.n},
              {"delta", c.delta},         {"sigma", c.sigma}, {"beta", c.beta},
              {"L", c.L},                 {"xi", c.xi},       {"tau", c.tau},
              {"trials", c.trials},       {"seed", c.seed},   {"dim", c.dim},
              {"eps", c.eps},             {"out", c.out},     {"format", c.format},
              {"psi", c.psi},             {"mean", c.mean},   {"dof", c.dof},
              {"outlier_multiple", c.outlier_multiple},       {"zeta", c.zeta},
              {"inject_broken_psi", c.inject_broken_psi}};
}

void validate(const ExperimentConfig& c) {
  require(c.trials >= 1, ErrorCode::InvalidSpec, "trials must be >= 1");
  require(c.delta > 0 && c.delta < 1, ErrorCode::InvalidSpec, "delta must lie in (0,1)");
  require(c.sigma > 0, ErrorCode::InvalidSpec, "sigma must be positive");
  require(c.n >= 1, ErrorCode::InvalidSpec, "n must be >= 1");
  require(c.dim >= 1, ErrorCode::InvalidSpec, "dim must be >= 1");
  require(c.format == "csv" || c.format == "json", ErrorCode::InvalidSpec, "format must be csv or json");
  require(kEstimators.count(c.estimator) == 1, ErrorCode::InvalidSpec, "unknown estimator: " + c.estimator);
  require(kBuiltinDists.count(c.dist) == 1 || c.dist.rfind("file:", 0) == 0, ErrorCode::InvalidSpec,
          "unknown dist: " + c.dist);
  require(c.xi > 0 && c.xi < 1, ErrorCode::InvalidSpec, "xi must lie in (0,1)");
  require(c.eps < 0 || (c.eps > 0 && c.eps <= 0.5), ErrorCode::InvalidSpec, "eps must lie in (0, 1/2]");
  try {
    psi_kind_from_string(c.psi);
  } catch (const Error&) {
    fail(ErrorCode::InvalidSpec, "unknown psi: " + c.psi);
  }
}

SamplerSpec sampler_for(const ExperimentConfig& c, std::uint64_t seed) {
  SamplerSpec spec;
  spec.seed = seed;
  if (c.dist == "gaussian") {
    spec.family = GaussianFamily{c.mean, c.sigma, c.dim};
  } else if (c.dist == "student-t") {
    require(c.dof > 2, ErrorCode::InvalidSpec, "student-t needs dof > 2");
    spec.family = StudentTFamily{c.dof, c.sigma * std::sqrt((c.dof - 2.0) / c.dof), c.dim};
  } else if (c.dist == "two-point") {
    const double M = c.outlier_multiple * threshold_scale(c.sigma, c.n, c.delta);
    spec.family = TwoPointOutlierFamily{M, c.sigma, c.dim, 0, 0.5};
  } else if (c.dist == "inlier-instance") {
    require(c.dim == 2, ErrorCode::InvalidSpec, "inlier-instance is two-dimensional");
    spec.family = DiscreteFamily{make_inlier_light_instance(c.beta, c.L, c.n, c.delta, c.sigma)};
  } else if (c.dist == "point-mass") {
    spec.family = DiscreteFamily{DiscreteDistribution::point_mass(Eigen::VectorXd::Constant(c.dim, c.mean))};
  } else {
    const std::string path = c.dist.substr(5);
    std::ifstream in(path);
    require(in.good(), ErrorCode::IoError, "cannot open distribution file: " + path);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      fail(ErrorCode::InvalidSpec, std::string("bad distribution file: ") + e.what());
    }
    DiscreteDistribution dist = distribution_from_json(doc);
    require(dist.dimension() == c.dim, ErrorCode::InvalidSpec, "distribution file dimension differs from dim");
    spec.family = DiscreteFamily{std::move(dist)};
  }
  validate(spec);
  return spec;
}

// ---------------------------------------------------------------- reports

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string trial_csv_header() {
  return "trial_index,seed,estimator,path_taken,error_norm,claimed_radius,covered,wall_time_ms";
}

std::string trial_csv_row(const TrialReport& r, bool with_time) {
  std::string s = std::to_string(r.trial_index) + "," + std::to_string(r.seed) + "," + r.estimator + "," +
                  r.path_taken + "," + fmt(r.error_norm) + "," + fmt(r.claimed_radius) + "," +
                  (r.covered ? "true" : "false");
  if (with_time) s += "," + fmt(r.wall_time_ms);
  return s;
}

json to_json(const TrialReport& r) {
  return json{{"trial_index", r.trial_index}, {"seed", r.seed},
              {"estimator", r.estimator},     {"path_taken", r.path_taken},
              {"error_norm", r.error_norm},   {"claimed_radius", r.claimed_radius},
              {"covered", r.covered},         {"wall_time_ms", r.wall_time_ms}};
}

std::string determinism_hash(const std::vector<TrialReport>& rows) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& r : rows) feed(trial_csv_row(r, false) + "\n");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double empirical_quantile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorCode::EmptyInput, "quantile of an empty sample");
  require(q > 0 && q <= 1, ErrorCode::InvalidArgument, "quantile level must lie in (0,1]");
  std::sort(values.begin(), values.end());
  auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

// ---------------------------------------------------------------- worker pool

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TIGHTMEAN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& body) {
  const unsigned workers = worker_count(jobs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; !stop && (i = next++) < jobs;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        stop = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------- output

namespace {

// Writes trial rows (and for json, a trailing summary line). Returns false on I/O failure.
bool write_rows(const ExperimentConfig& c, const std::vector<TrialReport>& rows, const json& summary) {
  if (c.out.empty()) return true;
  std::ofstream f(c.out, std::ios::trunc);
  if (!f) return false;
  if (c.format == "csv") {
    f << trial_csv_header() << "\n";
    for (const auto& r : rows) f << trial_csv_row(r) << "\n";
  } else {
    for (const auto& r : rows) f << to_json(r).dump() << "\n";
    f << json{{"summary", summary}}.dump() << "\n";
  }
  f.flush();
  return static_cast<bool>(f);
}

// Writes arbitrary table rows for the verification commands.
bool write_table(const ExperimentConfig& c, const std::vector<std::string>& columns, const json& rows) {
  if (c.out.empty()) return true;
  std::ofstream f(c.out, std::ios::trunc);
  if (!f) return false;
  if (c.format == "csv") {
    for (std::size_t k = 0; k < columns.size(); ++k) f << (k ? "," : "") << columns[k];
    f << "\n";
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < columns.size(); ++k) {
        const json& v = row.contains(columns[k]) ? row.at(columns[k]) : json();
        f << (k ? "," : "");
        if (v.is_string()) f << v.get<std::string>();
        else if (v.is_number_float()) f << fmt(v.get<double>());
        else if (!v.is_null()) f << v.dump();
      }
      f << "\n";
    }
  } else {
    for (const auto& row : rows) f << row.dump() << "\n";
  }
  f.flush();
  return static_cast<bool>(f);
}

CommandResult io_failure(CommandResult r, const ExperimentConfig& c) {
  r.exit_code = kExitIoError;
  r.summary["io_error"] = "cannot write " + c.out;
  return r;
}

double gaussian_rate(double sigma, double delta, std::size_t n) {
  return sigma * std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(n));
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- psi-check

CommandResult cmd_psi_check(const ExperimentConfig& c) {
  std::vector<PsiKind> kinds = {PsiKind::ClippedCubicSqrt2, PsiKind::ClippedCubicOne,
                                PsiKind::CatoniUpperLog, PsiKind::CatoniLowerLog};
  if (c.inject_broken_psi) kinds.push_back(PsiKind::Identity);
  const std::vector<double> betas = {0.25, 0.125, 0.0625};

  CommandResult res;
  bool all_ok = true;
  json rows = json::array();
  json violations = json::array();
  for (PsiKind kind : kinds) {
    const PsiFunction f(kind);
    const VerificationReport rep = verify_base_constraint(f);
    json row{{"kind", to_string(kind)},
             {"points_checked", rep.points_checked},
             {"violations", rep.violations.size()}};
    bool ok = rep.passed();
    for (std::size_t k = 0; k < std::min<std::size_t>(rep.violations.size(), 10); ++k) {
      const auto& v = rep.violations[k];
      violations.push_back(json{{"kind", to_string(kind)}, {"x", v.x}, {"psi", v.psi},
                                {"lower", v.lower}, {"upper", v.upper}});
    }

    // Improved slack only exists for the clipped forms; the log forms touch
    // the envelope everywhere.
    const bool expect_slack = f.is_bounded();
    double previous = std::numeric_limits<double>::infinity();
    bool monotone = true;
    const char* names[] = {"eta_beta_1_4", "eta_beta_1_8", "eta_beta_1_16"};
    for (std::size_t b = 0; b < betas.size(); ++b) {
      if (!rep.passed()) {
        row[names[b]] = nullptr;
        continue;
      }
      try {
        const double eta = compute_eta(f, betas[b]);
        row[names[b]] = eta;
        monotone = monotone && eta <= previous;
        previous = eta;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoImprovedSlack) throw;
        row[names[b]] = nullptr;
        if (expect_slack) ok = false;
      }
    }
    if (expect_slack && !monotone) ok = false;
    row["eta_monotone"] = monotone;
    row["passed"] = ok;
    all_ok = all_ok && ok;
    rows.push_back(row);
  }

  res.summary = json{{"command", "psi-check"}, {"passed", all_ok}, {"rows", rows}, {"violations", violations}};
  res.exit_code = all_ok ? kExitOk : kExitVerificationFailed;
  if (!write_table(c, {"kind", "points_checked", "violations", "eta_beta_1_4", "eta_beta_1_8",
                       "eta_beta_1_16", "eta_monotone", "passed"},
                   rows))
    return io_failure(std::move(res), c);
  return res;
}

// ---------------------------------------------------------------- coverage

struct TrialOutcome {
  Eigen::VectorXd value;
  double claimed = 0.0;
  std::string path;
};

class TrialRunner {
 public:
  explicit TrialRunner(const ExperimentConfig& c) : c_(c), psi_(psi_kind_from_string(c.psi)) {
    if (c.estimator == "catoni" || c.estimator == "mom") {
      require(c.dim == 1, ErrorCode::InvalidSpec, c.estimator + " is a one-dimensional estimator");
      if (c.estimator == "catoni")
        require(c.n >= catoni_min_samples(c.delta, c.xi), ErrorCode::InvalidSpec,
                "n is below the catoni sample requirement");
    } else if (c.estimator == "heavy2d") {
      require(c.dim == 2, ErrorCode::InvalidSpec, "heavy2d needs dim = 2");
      cfg2_ = Estimator2DConfig::make(c.delta, c.sigma, psi_, c.beta, c.L, c.xi, c.tau);
      require(c.n >= heavy_2d_min_samples(c.delta, c.xi), ErrorCode::InvalidSpec,
              "n is below the heavy2d sample requirement");
    } else {
      require(c.dim >= 2, ErrorCode::InvalidSpec, "hd needs dim >= 2");
      require(c.n >= hd_min_samples(c.dim, c.delta), ErrorCode::InvalidSpec,
              "n is below the hd sample requirement");
      hd_.zeta = c.zeta;
      hd_.beta = c.beta;
      hd_.L = c.L;
      hd_.xi = c.xi;
      hd_.psi = psi_;
    }
  }

  TrialOutcome run(const PointSet& x) const {
    TrialOutcome out;
    const std::span<const double> row(x.data(), static_cast<std::size_t>(x.cols()));
    if (c_.estimator == "catoni") {
      const Estimate1D e = catoni(row, c_.delta, c_.sigma, psi_, c_.xi);
      out.value = Eigen::VectorXd::Constant(1, e.value);
      out.claimed = e.half_width;
      out.path = "catoni";
    } else if (c_.estimator == "mom") {
      out.value = Eigen::VectorXd::Constant(1, median_of_means(row, c_.delta));
      const double k = static_cast<double>(mom_batch_count(row.size(), c_.delta));
      out.claimed = 2.0 * c_.sigma * std::sqrt(k / static_cast<double>(row.size()));
      out.path = "mom";
    } else if (c_.estimator == "heavy2d") {
      const Estimate2D e = heavy_tailed_estimator_2d(x, cfg2_);
      out.value = e.value;
      out.claimed = e.claimed_radius;
      out.path = to_string(e.path);
    } else {
      const HdEstimate e = hd_estimator(x, c_.delta, c_.sigma, hd_);
      out.value = e.value;
      out.claimed = e.diagnostics.claimed_radius;
      out.path = e.diagnostics.feasible ? "feasible" : "infeasible";
    }
    return out;
  }

 private:
  const ExperimentConfig& c_;
  PsiFunction psi_;
  Estimator2DConfig cfg2_;
  HdConfig hd_;
};

CommandResult cmd_coverage(const ExperimentConfig& c) {
  const TrialRunner runner(c);
  const SamplerSpec base = sampler_for(c, 0);
  const Eigen::VectorXd mu = true_mean(base);

  CommandResult res;
  res.trials.resize(c.trials);
  parallel_for(c.trials, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    SamplerSpec spec = base;
    spec.seed = split_seed(c.seed, i);
    const PointSet x = sample(spec, c.n);
    const TrialOutcome o = runner.run(x);
    TrialReport& r = res.trials[i];
    r.trial_index = i;
    r.seed = spec.seed;
    r.estimator = c.estimator;
    r.path_taken = o.path;
    r.error_norm = (o.value - mu).norm();
    r.claimed_radius = o.claimed;
    r.covered = r.error_norm <= r.claimed_radius;
    r.wall_time_ms = elapsed_ms(t0);
  });

  std::vector<double> errors;
  std::map<std::string, std::size_t> paths;
  std::size_t failures = 0;
  double mean_error = 0.0;
  for (const auto& r : res.trials) {
    errors.push_back(r.error_norm);
    ++paths[r.path_taken];
    failures += r.covered ? 0 : 1;
    mean_error += r.error_norm;
  }
  const double trials = static_cast<double>(c.trials);
  const double rate = gaussian_rate(c.sigma, c.delta, c.n);
  const double q = empirical_quantile(errors, 1.0 - c.delta);
  res.summary = json{{"command", "coverage"},
                     {"config", to_json(c)},
                     {"trials", c.trials},
                     {"failure_rate", static_cast<double>(failures) / trials},
                     {"mean_error", mean_error / trials},
                     {"error_quantile", q},
                     {"quantile_level", 1.0 - c.delta},
                     {"error_q50", empirical_quantile(errors, 0.5)},
                     {"error_q95", empirical_quantile(errors, 0.95)},
                     {"error_q99", empirical_quantile(errors, 0.99)},
                     {"rate", rate},
                     {"ratio", q / rate},
                     {"path_counts", paths},
                     {"determinism_hash", determinism_hash(res.trials)}};
  if (!write_rows(c, res.trials, res.summary)) return io_failure(std::move(res), c);
  return res;
}

// ---------------------------------------------------------------- tester-eval

// Whether the sampled law agrees with a verdict. Returns -1 when no exact
// oracle exists for the law.
int oracle_agrees(const SamplerSpec& spec, const Verdict2D& v, double beta, double L, double T,
                  double sigma) {
  if (const auto* g = std::get_if<GaussianFamily>(&spec.family)) {
    if (v.is_direction()) return gaussian_inlier_moment(g->sigma, beta * T) < (1.0 - L) * sigma * sigma;
    return gaussian_outlier_moment(g->sigma, 16.0 * beta * T) < 16.0 * L * sigma * sigma;
  }
  if (const auto* d = std::get_if<DiscreteFamily>(&spec.family)) {
    if (v.is_direction()) {
      const Eigen::Vector2d e = v.axis == 0 ? Eigen::Vector2d::UnitX() : Eigen::Vector2d::UnitY();
      return is_inlier_light(d->dist.project(e), beta, L, T, sigma);
    }
    return is_outlier_light(d->dist, 16.0 * beta, 16.0 * L, T, sigma);
  }
  return -1;
}

CommandResult cmd_tester_eval(const ExperimentConfig& c) {
  require(c.dim == 2, ErrorCode::InvalidSpec, "tester-eval needs dim = 2");
  const Estimator2DConfig cfg =
      Estimator2DConfig::make(c.delta, c.sigma, PsiFunction(psi_kind_from_string(c.psi)), c.beta, c.L,
                              c.xi, c.tau);
  require(c.n >= heavy_2d_min_samples(c.delta, c.xi), ErrorCode::InvalidSpec, "n is too small");
  const SamplerSpec base = sampler_for(c, 0);

  CommandResult res;
  res.trials.resize(c.trials);
  std::vector<int> agreement(c.trials, -1);
  parallel_for(c.trials, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    SamplerSpec spec = base;
    spec.seed = split_seed(c.seed, i);
    const DispatchTest t = run_dispatch_test(sample(spec, c.n), cfg);
    agreement[i] = oracle_agrees(spec, t.verdict, c.beta, c.L, t.T, c.sigma);
    TrialReport& r = res.trials[i];
    r.trial_index = i;
    r.seed = spec.seed;
    r.estimator = "tester";
    r.path_taken = !t.verdict.is_direction() ? "bottom" : (t.verdict.axis == 0 ? "e1" : "e2");
    r.error_norm = t.verdict.per_axis[0].statistic;
    r.claimed_radius = t.verdict.per_axis[0].threshold;
    r.covered = agreement[i] != 0;
    r.wall_time_ms = elapsed_ms(t0);
  });

  std::map<std::string, std::size_t> verdicts;
  std::size_t checked = 0, agreed = 0;
  for (std::size_t i = 0; i < c.trials; ++i) {
    ++verdicts[res.trials[i].path_taken];
    if (agreement[i] >= 0) {
      ++checked;
      agreed += static_cast<std::size_t>(agreement[i]);
    }
  }
  const double trials = static_cast<double>(c.trials);
  const auto share = [&](const char* k) {
    return verdicts.count(k) ? static_cast<double>(verdicts.at(k)) / trials : 0.0;
  };
  res.summary = json{{"command", "tester-eval"},
                     {"config", to_json(c)},
                     {"trials", c.trials},
                     {"verdict_counts", verdicts},
                     {"direction_rate", share("e1") + share("e2")},
                     {"bottom_rate", share("bottom")},
                     {"oracle_checked", checked},
                     {"oracle_agreement_rate",
                      checked ? json(static_cast<double>(agreed) / static_cast<double>(checked)) : json()},
                     {"determinism_hash", determinism_hash(res.trials)}};
  if (!write_rows(c, res.trials, res.summary)) return io_failure(std::move(res), c);
  return res;
}

// ---------------------------------------------------------------- robust-verify

json simplex_upper_check(int d, double eps) {
  const SimplexInstance inst = make_simplex_instance(d, eps);
  const Eigen::MatrixXd means = -2.0 * eps * inst.vertices;
  const Ball b = robust_upper_center(means);
  const double sigma_sq = static_cast<double>(d + 1) / d * eps;
  const double max_error = (means.colwise() - b.center).colwise().norm().maxCoeff();
  const double relaxed = jung_constant(d) * (1.0 + 2.0 * eps) * std::sqrt(2.0 * sigma_sq * eps);
  const double exact = robust_upper_radius_bound(d, sigma_sq, eps);
  const bool ok = b.center.norm() <= 1e-9 && std::abs(max_error - 2.0 * eps) <= 1e-9 &&
                  2.0 * eps <= relaxed && max_error <= exact + 1e-12;
  return json{{"d", d},           {"eps", eps},       {"center_norm", b.center.norm()},
              {"max_error", max_error}, {"bound_relaxed", relaxed}, {"bound", exact},
              {"passed", ok}};
}

DiscreteDistribution random_1d_law(Rng& rng, std::size_t atoms, double spread) {
  std::uniform_real_distribution<double> pos(-spread, spread), w(0.05, 1.0);
  std::vector<double> xs(atoms), ps(atoms);
  double total = 0.0;
  for (std::size_t k = 0; k < atoms; ++k) {
    xs[k] = pos(rng);
    ps[k] = w(rng);
    total += ps[k];
  }
  for (double& p : ps) p /= total;
  return DiscreteDistribution::from_1d(xs, ps);
}

// q keeps (1 - t) of p's mass and places t on fresh atoms, so TV(p, q) = t.
DiscreteDistribution perturb(const DiscreteDistribution& p, Rng& rng, double t) {
  std::uniform_real_distribution<double> far(-20.0, 20.0);
  std::uniform_int_distribution<int> extra(1, 3);
  const int k = extra(rng);
  std::vector<double> xs, ps;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    xs.push_back(p.support()(0, i));
    ps.push_back((1.0 - t) * p.probs()(i));
  }
  for (int j = 0; j < k; ++j) {
    xs.push_back(far(rng));
    ps.push_back(t / k);
  }
  return DiscreteDistribution::from_1d(xs, ps);
}

CommandResult cmd_robust_verify(const ExperimentConfig& c) {
  std::vector<std::pair<int, double>> grid;
  if (c.eps > 0) grid.push_back({c.dim, c.eps});
  else grid = {{1, 0.1}, {2, 0.05}, {3, 0.05}, {100, 0.05}};

  bool all_ok = true;
  json lower = json::array(), upper = json::array();
  for (auto [d, eps] : grid) {
    const RobustLowerBoundReport r = robust_lower_bound_check(d, eps, c.seed);
    bool ok = r.passed();
    // Restricting to d' keeps the simplex constant near sqrt 2 when d is large.
    if (r.d_effective < d) ok = ok && r.constant >= std::sqrt(2.0) * (1.0 - eps);
    all_ok = all_ok && ok;
    lower.push_back(json{{"d", d},
                         {"eps", eps},
                         {"d_effective", r.d_effective},
                         {"min_expected_error", r.min_expected_error},
                         {"target", 2.0 * eps},
                         {"argmin_norm", r.argmin.norm()},
                         {"identity_gap", r.identity_gap},
                         {"constant", r.constant},
                         {"passed", ok}});
    if (eps < 0.5) {
      json u = simplex_upper_check(r.d_effective, eps);
      all_ok = all_ok && u["passed"].get<bool>();
      upper.push_back(std::move(u));
    }
  }

  constexpr std::size_t kPairs = 500;
  Rng rng(split_seed(c.seed, 0x9a9));
  std::uniform_int_distribution<std::size_t> atoms(1, 6);
  std::uniform_real_distribution<double> tv(0.0, 0.45);
  std::size_t gap_failures = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < kPairs; ++i) {
    const DiscreteDistribution p = random_1d_law(rng, atoms(rng), 5.0);
    const DiscreteDistribution q = perturb(p, rng, tv(rng));
    const MeanGapReport g = mean_gap_bound_check(p, q);
    if (!g.passed) ++gap_failures;
    if (g.bound > 0 && std::isfinite(g.bound)) worst_ratio = std::max(worst_ratio, g.gap / g.bound);
  }
  all_ok = all_ok && gap_failures == 0;

  CommandResult res;
  res.summary = json{{"command", "robust-verify"},
                     {"passed", all_ok},
                     {"lower", lower},
                     {"upper", upper},
                     {"mean_gap", {{"pairs", kPairs}, {"failures", gap_failures}, {"worst_ratio", worst_ratio}}}};
  res.exit_code = all_ok ? kExitOk : kExitVerificationFailed;
  json rows = json::array();
  for (const auto& r : lower) {
    json row = r;
    row["check"] = "lower";
    rows.push_back(row);
  }
  for (const auto& r : upper) {
    json row = r;
    row["check"] = "upper";
    rows.push_back(row);
  }
  if (!write_table(c, {"check", "d", "eps", "d_effective", "min_expected_error", "target", "constant",
                       "max_error", "bound", "passed"},
                   rows))
    return io_failure(std::move(res), c);
  return res;
}

// ---------------------------------------------------------------- geometry-verify

// Smallest circle through every pair (as a diameter) or triple of points that
// contains the whole set.
Ball brute_force_circle(const PointSet& pts) {
  const Eigen::Index n = pts.cols();
  Ball best{pts.col(0), 0.0};
  if (n == 1) return best;
  best.radius = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::Vector2d& c, double r) {
    if (r >= best.radius) return;
    for (Eigen::Index k = 0; k < n; ++k)
      if ((pts.col(k) - c).norm() > r * (1.0 + 1e-12) + 1e-12) return;
    best = Ball{c, r};
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::Vector2d a = pts.col(i), b = pts.col(j);
      consider((a + b) / 2.0, (a - b).norm() / 2.0);
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const Eigen::Vector2d p = pts.col(k);
        const double det = 2.0 * ((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x());
        if (std::abs(det) < 1e-14) continue;
        const double bb = (b - a).squaredNorm(), pp = (p - a).squaredNorm();
        const Eigen::Vector2d off(((p - a).y() * bb - (b - a).y() * pp) / det,
                                  ((b - a).x() * pp - (p - a).x() * bb) / det);
        consider(a + off, off.norm());
      }
    }
  }
  return best;
}

CommandResult cmd_geometry_verify(const ExperimentConfig& c) {
  Rng rng(split_seed(c.seed, 0x6e0));
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  auto random_set = [&](int d, Eigen::Index n) {
    PointSet p(d, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int k = 0; k < d; ++k) p(k, i) = coord(rng);
    return p;
  };

  std::uniform_int_distribution<int> small(1, 12), medium(3, 20);
  std::size_t meb_failures = 0;
  double meb_worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const PointSet p = random_set(2, small(rng));
    const double diff = std::abs(min_enclosing_ball(p).radius - brute_force_circle(p).radius);
    meb_worst = std::max(meb_worst, diff);
    if (diff > 1e-9) ++meb_failures;
  }

  std::size_t jung_failures = 0;
  for (int d : {2, 3})
    for (int t = 0; t < 100; ++t)
      if (!check_jung_inequality(random_set(d, medium(rng)), d)) ++jung_failures;

  PointSet tri(2, 3);
  tri << 0.0, 1.0, 0.5, 0.0, 0.0, std::sqrt(3.0) / 2.0;
  const double tri_gap = std::abs(min_enclosing_ball(tri).radius - diameter(tri) * std::sqrt(2.0 / 6.0));

  PointSet two(3, 2);
  two << 1.0, -1.0, 2.0, 0.0, 0.5, 0.5;
  const Ball two_ball = min_enclosing_ball(two);
  const double two_gap = std::abs(two_ball.radius - (two.col(0) - two.col(1)).norm() / 2.0) +
                         (two_ball.center - (two.col(0) + two.col(1)) / 2.0).norm();

  const GeneralizedJungReport gj = check_generalized_jung(random_set(3, 10), 3, 2, 5000, c.seed);

  const bool ok = meb_failures == 0 && jung_failures == 0 && tri_gap <= 1e-9 && two_gap <= 1e-9 && gj.passed;
  CommandResult res;
  res.summary = json{{"command", "geometry-verify"},
                     {"passed", ok},
                     {"meb_oracle", {{"sets", 200}, {"failures", meb_failures}, {"worst_gap", meb_worst}}},
                     {"jung", {{"sets", 200}, {"failures", jung_failures}}},
                     {"equilateral_gap", tri_gap},
                     {"two_point_gap", two_gap},
                     {"generalized_jung",
                      {{"i", gj.i}, {"j", gj.j}, {"radius_i", gj.radius_i},
                       {"radius_j_estimate", gj.radius_j_estimate}, {"factor", gj.factor},
                       {"passed", gj.passed}}}};
  res.exit_code = ok ? kExitOk : kExitVerificationFailed;
  json rows = json::array({json{{"check", "meb-oracle"}, {"failures", meb_failures}, {"value", meb_worst}},
                           json{{"check", "jung"}, {"failures", jung_failures}},
                           json{{"check", "equilateral"}, {"value", tri_gap}},
                           json{{"check", "two-point"}, {"value", two_gap}},
                           json{{"check", "generalized-jung"}, {"value", gj.radius_i}, {"passed", gj.passed}}});
  if (!write_table(c, {"check", "failures", "value", "passed"}, rows)) return io_failure(std::move(res), c);
  return res;
}

}  // namespace

CommandResult run_command(const std::string& command, const ExperimentConfig& cfg) {
  validate(cfg);
  if (command == "psi-check") return cmd_psi_check(cfg);
  if (command == "coverage") return cmd_coverage(cfg);
  if (command == "tester-eval") return cmd_tester_eval(cfg);
  if (command == "robust-verify") return cmd_robust_verify(cfg);
  if (command == "geometry-verify") return cmd_geometry_verify(cfg);
  fail(ErrorCode::InvalidSpec, "unknown command: " + command);
}

}  // namespace tightmean
