// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tightmean/distributions.hpp"
#include "tightmean/estimators2d.hpp"
#include "tightmean/estimators_hd.hpp"
#include "tightmean/geometry.hpp"
#include "tightmean/harness.hpp"
#include "tightmean/psi.hpp"
#include "tightmean/rng.hpp"
#include "tightmean/robust.hpp"

using namespace tightmean;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double jung(int d) { return std::sqrt(2.0 * d / (d + 1.0)); }

double gaussian_rate(double sigma, double delta, double n, double numerator = 2.0) {
  return sigma * std::sqrt(2.0 * std::log(numerator / delta) / n);
}

// ceil(qN)-th smallest, computed here rather than trusting the harness summary.
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()) - 1e-9));
  return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
}

std::vector<double> errors_of(const CommandResult& r) {
  std::vector<double> e;
  for (const auto& t : r.trials) e.push_back(t.error_norm);
  return e;
}

double share(const CommandResult& r, const std::function<bool(const TrialReport&)>& pred) {
  std::size_t k = 0;
  for (const auto& t : r.trials) k += pred(t) ? 1 : 0;
  return static_cast<double>(k) / static_cast<double>(r.trials.size());
}

struct Outcome {
  bool ok;
  std::string detail;
};

int failures = 0;

void report(int k, const Outcome& o) {
  std::printf("%s criterion %d: %s\n", o.ok ? "PASS" : "FAIL", k, o.detail.c_str());
  std::fflush(stdout);
  failures += o.ok ? 0 : 1;
}

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ------------------------------------------------------------------ 1

Outcome influence_constraints() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::size_t violations = 0;
  const std::size_t grid = 1'000'000;
  for (PsiKind k : {PsiKind::ClippedCubicSqrt2, PsiKind::ClippedCubicOne, PsiKind::CatoniUpperLog,
                    PsiKind::CatoniLowerLog}) {
    const PsiFunction f(k);
    const VerificationReport r = verify_base_constraint(f, GridSpec{-20.0, 20.0, grid});
    ok = ok && r.passed() && r.points_checked >= grid;
    violations += r.violations.size();
    // Independent extended-precision recheck on the same grid.
    for (std::size_t i = 0; i < grid; ++i) {
      const long double x = -20.0L + 40.0L * static_cast<long double>(i) / static_cast<long double>(grid - 1);
      const long double y = f(static_cast<double>(x));
      const long double lo = -std::log(1.0L - x + x * x / 2.0L);
      const long double hi = std::log(1.0L + x + x * x / 2.0L);
      if (y < lo - 1e-12L || y > hi + 1e-12L) {
        ok = false;
        ++violations;
      }
    }
  }
  const double eta = compute_eta(PsiFunction(PsiKind::ClippedCubicSqrt2), 0.125);
  const double secs = seconds_since(t0);
  ok = ok && eta > 0 && secs < 10.0;
  return {ok, fmt("violations=%.0f eta(1/8)=%.3g runtime=%.2fs", static_cast<double>(violations), eta, secs)};
}

// ------------------------------------------------------------------ 2

// Smallest circle by exhaustive search over pair and triple circles.
double brute_force_circle_radius(const std::vector<Eigen::Vector2d>& p) {
  const auto contains_all = [&](const Eigen::Vector2d& c, double r) {
    for (const auto& q : p)
      if ((q - c).norm() > r * (1 + 1e-12) + 1e-12) return false;
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  if (p.size() == 1) return 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const Eigen::Vector2d c = (p[i] + p[j]) / 2;
      const double r = (p[i] - c).norm();
      if (r < best && contains_all(c, r)) best = r;
      for (std::size_t k = j + 1; k < p.size(); ++k) {
        const Eigen::Vector2d a = p[i], b = p[j], e = p[k];
        const double det = 2 * ((b - a).x() * (e - a).y() - (b - a).y() * (e - a).x());
        if (std::abs(det) < 1e-14) continue;
        const double bb = (b - a).squaredNorm(), ee = (e - a).squaredNorm();
        const Eigen::Vector2d off(((e - a).y() * bb - (b - a).y() * ee) / det,
                                  ((b - a).x() * ee - (e - a).x() * bb) / det);
        const Eigen::Vector2d cc = a + off;
        const double rr = off.norm();
        if (rr < best && contains_all(cc, rr)) best = rr;
      }
    }
  return best;
}

double pairwise_diameter(const PointSet& x) {
  double d = 0;
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    for (Eigen::Index j = i + 1; j < x.cols(); ++j) d = std::max(d, (x.col(i) - x.col(j)).norm());
  return d;
}

Outcome geometry_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> count(1, 12);
  double worst_meb = 0;
  for (int t = 0; t < 200; ++t) {
    const int m = count(gen);
    PointSet x(2, m);
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < m; ++i) {
      x.col(i) = Eigen::Vector2d(u(gen), u(gen));
      pts.emplace_back(x.col(i));
    }
    worst_meb = std::max(worst_meb, std::abs(min_enclosing_ball(x).radius - brute_force_circle_radius(pts)));
  }
  double worst_jung = -1e300;
  for (int d : {2, 3})
    for (int t = 0; t < 100; ++t) {
      const int m = 2 + count(gen);
      PointSet x(d, m);
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < d; ++k) x(k, i) = u(gen);
      const double slack = min_enclosing_ball(x).radius - pairwise_diameter(x) * std::sqrt(d / (2.0 * (d + 1)));
      worst_jung = std::max(worst_jung, slack);
    }
  PointSet tri(2, 3);
  tri << 0, 1, 0.5, 0, 0, std::sqrt(3.0) / 2;
  const double tri_gap = std::abs(min_enclosing_ball(tri).radius - pairwise_diameter(tri) * std::sqrt(1.0 / 3.0));
  const double secs = seconds_since(t0);
  const bool ok = worst_meb <= 1e-9 && worst_jung <= 1e-9 && tri_gap <= 1e-9 && secs < 30.0;
  return {ok, fmt("meb_max_diff=%.2e jung_max_slack=%.3g triangle_gap=%.2e runtime=%.2fs", worst_meb, worst_jung,
                  tri_gap, secs)};
}

// ------------------------------------------------------------------ 3, 4

Outcome catoni_coverage() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.estimator = "catoni";
  c.dist = "gaussian";
  c.mean = 3.0;
  c.sigma = 1.0;
  c.n = 100'000;
  c.delta = 0.01;
  c.xi = 0.05;
  c.trials = 1000;
  c.seed = 301;
  const CommandResult r = run_command("coverage", c);
  const double fail = share(r, [](const TrialReport& t) { return t.error_norm > t.claimed_radius; });
  const double q99 = quantile(errors_of(r), 0.99);
  const double limit = 1.15 * gaussian_rate(1.0, 0.01, 1e5, 4.0);
  const double secs = seconds_since(t0);
  const bool ok = r.trials.size() == 1000 && fail <= 0.03 && q99 <= limit && secs < 300.0;
  return {ok, fmt("failure_rate=%.4f q99=%.5f limit=%.5f runtime=%.1fs", fail, q99, limit, secs)};
}

Outcome heavy_tail_advantage() {
  ExperimentConfig c;
  c.dist = "two-point";
  c.outlier_multiple = 3.0;
  c.n = 100'000;
  c.delta = 0.01;
  c.trials = 1000;
  c.seed = 401;
  c.psi = "clipped-cubic-sqrt2";
  c.estimator = "catoni";
  const double q_catoni = quantile(errors_of(run_command("coverage", c)), 0.99);
  c.estimator = "mom";
  const double q_mom = quantile(errors_of(run_command("coverage", c)), 0.99);
  return {q_catoni < q_mom, fmt("catoni_q99=%.5f mom_q99=%.5f", q_catoni, q_mom)};
}

// ------------------------------------------------------------------ 5

Outcome tester_soundness() {
  ExperimentConfig c;
  c.dim = 2;
  c.n = 100'000;
  c.delta = 0.01;
  c.trials = 500;
  c.seed = 501;
  c.dist = "inlier-instance";
  const CommandResult inl = run_command("tester-eval", c);
  c.dist = "gaussian";
  const CommandResult gau = run_command("tester-eval", c);
  const double direction = share(inl, [](const TrialReport& t) { return t.path_taken != "bottom"; });
  const double bottom = share(gau, [](const TrialReport& t) { return t.path_taken == "bottom"; });
  std::size_t agree = 0, total = 0;
  for (const auto* r : {&inl, &gau}) {
    total += r->trials.size();
    for (const auto& t : r->trials) agree += t.covered ? 1 : 0;
  }
  const bool oracle_complete = inl.summary["oracle_checked"].get<std::size_t>() == inl.trials.size() &&
                               gau.summary["oracle_checked"].get<std::size_t>() == gau.trials.size();
  const double agreement = static_cast<double>(agree) / static_cast<double>(total);
  const bool ok = oracle_complete && direction >= 0.99 && bottom >= 0.99 && agreement >= 0.99;
  return {ok, fmt("direction_rate=%.3f bottom_rate=%.3f oracle_agreement=%.3f", direction, bottom, agreement)};
}

// ------------------------------------------------------------------ 6

Outcome two_dim_estimator() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.estimator = "heavy2d";
  c.dim = 2;
  c.n = 100'000;
  c.delta = 0.01;
  c.trials = 500;
  c.seed = 601;
  const double rate = gaussian_rate(1.0, 0.01, 1e5);
  c.dist = "gaussian";
  const double ratio_gauss = quantile(errors_of(run_command("coverage", c)), 0.99) / rate;
  c.dist = "inlier-instance";
  const double ratio_inst = quantile(errors_of(run_command("coverage", c)), 0.99) / rate;
  const double secs = seconds_since(t0);
  const bool ok = ratio_gauss < jung(2) && ratio_inst < jung(2) && secs < 1200.0;
  return {ok, fmt("ratio_gaussian=%.4f ratio_instance=%.4f limit=%.4f runtime=%.1fs", ratio_gauss, ratio_inst,
                  jung(2), secs)};
}

// ------------------------------------------------------------------ 7

Outcome high_dim_smoke() {
  ExperimentConfig c;
  c.estimator = "hd";
  c.dim = 3;
  c.n = 20'000;
  c.delta = 0.05;
  c.trials = 200;
  c.seed = 701;
  const CommandResult r = run_command("coverage", c);
  const double q95 = quantile(errors_of(r), 0.95);
  const double limit = 1.1 * jung(3) * gaussian_rate(1.0, 0.05, 2e4);
  const double feasible = share(r, [](const TrialReport& t) { return t.path_taken == "feasible"; });

  bool identical = true;
  for (std::uint64_t s = 0; s < 5; ++s) {
    SamplerSpec spec{GaussianFamily{0.5, 1.0, 2}, split_seed(77, s)};
    const PointSet x = sample(spec, 20'000);
    const Eigen::VectorXd a = hd_estimator(x, 0.05, 1.0).value;
    const Eigen::Vector2d b = heavy_tailed_estimator_2d(x, Estimator2DConfig::make(0.05, 1.0)).value;
    identical = identical && a.size() == 2 && a(0) == b(0) && a(1) == b(1);
  }
  const bool ok = q95 <= limit && feasible >= 0.95 && identical;
  return {ok, fmt("q95=%.5f limit=%.5f feasible_rate=%.3f d2_identical=%.0f", q95, limit, feasible,
                  identical ? 1.0 : 0.0)};
}

// ------------------------------------------------------------------ 8, 9

const std::vector<std::pair<int, double>> kGrid = {{1, 0.1}, {2, 0.05}, {3, 0.05}};

Outcome robust_lower() {
  bool ok = true;
  double worst_min = 0, worst_identity = 0;
  for (auto [d, eps] : kGrid) {
    const RobustLowerBoundReport r = robust_lower_bound_check(d, eps, 801);
    worst_min = std::max(worst_min, std::abs(r.min_expected_error - 2 * eps));
    const double sigma_sq = (d + 1.0) / d * eps;
    worst_identity = std::max(worst_identity, std::abs(2 * eps - jung(d) * std::sqrt(2 * sigma_sq * eps)));
    ok = ok && r.passed();
  }
  const RobustLowerBoundReport big = robust_lower_bound_check(100, 0.05, 801);
  ok = ok && worst_min <= 1e-6 && worst_identity <= 1e-12 && big.d_effective == 19 &&
       big.constant >= std::sqrt(2.0) * 0.95;
  return {ok, fmt("max_min_gap=%.2e max_identity_gap=%.2e d100_effective=%.0f d100_constant=%.4f", worst_min,
                  worst_identity, big.d_effective, big.constant)};
}

Outcome robust_upper() {
  bool ok = true;
  double worst_margin = 1e300;
  for (auto [d, eps] : kGrid) {
    const SimplexInstance s = make_simplex_instance(d, eps);
    const Eigen::MatrixXd means = -2 * eps * s.vertices;
    const Ball b = robust_upper_center(means);
    double max_err = 0;
    for (Eigen::Index j = 0; j < means.cols(); ++j) max_err = std::max(max_err, (means.col(j) - b.center).norm());
    const double sigma_sq = (d + 1.0) / d * eps;
    const double bound = jung(d) * (1 + 2 * eps) * std::sqrt(2 * sigma_sq * eps);
    ok = ok && std::abs(max_err - 2 * eps) <= 1e-9 && max_err <= bound;
    worst_margin = std::min(worst_margin, bound - max_err);
  }
  std::mt19937_64 gen(901);
  std::uniform_real_distribution<double> pos(-5, 5), w(0.05, 1), move(0.0, 0.45);
  std::size_t gap_ok = 0;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> xs(5), ps(5);
    double total = 0;
    for (int i = 0; i < 5; ++i) {
      xs[static_cast<std::size_t>(i)] = pos(gen);
      total += ps[static_cast<std::size_t>(i)] = w(gen);
    }
    for (double& p : ps) p /= total;
    const double moved = move(gen);
    std::vector<double> ys = xs, qs;
    for (double p : ps) qs.push_back(p * (1 - moved));
    ys.push_back(pos(gen) * 4);
    qs.push_back(moved);
    const auto p = DiscreteDistribution::from_1d(xs, ps);
    const auto q = DiscreteDistribution::from_1d(ys, qs);
    double mp = 0, mq = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mp += xs[i] * ps[i];
    for (std::size_t i = 0; i < ys.size(); ++i) mq += ys[i] * qs[i];
    const MeanGapReport r = mean_gap_bound_check(p, q);
    gap_ok += (r.passed && std::abs(r.gap - std::abs(mp - mq)) <= 1e-9) ? 1 : 0;
  }
  ok = ok && gap_ok == 500;
  return {ok, fmt("min_bound_margin=%.4f mean_gap_pairs_passed=%.0f/500", worst_margin, static_cast<double>(gap_ok))};
}

// ------------------------------------------------------------------ 10

Outcome determinism() {
  bool ok = true;
  std::string detail;
  for (const char* estimator : {"catoni", "heavy2d"}) {
    ExperimentConfig c;
    c.estimator = estimator;
    c.dim = std::string(estimator) == "heavy2d" ? 2 : 1;
    c.n = 20'000;
    c.trials = 40;
    c.seed = 1001;
    c.dist = "student-t";
    setenv("TIGHTMEAN_THREADS", "1", 1);
    const CommandResult a = run_command("coverage", c);
    setenv("TIGHTMEAN_THREADS", "3", 1);
    const CommandResult b = run_command("coverage", c);
    unsetenv("TIGHTMEAN_THREADS");
    const std::string ha = a.summary["determinism_hash"], hb = b.summary["determinism_hash"];
    ok = ok && ha == hb && determinism_hash(a.trials) == ha;
    detail += std::string(estimator) + "=" + ha + (ha == hb ? " (repeat match) " : " (repeat MISMATCH) ");
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      influence_constraints, geometry_oracles, catoni_coverage, heavy_tail_advantage, tester_soundness,
      two_dim_estimator,     high_dim_smoke,   robust_lower,    robust_upper,         determinism};
  for (std::size_t k = 0; k < criteria.size(); ++k) report(static_cast<int>(k + 1), guarded(criteria[k]));
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
