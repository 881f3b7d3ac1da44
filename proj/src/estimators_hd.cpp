#include "tightmean/estimators_hd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tightmean/error.hpp"
#include "tightmean/estimators1d.hpp"

namespace tightmean {

namespace {

constexpr std::size_t kStallWindow = 100;
constexpr double kStallImprovement = 1e-10;
constexpr std::size_t kMaxDescentSteps = 200'000;

}  // namespace

Point2 project_to_frame(const Eigen::VectorXd& x, const Frame& frame) {
  return {frame.v1.dot(x), frame.v2.dot(x)};
}

double cylinder_violation(const std::vector<CylinderConstraint>& cylinders, const Eigen::VectorXd& w) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : cylinders)
    worst = std::max(worst, (project_to_frame(w, c.frame) - c.center).norm() - c.radius);
  return worst;
}

std::size_t hd_min_samples(int d, double delta) {
  const double by_delta = kHdSampleConstant * std::log(1.0 / delta);
  const double by_dim = kHdSampleConstant * kHdSampleConstant * d;
  return static_cast<std::size_t>(std::ceil(std::max(by_delta, by_dim)));
}

Eigen::VectorXd minimize_cylinder_violation(const std::vector<CylinderConstraint>& cylinders,
                                            const Eigen::VectorXd& start, double scale,
                                            std::size_t* iterations) {
  require(!cylinders.empty(), ErrorCode::InvalidArgument, "no cylinder constraints");
  Eigen::VectorXd w = start;
  Eigen::VectorXd best = start;
  double best_f = cylinder_violation(cylinders, w);
  double window_start_f = best_f;
  std::size_t t = 0;
  for (; t < kMaxDescentSteps; ++t) {
    // Subgradient of the active constraint.
    double worst = -std::numeric_limits<double>::infinity();
    const CylinderConstraint* active = nullptr;
    Point2 offset = Point2::Zero();
    for (const auto& c : cylinders) {
      const Point2 r = project_to_frame(w, c.frame) - c.center;
      const double v = r.norm() - c.radius;
      if (v > worst) {
        worst = v;
        active = &c;
        offset = r;
      }
    }
    const double len = offset.norm();
    if (len == 0.0) break;  // at the center of the active cylinder: optimal
    const Eigen::VectorXd g = (active->frame.v1 * offset.x() + active->frame.v2 * offset.y()) / len;
    w -= scale / std::sqrt(static_cast<double>(t) + 1.0) * g;

    const double f = cylinder_violation(cylinders, w);
    if (f < best_f) {
      best_f = f;
      best = w;
    }
    if ((t + 1) % kStallWindow == 0) {
      if (window_start_f - best_f < kStallImprovement) {
        ++t;
        break;
      }
      window_start_f = best_f;
    }
  }
  if (iterations) *iterations = t;
  return best;
}

HdEstimate hd_estimator(const PointSet& samples, double delta, double sigma, const HdConfig& cfg) {
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  require(sigma > 0, ErrorCode::InvalidArgument, "sigma must be positive");
  const int d = static_cast<int>(samples.rows());
  require(d >= 2, ErrorCode::InvalidArgument, "hd_estimator needs d >= 2");
  const auto n = static_cast<std::size_t>(samples.cols());
  require(n >= hd_min_samples(d, delta), ErrorCode::TooFewSamples,
          "hd_estimator: need n >= max(C log(1/delta), C^2 d)");
  const double rate = sigma * std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(n));

  HdEstimate out;
  if (d == 2) {
    const auto cfg2 = Estimator2DConfig::make(delta, sigma, cfg.psi, cfg.beta, cfg.L, cfg.xi);
    const Estimate2D e = heavy_tailed_estimator_2d(samples, cfg2);
    out.value = e.value;
    auto& diag = out.diagnostics;
    diag.frames = 1;
    diag.feasible = true;
    diag.claimed_radius = e.claimed_radius;
    diag.cylinder_radius = e.claimed_radius;
    diag.tolerance = 1e-6 * rate;
    diag.inlier_frames = e.path == EstimatorPath::InlierLight ? 1 : 0;
    diag.fallback_frames = e.fallback_used ? 1 : 0;
    return out;
  }

  const SubspaceNet net = build_subspace_net(d, cfg.zeta, cfg.net_cap, cfg.net_seed);
  const double frame_delta = delta / static_cast<double>(net.size());
  const auto cfg2 = Estimator2DConfig::make(frame_delta, sigma, cfg.psi, cfg.beta, cfg.L, cfg.xi);
  const double radius = (1.0 - cfg2.tau) * jung_constant(2) * rate;

  const auto m = static_cast<Eigen::Index>(std::ceil(cfg.xi * static_cast<double>(n)));
  const PointSet reserved = samples.leftCols(m);
  const PointSet rest = samples.rightCols(static_cast<Eigen::Index>(n) - m);

  Eigen::VectorXd start(d);
  for (int j = 0; j < d; ++j) {
    const Eigen::VectorXd row = reserved.row(j).transpose();
    start(j) = median_of_means({row.data(), static_cast<std::size_t>(row.size())}, delta);
  }

  auto& diag = out.diagnostics;
  out.cylinders.reserve(net.size());
  PointSet projected(2, rest.cols());
  for (const Frame& f : net.pairs) {
    projected.row(0) = f.v1.transpose() * rest;
    projected.row(1) = f.v2.transpose() * rest;
    const Estimate2D e = heavy_tailed_estimator_2d(projected, cfg2);
    if (e.path == EstimatorPath::InlierLight) ++diag.inlier_frames;
    if (e.fallback_used) ++diag.fallback_frames;
    out.cylinders.push_back({f, e.value, radius});
  }

  out.value = minimize_cylinder_violation(out.cylinders, start, rate, &diag.iterations);
  diag.frames = net.size();
  diag.objective = cylinder_violation(out.cylinders, out.value);
  diag.tolerance = 1e-6 * rate;
  diag.feasible = diag.objective <= diag.tolerance;
  diag.cylinder_radius = radius;
  diag.claimed_radius = (1.0 - cfg2.tau) * jung_constant(d) * rate;
  for (const auto& c : out.cylinders)
    diag.max_frame_residual =
        std::max(diag.max_frame_residual, (project_to_frame(out.value, c.frame) - c.center).norm());
  return out;
}

}  // namespace tightmean
