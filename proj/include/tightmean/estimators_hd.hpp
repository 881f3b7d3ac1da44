#pragma once

#include <cstdint>
#include <vector>

#include "tightmean/estimators2d.hpp"
#include "tightmean/geometry.hpp"

namespace tightmean {

/// { w : |frame^T w - center| <= radius }
struct CylinderConstraint {
  Frame frame;
  Point2 center = Point2::Zero();
  double radius = 0.0;
};

Point2 project_to_frame(const Eigen::VectorXd& x, const Frame& frame);

/// max over constraints of |frame^T w - center| - radius
double cylinder_violation(const std::vector<CylinderConstraint>& cylinders, const Eigen::VectorXd& w);

inline constexpr double kHdSampleConstant = 40.0;

struct HdConfig {
  double zeta = 0.2;
  std::size_t net_cap = kDefaultSubspaceCap;
  std::uint64_t net_seed = 0;
  double beta = kDefaultBeta;
  double L = kDefaultL;
  double xi = kDefaultXi;
  PsiFunction psi = PsiFunction{};
};

struct HdDiagnostics {
  std::size_t frames = 0;
  double objective = 0.0;   // f at the output
  double tolerance = 0.0;
  bool feasible = false;    // objective <= tolerance
  double max_frame_residual = 0.0;
  double cylinder_radius = 0.0;
  double claimed_radius = 0.0;  // (1 - tau) JUNG_d sigma sqrt(2 log(2/delta) / n)
  std::size_t iterations = 0;
  std::size_t inlier_frames = 0;
  std::size_t fallback_frames = 0;
};

struct HdEstimate {
  Eigen::VectorXd value;
  HdDiagnostics diagnostics;
  std::vector<CylinderConstraint> cylinders;
};

/// n >= max(C log(1/delta), C^2 d) with C = kHdSampleConstant.
std::size_t hd_min_samples(int d, double delta);

/// Minimizes the cylinder violation by subgradient descent from `start`.
/// Stops once the best value improves by less than 1e-10 over 100 steps.
Eigen::VectorXd minimize_cylinder_violation(const std::vector<CylinderConstraint>& cylinders,
                                            const Eigen::VectorXd& start, double scale,
                                            std::size_t* iterations = nullptr);

/// d == 2 returns heavy_tailed_estimator_2d on all samples. Otherwise the first
/// ceil(xi n) samples give a coordinate-wise median-of-means start and the rest
/// feed one 2-D estimate per frame of the subspace net.
HdEstimate hd_estimator(const PointSet& samples, double delta, double sigma, const HdConfig& cfg = {});

}  // namespace tightmean
