#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace tightmean {

using Point2 = Eigen::Vector2d;
/// Point sets are stored column-wise: a d x n matrix holds n points in R^d.
using PointSet = Eigen::MatrixXd;

/// Equally spaced unit vectors on the circle.
struct DirectionNet {
  double rho_requested = 0.0;
  /// Covering radius actually achieved: 2 sin(pi / (2m)).
  double rho_effective = 0.0;
  bool capped = false;
  std::vector<Point2> vectors;

  std::size_t size() const noexcept { return vectors.size(); }
};

inline constexpr std::size_t kDefaultDirectionCap = 20'000;
inline constexpr std::size_t kDefaultSubspaceCap = 100'000;

/// m = min(cap, ceil(2 pi / rho)) directions at angles 2 pi k / m.
DirectionNet build_rho_net(double rho, std::size_t cap = kDefaultDirectionCap);

/// Orthonormal pair spanning a 2-plane W in R^d.
struct Frame {
  Eigen::VectorXd v1;
  Eigen::VectorXd v2;
};

struct SubspaceNet {
  int dimension = 0;
  double zeta = 0.0;
  std::vector<Frame> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
};

/// Greedy random zeta-packing of the sphere (up to sign), each point completed
/// to a frame with one orthogonal vector. d == 2 yields the single frame (e1, e2).
SubspaceNet build_subspace_net(int d, double zeta, std::size_t cap = kDefaultSubspaceCap,
                               std::uint64_t seed = 0);

/// Norm of the component of x orthogonal to span(frame).
double residual_norm(const Eigen::VectorXd& x, const Frame& frame);

/// { w : |<direction, w> - center| <= half_width }
struct ConfidenceStrip {
  Point2 direction;
  double center = 0.0;
  double half_width = 0.0;
};

struct ConvexRegion {
  std::vector<Point2> vertices;  // counter-clockwise
  bool empty = true;
};

/// Intersection of the strips, clipped to a bounding box that contains every
/// strip's slab around the origin region of interest.
ConvexRegion intersect_strips(const std::vector<ConfidenceStrip>& strips);

/// max over strips of |<u, w> - c| - h; <= 0 iff w lies in every strip.
double max_strip_violation(const std::vector<ConfidenceStrip>& strips, const Point2& w);

/// Point minimizing max_strip_violation, by nested golden-section search.
/// Used when the intersection is empty.
Point2 min_violation_point(const std::vector<ConfidenceStrip>& strips);

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Exact minimum enclosing ball (move-to-front Welzl with a containment
/// certificate). Throws EmptyInput for an empty set.
Ball min_enclosing_ball(const PointSet& points);

Ball meb_of_region(const ConvexRegion& region);

double diameter(const PointSet& points);

/// sqrt(2d / (d + 1))
double jung_constant(int d);

/// R <= D sqrt(d / (2 (d + 1))) + 1e-9 for the enclosing radius R and diameter D.
bool check_jung_inequality(const PointSet& points, int d);

struct GeneralizedJungReport {
  int i = 0;
  int j = 0;
  double radius_i = 0.0;
  double radius_j_estimate = 0.0;
  double factor = 1.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

/// Compares the max circumradius of i-dimensional projections against the
/// factor sqrt(i (j+1) / (j (i+1))) times the (sampled) max over j-dimensional
/// projections. Sampling under-estimates R_j, so a failure at coarse sampling
/// can be spurious.
GeneralizedJungReport check_generalized_jung(const PointSet& points, int i, int j,
                                             std::size_t projection_samples,
                                             std::uint64_t seed = 0);

}  // namespace tightmean
