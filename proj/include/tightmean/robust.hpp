#pragma once

#include <cstdint>
#include <vector>

#include "tightmean/distributions.hpp"
#include "tightmean/geometry.hpp"

namespace tightmean {

/// Regular simplex with unit vertices v_0..v_d, the corrupted law D* (mass eps
/// at each vertex, the rest at 0) and the clean laws D_j (v_j replaced by -v_j).
struct SimplexInstance {
  int d = 0;
  double eps = 0.0;
  Eigen::MatrixXd vertices;  // d x (d+1)
  DiscreteDistribution corrupted;
  std::vector<DiscreteDistribution> clean;
};

/// Centered unit-norm simplex vertices as columns of a d x (d+1) matrix.
Eigen::MatrixXd simplex_vertices(int d);

/// Throws InvalidArgument ("InvalidEps") unless 0 < eps <= 1/(d+1).
SimplexInstance make_simplex_instance(int d, double eps);

/// Half the L1 distance; support points closer than 1e-12 are identified.
double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// (1/(d+1)) sum_i |v_i - u|
double simplex_mean_distance(const Eigen::MatrixXd& vertices, const Eigen::VectorXd& u);

struct MinimizationResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
};

/// Multi-start gradient descent on u -> (1/k) sum_i |u - p_i| over the columns p_i.
/// Starts are drawn uniformly from the bounding box scaled by 2.
MinimizationResult minimize_mean_distance(const Eigen::MatrixXd& points, std::uint64_t seed = 0,
                                          int starts = 50, double step = 1e-2,
                                          int iterations = 10'000);

struct RobustLowerBoundReport {
  int d = 0;
  int d_effective = 0;
  double eps = 0.0;
  double sigma_sq = 0.0;          // (d'+1)/d' eps
  double min_expected_error = 0.0;
  Eigen::VectorXd argmin;
  double identity_gap = 0.0;      // |2 eps - JUNG_d' sqrt(2 sigma^2 eps)|
  double constant = 0.0;          // lower bound / sqrt(2 sigma^2 eps)
  bool minimum_ok = false;        // min >= 2 eps - 1e-6
  bool identity_ok = false;       // identity_gap <= 1e-12
  bool passed() const noexcept { return minimum_ok && identity_ok; }
};

RobustLowerBoundReport robust_lower_bound_check(int d, double eps, std::uint64_t seed = 0);

/// MEB of the candidate means (columns). Throws EmptyInput if there are none.
Ball robust_upper_center(const PointSet& candidate_means);

/// JUNG_d sqrt(2 sigma^2 eps) / sqrt(1 - 2 eps)
double robust_upper_radius_bound(int d, double sigma_sq, double eps);

struct MeanGapReport {
  double gap = 0.0;
  double eps = 0.0;       // TV / 2
  double sigma_sq = 0.0;  // max of the two variances
  double bound = 0.0;     // 2 sqrt(2 sigma^2 eps) / sqrt(1 - 2 eps)
  bool passed = false;
};

MeanGapReport mean_gap_bound_check(const DiscreteDistribution& p, const DiscreteDistribution& q);

}  // namespace tightmean
