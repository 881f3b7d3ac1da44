#include "tightmean/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tightmean/error.hpp"
#include "tightmean/rng.hpp"

namespace tightmean {

Eigen::MatrixXd simplex_vertices(int d) {
  require(d >= 1, ErrorCode::InvalidArgument, "simplex dimension must be >= 1");
  // Helmert rows form an orthonormal basis of the sum-zero hyperplane in R^{d+1};
  // column i is the image of the i-th standard basis vector.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d + 1);
  for (int k = 1; k <= d; ++k) {
    const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) h(k - 1, i) = s;
    h(k - 1, k) = -k * s;
  }
  return h * std::sqrt(static_cast<double>(d + 1) / d);
}

SimplexInstance make_simplex_instance(int d, double eps) {
  require(d >= 1, ErrorCode::InvalidArgument, "simplex dimension must be >= 1");
  require(eps > 0 && eps <= 1.0 / (d + 1) + 1e-15, ErrorCode::InvalidArgument,
          "InvalidEps: need 0 < eps <= 1/(d+1)");
  const Eigen::MatrixXd v = simplex_vertices(d);

  Eigen::MatrixXd support(d, d + 2);
  support.leftCols(d + 1) = v;
  support.col(d + 1).setZero();
  Eigen::VectorXd probs = Eigen::VectorXd::Constant(d + 2, eps);
  probs(d + 1) = 1.0 - (d + 1) * eps;

  std::vector<DiscreteDistribution> clean;
  clean.reserve(static_cast<std::size_t>(d + 1));
  for (int j = 0; j <= d; ++j) {
    Eigen::MatrixXd s = support;
    s.col(j) = -v.col(j);
    clean.emplace_back(std::move(s), probs);
  }
  return SimplexInstance{d, eps, v, DiscreteDistribution(support, probs), std::move(clean)};
}

double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require(p.dimension() == q.dimension(), ErrorCode::InvalidArgument, "dimension mismatch");
  std::vector<Eigen::VectorXd> atoms;
  std::vector<double> diff;
  auto add = [&](const Eigen::VectorXd& x, double w) {
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if ((atoms[k] - x).lpNorm<Eigen::Infinity>() <= 1e-12) {
        diff[k] += w;
        return;
      }
    }
    atoms.push_back(x);
    diff.push_back(w);
  };
  for (Eigen::Index i = 0; i < p.size(); ++i) add(p.support().col(i), p.probs()(i));
  for (Eigen::Index i = 0; i < q.size(); ++i) add(q.support().col(i), -q.probs()(i));
  double l1 = 0.0;
  for (double w : diff) l1 += std::abs(w);
  return 0.5 * l1;
}

double simplex_mean_distance(const Eigen::MatrixXd& vertices, const Eigen::VectorXd& u) {
  return (vertices.colwise() - u).colwise().norm().mean();
}

MinimizationResult minimize_mean_distance(const Eigen::MatrixXd& points, std::uint64_t seed,
                                          int starts, double step, int iterations) {
  require(points.cols() > 0, ErrorCode::EmptyInput, "no points");
  const Eigen::Index d = points.rows();
  const double extent = std::max(points.cwiseAbs().maxCoeff(), 1e-12);
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-2.0 * extent, 2.0 * extent);

  MinimizationResult best{Eigen::VectorXd::Zero(d), std::numeric_limits<double>::infinity()};
  Eigen::VectorXd u(d), g(d);
  for (int s = 0; s < starts; ++s) {
    for (Eigen::Index k = 0; k < d; ++k) u(k) = unif(rng);
    for (int it = 0; it <= iterations; ++it) {
      const double f = simplex_mean_distance(points, u);
      if (f < best.value) {
        best.value = f;
        best.argmin = u;
      }
      if (it == iterations) break;
      g.setZero();
      for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const Eigen::VectorXd r = u - points.col(i);
        const double len = r.norm();
        if (len > 0) g += r / len;
      }
      u -= step * g / static_cast<double>(points.cols());
    }
  }
  return best;
}

RobustLowerBoundReport robust_lower_bound_check(int d, double eps, std::uint64_t seed) {
  require(d >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
  require(eps > 0 && eps <= 0.5, ErrorCode::InvalidArgument, "need 0 < eps <= 1/2");
  RobustLowerBoundReport r;
  r.d = d;
  r.eps = eps;
  const int cap = static_cast<int>(std::floor(1.0 / eps - 1.0 + 1e-9));
  r.d_effective = std::max(1, std::min(d, cap));
  const int dp = r.d_effective;

  const SimplexInstance inst = make_simplex_instance(dp, eps);
  const Eigen::MatrixXd clean_means = -2.0 * eps * inst.vertices;
  const MinimizationResult m = minimize_mean_distance(clean_means, seed);
  r.min_expected_error = m.value;
  r.argmin = m.argmin;
  r.minimum_ok = m.value >= 2.0 * eps - 1e-6;

  r.sigma_sq = static_cast<double>(dp + 1) / dp * eps;
  const double scale = std::sqrt(2.0 * r.sigma_sq * eps);
  r.identity_gap = std::abs(2.0 * eps - jung_constant(dp) * scale);
  r.identity_ok = r.identity_gap <= 1e-12;
  r.constant = 2.0 * eps / scale;
  return r;
}

Ball robust_upper_center(const PointSet& candidate_means) {
  require(candidate_means.cols() > 0, ErrorCode::EmptyInput, "no candidate means");
  return min_enclosing_ball(candidate_means);
}

double robust_upper_radius_bound(int d, double sigma_sq, double eps) {
  require(eps > 0 && eps < 0.5, ErrorCode::InvalidArgument, "need 0 < eps < 1/2");
  return jung_constant(d) * std::sqrt(2.0 * sigma_sq * eps) / std::sqrt(1.0 - 2.0 * eps);
}

MeanGapReport mean_gap_bound_check(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require(p.dimension() == 1 && q.dimension() == 1, ErrorCode::InvalidArgument,
          "mean_gap_bound_check expects one-dimensional laws");
  const Moments mp = moments(p);
  const Moments mq = moments(q);
  MeanGapReport r;
  r.gap = std::abs(mp.mean(0) - mq.mean(0));
  r.eps = tv_distance(p, q) / 2.0;
  r.sigma_sq = std::max(mp.covariance(0, 0), mq.covariance(0, 0));
  if (r.eps >= 0.5) {
    r.bound = std::numeric_limits<double>::infinity();
  } else {
    r.bound = 2.0 * std::sqrt(2.0 * r.sigma_sq * r.eps) / std::sqrt(1.0 - 2.0 * r.eps);
  }
  r.passed = r.gap <= r.bound + 1e-12;
  return r;
}

}  // namespace tightmean
