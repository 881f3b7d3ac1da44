#include "tightmean/lightness.hpp"

#include <cmath>

#include "tightmean/error.hpp"

namespace tightmean {

const char* to_string(Lightness l) {
  return l == Lightness::InlierLight ? "inlier-light" : "outlier-light";
}

LightnessVerdict test_lightness_1d(std::span<const double> samples, double mu0, double T,
                                   double beta, double L, double sigma) {
  require(!samples.empty(), ErrorCode::EmptyInput, "test_lightness_1d: no samples");
  require(T > 0 && sigma > 0 && beta > 0 && beta < 1 && L > 0 && L < 1,
          ErrorCode::InvalidArgument, "test_lightness_1d: parameters out of range");
  const double window = 2.0 * beta * T;
  double acc = 0.0;
  for (double x : samples) {
    const double r = x - mu0;
    if (std::abs(r) <= window) acc += r * r;
  }
  LightnessVerdict v;
  v.statistic = acc / static_cast<double>(samples.size());
  v.threshold = (1.0 - 2.0 * L) * sigma * sigma;
  v.label = v.statistic <= v.threshold ? Lightness::InlierLight : Lightness::OutlierLight;
  return v;
}

Verdict2D test_lightness_2d(const PointSet& samples, double mu0_e1, double mu0_e2, double T,
                            double beta, double L, double sigma) {
  require(samples.rows() == 2, ErrorCode::InvalidArgument, "test_lightness_2d: expected 2 x n samples");
  require(samples.cols() > 0, ErrorCode::EmptyInput, "test_lightness_2d: no samples");
  const double mu0[2] = {mu0_e1, mu0_e2};
  Verdict2D out;
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd row = samples.row(j).transpose();
    out.per_axis[j] = test_lightness_1d({row.data(), static_cast<std::size_t>(row.size())}, mu0[j], T,
                                        beta, L, sigma);
  }
  for (int j = 0; j < 2; ++j) {
    if (out.per_axis[j].label == Lightness::InlierLight) {
      out.outcome = Verdict2D::Outcome::Direction;
      out.axis = j;
      break;
    }
  }
  return out;
}

bool lift_outlier_lightness_check(const DiscreteDistribution& dist, const Point2& v1,
                                  const Point2& v2, double beta, double L, double T, double sigma) {
  require(dist.dimension() == 2, ErrorCode::InvalidArgument, "expected a two-dimensional distribution");
  require(std::abs(v1.dot(v2)) <= 0.75 + 1e-12, ErrorCode::HypothesisViolated,
          "lift_outlier_lightness_check: need |<v1, v2>| <= 3/4");
  const bool premise = is_outlier_light(dist.project(v1), beta, L, T, sigma) &&
                       is_outlier_light(dist.project(v2), beta, L, T, sigma);
  if (!premise) return true;
  return is_outlier_light(dist, 4.0 * beta, 4.0 * L, T, sigma);
}

bool triangle_inlier_lightness_check(const DiscreteDistribution& dist, int axis,
                                     const std::vector<Point2>& directions, double beta, double L,
                                     double T, double sigma) {
  require(dist.dimension() == 2, ErrorCode::InvalidArgument, "expected a two-dimensional distribution");
  require(axis == 0 || axis == 1, ErrorCode::InvalidArgument, "axis must be 0 or 1");
  require(!directions.empty(), ErrorCode::InvalidArgument, "need at least one direction");
  for (std::size_t a = 0; a < directions.size(); ++a)
    for (std::size_t b = a + 1; b < directions.size(); ++b)
      require(std::abs(directions[a].dot(directions[b])) <= 0.75 + 1e-12, ErrorCode::HypothesisViolated,
              "triangle_inlier_lightness_check: need pairwise |<v_j, v_k>| <= 3/4");
  const Eigen::Vector2d e = axis == 0 ? Eigen::Vector2d::UnitX() : Eigen::Vector2d::UnitY();
  if (!is_inlier_light(dist.project(e), beta, L, T, sigma)) return true;
  for (const auto& v : directions)
    if (is_inlier_light(dist.project(v), beta / 8.0, L / 8.0, T, sigma)) return true;
  return false;
}

}  // namespace tightmean
