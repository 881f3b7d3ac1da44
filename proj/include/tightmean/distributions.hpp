#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "tightmean/geometry.hpp"

namespace tightmean {

/// Finite-support distribution on R^d. Support points are the columns of
/// `support`; construction validates the probabilities.
class DiscreteDistribution {
 public:
  DiscreteDistribution(Eigen::MatrixXd support, Eigen::VectorXd probs);

  static DiscreteDistribution point_mass(const Eigen::VectorXd& p);
  static DiscreteDistribution from_1d(const std::vector<double>& xs, const std::vector<double>& ps);

  int dimension() const noexcept { return static_cast<int>(support_.rows()); }
  Eigen::Index size() const noexcept { return support_.cols(); }
  const Eigen::MatrixXd& support() const noexcept { return support_; }
  const Eigen::VectorXd& probs() const noexcept { return probs_; }

  /// Law of <w, x>.
  DiscreteDistribution project(const Eigen::VectorXd& w) const;
  /// Product law of two independent distributions (dimensions concatenate).
  static DiscreteDistribution product(const DiscreteDistribution& a, const DiscreteDistribution& b);

 private:
  Eigen::MatrixXd support_;
  Eigen::VectorXd probs_;
};

DiscreteDistribution distribution_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DiscreteDistribution& dist);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  /// Largest eigenvalue of the covariance.
  double sigma_sq_bound = 0.0;
};

Moments moments(const DiscreteDistribution& dist);

/// E[(x - mu)^2 1{|x - mu| <= radius}] for a 1-D law.
double inlier_moment(const DiscreteDistribution& dist1d, double radius);
/// E[(x - mu)^2 1{|x - mu| >= radius}] for a 1-D law.
double outlier_moment(const DiscreteDistribution& dist1d, double radius);

/// E[(x-mu)^2 1{|x-mu| <= beta T}] < (1 - L) sigma^2
bool is_inlier_light(const DiscreteDistribution& dist1d, double beta, double L, double T,
                     double sigma);

/// Exact sup over unit w of E[<w, x-mu>^2 1{|<w, x-mu>| >= radius}] for d = 2,
/// by enumerating the arcs on which the set of outlying atoms is constant.
double max_directional_outlier_moment_2d(const DiscreteDistribution& dist2d, double radius);

/// Same quantity by brute force over `directions` equally spaced angles.
double sampled_directional_outlier_moment_2d(const DiscreteDistribution& dist2d, double radius,
                                             std::size_t directions);

/// d = 1: exact. d = 2: exact arc enumeration. d >= 3: maximum over
/// `direction_samples` seeded random directions plus the directions of the
/// centered support points.
bool is_outlier_light(const DiscreteDistribution& dist, double beta, double L, double T,
                      double sigma, std::size_t direction_samples = 10'000);

/// Closed-form truncated second moments of N(0, s^2).
double gaussian_inlier_moment(double s, double radius);
double gaussian_outlier_moment(double s, double radius);

struct GaussianFamily {
  double mean = 0.0;  // every coordinate
  double sigma = 1.0;
  int dim = 1;
};

struct StudentTFamily {
  double dof = 3.0;
  double scale = 1.0;
  int dim = 1;
};

/// Along `axis`: +-M with total probability q, otherwise N(0, s^2), where
/// q M^2 = outlier_share sigma^2 and the total variance is sigma^2. Other
/// coordinates are independent N(0, sigma^2).
struct TwoPointOutlierFamily {
  double M = 3.0;
  double sigma = 1.0;
  int dim = 1;
  int axis = 0;
  double outlier_share = 0.5;
};

struct DiscreteFamily {
  DiscreteDistribution dist;
};

struct SamplerSpec {
  std::variant<GaussianFamily, StudentTFamily, TwoPointOutlierFamily, DiscreteFamily> family;
  std::uint64_t seed = 0;
};

void validate(const SamplerSpec& spec);
int dimension(const SamplerSpec& spec);
Eigen::VectorXd true_mean(const SamplerSpec& spec);
/// Upper bound on the covariance's largest eigenvalue.
double variance_bound(const SamplerSpec& spec);

/// n i.i.d. draws as a d x n matrix; identical for identical (spec, n).
PointSet sample(const SamplerSpec& spec, std::size_t n);

/// Outlier threshold scale sigma sqrt(n / (2 log(2 / delta))).
double threshold_scale(double sigma, std::size_t n, double delta);

/// Two-dimensional law whose e1 projection is inlier-light with margin:
/// atoms at +-c T e1 carrying 0.75 sigma^2 of variance, a near-origin pair
/// carrying the remaining 0.25 sigma^2, and an independent +-sigma e2 coordinate.
DiscreteDistribution make_inlier_light_instance(double beta, double L, std::size_t n, double delta,
                                                double sigma, double c = 0.5);

}  // namespace tightmean
