#include <cmath>
#include <random>

#include "doctest.h"
#include "tightmean/distributions.hpp"
#include "tightmean/error.hpp"
#include "tightmean/robust.hpp"

using namespace tightmean;

TEST_CASE("simplex identities") {
  for (int d = 1; d <= 8; ++d) {
    const Eigen::MatrixXd v = simplex_vertices(d);
    CHECK(v.rowwise().sum().norm() < 1e-12);
    for (int i = 0; i <= d; ++i) {
      CHECK(v.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
      for (int j = i + 1; j <= d; ++j) CHECK(std::abs(v.col(i).dot(v.col(j)) + 1.0 / d) < 1e-12);
    }
  }
}

TEST_CASE("simplex instance") {
  const SimplexInstance one = make_simplex_instance(1, 0.1);
  const Moments m1 = moments(one.corrupted);
  CHECK(std::abs(m1.mean(0)) < 1e-12);
  CHECK(m1.covariance(0, 0) == doctest::Approx(0.2));
  CHECK(std::abs(moments(one.clean[0]).mean(0) + 2 * 0.1 * one.vertices(0, 0)) < 1e-12);
  CHECK(std::abs(std::abs(moments(one.clean[0]).mean(0)) - 0.2) < 1e-12);

  for (auto [d, eps] : {std::pair{2, 0.05}, std::pair{3, 0.05}, std::pair{5, 0.1}}) {
    const SimplexInstance s = make_simplex_instance(d, eps);
    const Moments m = moments(s.corrupted);
    const double iso = (d + 1.0) / d * eps;
    CHECK((m.covariance - iso * Eigen::MatrixXd::Identity(d, d)).norm() < 1e-12);
    for (int j = 0; j <= d; ++j) {
      const Moments mj = moments(s.clean[static_cast<std::size_t>(j)]);
      CHECK((mj.mean + 2 * eps * s.vertices.col(j)).norm() < 1e-12);
      CHECK(mj.sigma_sq_bound <= iso + 1e-12);
      const Eigen::VectorXd v = s.vertices.col(j);
      CHECK(v.dot(mj.covariance * v) == doctest::Approx(iso - 4 * eps * eps).epsilon(1e-12));
      CHECK(tv_distance(s.corrupted, s.clean[static_cast<std::size_t>(j)]) == doctest::Approx(eps).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(make_simplex_instance(2, 0.4), Error);
  CHECK_THROWS_AS(make_simplex_instance(0, 0.1), Error);
}

TEST_CASE("total variation") {
  const auto p = DiscreteDistribution::from_1d({0, 1}, {0.5, 0.5});
  const auto q = DiscreteDistribution::from_1d({2, 3}, {0.5, 0.5});
  const auto r = DiscreteDistribution::from_1d({1, 0, 5}, {0.2, 0.6, 0.2});
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(p, q) == doctest::Approx(1.0));
  CHECK(tv_distance(p, r) == doctest::Approx(0.3));
  CHECK(tv_distance(r, p) == tv_distance(p, r));
  CHECK(tv_distance(p, q) <= tv_distance(p, r) + tv_distance(r, q) + 1e-12);
  const auto near = DiscreteDistribution::from_1d({1e-14, 1}, {0.5, 0.5});
  CHECK(tv_distance(p, near) == 0.0);
}

TEST_CASE("average distance to the vertices is smallest at the center") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g(0, 1);
  for (int d = 1; d <= 5; ++d) {
    const Eigen::MatrixXd v = simplex_vertices(d);
    CHECK(simplex_mean_distance(v, Eigen::VectorXd::Zero(d)) == doctest::Approx(1.0).epsilon(1e-14));
    for (int t = 0; t < 10000; ++t) {
      Eigen::VectorXd u(d);
      for (int k = 0; k < d; ++k) u(k) = g(gen) * (t % 3 + 0.1);
      CHECK(simplex_mean_distance(v, u) >= 1.0 - 1e-12);
    }
  }
  const Eigen::MatrixXd line = simplex_vertices(1);
  CHECK(simplex_mean_distance(line, line.col(0)) == doctest::Approx(1.0));
  for (int d : {2, 3}) {
    const MinimizationResult m = minimize_mean_distance(simplex_vertices(d), 5);
    CHECK(m.value >= 1.0 - 1e-7);
    CHECK(m.value <= 1.0 + 1e-6);
    CHECK(m.argmin.norm() < 1e-2);
  }
}

TEST_CASE("lower bound reports") {
  for (auto [d, eps] : {std::pair{1, 0.1}, std::pair{2, 0.05}, std::pair{3, 0.05}}) {
    const RobustLowerBoundReport r = robust_lower_bound_check(d, eps);
    CHECK(r.passed());
    CHECK(std::abs(r.min_expected_error - 2 * eps) <= 1e-6);
    CHECK(r.identity_gap <= 1e-12);
    CHECK(r.constant == doctest::Approx(jung_constant(d)));
  }
  const RobustLowerBoundReport big = robust_lower_bound_check(100, 0.05);
  CHECK(big.d_effective == 19);
  CHECK(big.constant >= std::sqrt(2.0) * 0.95);
  CHECK(big.constant == doctest::Approx(jung_constant(19)));
}

TEST_CASE("upper bound center") {
  for (auto [d, eps] : {std::pair{1, 0.1}, std::pair{2, 0.05}, std::pair{3, 0.05}}) {
    const SimplexInstance s = make_simplex_instance(d, eps);
    const Ball b = robust_upper_center(-2 * eps * s.vertices);
    CHECK(b.center.norm() < 1e-9);
    CHECK(b.radius == doctest::Approx(2 * eps));
    const double sigma_sq = (d + 1.0) / d * eps;
    CHECK(2 * eps <= jung_constant(d) * (1 + 2 * eps) * std::sqrt(2 * sigma_sq * eps));
    CHECK(b.radius <= robust_upper_radius_bound(d, sigma_sq, eps) + 1e-12);
  }
  PointSet single(2, 1);
  single << 0.3, 0.4;
  CHECK(robust_upper_center(single).radius == 0.0);
  CHECK_THROWS_AS(robust_upper_center(PointSet(2, 0)), Error);
}

TEST_CASE("mean gap bound") {
  const auto p = DiscreteDistribution::from_1d({0.0}, {1.0});
  CHECK(mean_gap_bound_check(p, p).passed);
  CHECK(mean_gap_bound_check(p, p).gap == 0.0);

  const double eps = 0.05;
  const auto q = DiscreteDistribution::from_1d({0.0, 1 / std::sqrt(2 * eps)}, {1 - 2 * eps, 2 * eps});
  const MeanGapReport r = mean_gap_bound_check(p, q);
  CHECK(r.gap == doctest::Approx(std::sqrt(2 * eps)));
  CHECK(r.eps == doctest::Approx(eps));
  CHECK(r.sigma_sq == doctest::Approx(1 - 2 * eps));
  CHECK(r.passed);

  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> x(-10, 10), w(0.01, 1), t(0, 0.49);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> xs, ps, ys, qs;
    for (int i = 0; i < 4; ++i) {
      xs.push_back(x(gen));
      ps.push_back(w(gen));
    }
    double s = 0;
    for (double v : ps) s += v;
    for (double& v : ps) v /= s;
    const double moved = t(gen);
    ys = xs;
    for (double v : ps) qs.push_back(v * (1 - moved));
    ys.push_back(x(gen) * 3);
    qs.push_back(moved);
    CHECK(mean_gap_bound_check(DiscreteDistribution::from_1d(xs, ps), DiscreteDistribution::from_1d(ys, qs)).passed);
  }
}
