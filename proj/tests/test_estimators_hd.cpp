#include <cmath>
#include <random>

#include "doctest.h"
#include "tightmean/distributions.hpp"
#include "tightmean/error.hpp"
#include "tightmean/estimators_hd.hpp"

using namespace tightmean;

TEST_CASE("frame projection") {
  Frame f{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)};
  CHECK((project_to_frame(f.v1, f) - Point2(1, 0)).norm() == 0.0);
  CHECK(project_to_frame(Eigen::Vector3d(0, 0, 5), f).norm() == 0.0);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g(0, 1);
  const SubspaceNet net = build_subspace_net(4, 0.3, kDefaultSubspaceCap, 2);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(4);
    for (int k = 0; k < 4; ++k) x(k) = g(gen);
    const Frame& fr = net.pairs[static_cast<std::size_t>(t) % net.size()];
    CHECK(project_to_frame(x, fr).squaredNorm() + std::pow(residual_norm(x, fr), 2) ==
          doctest::Approx(x.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("cylinder violation and descent") {
  std::vector<CylinderConstraint> cyl;
  cyl.push_back({Frame{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)}, Point2(1, 0), 0.5});
  cyl.push_back({Frame{Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)}, Point2(0, 0), 0.5});
  CHECK(cylinder_violation(cyl, Eigen::Vector3d(1, 0, 0)) == doctest::Approx(-0.5));
  CHECK(cylinder_violation(cyl, Eigen::Vector3d(0, 0, 0)) == doctest::Approx(0.5));
  std::size_t iters = 0;
  const Eigen::VectorXd w = minimize_cylinder_violation(cyl, Eigen::Vector3d(-3, 2, 1), 1.0, &iters);
  CHECK(cylinder_violation(cyl, w) <= -0.5 + 1e-3);
  CHECK(iters > 0);
}

TEST_CASE("sample requirement") {
  CHECK(hd_min_samples(3, 0.05) == 4800);
  CHECK(hd_min_samples(2, 1e-40) == static_cast<std::size_t>(std::ceil(40 * std::log(1e40))));
  try {
    hd_estimator(PointSet::Zero(3, 1000), 0.05, 1.0);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
}

TEST_CASE("two dimensions reduce to the planar estimator") {
  const PointSet x = sample(SamplerSpec{GaussianFamily{1.0, 1.0, 2}, 4}, 20000);
  const HdEstimate h = hd_estimator(x, 0.05, 1.0);
  const Estimate2D e = heavy_tailed_estimator_2d(x, Estimator2DConfig::make(0.05, 1.0));
  CHECK(h.value(0) == e.value(0));
  CHECK(h.value(1) == e.value(1));
  CHECK(h.diagnostics.frames == 1);
}

TEST_CASE("constant data in three dimensions") {
  const Eigen::Vector3d p(1, -2, 0.5);
  const PointSet x = PointSet::Zero(3, 6000).colwise() + Eigen::VectorXd(p);
  const HdEstimate h = hd_estimator(x, 0.05, 1.0);
  CHECK((h.value - p).norm() < 1e-3 * h.diagnostics.cylinder_radius);
  CHECK(h.diagnostics.feasible);
  CHECK(h.diagnostics.objective == doctest::Approx(-h.diagnostics.cylinder_radius).epsilon(1e-3));
}

TEST_CASE("gaussian in three dimensions") {
  const double delta = 0.05;
  const std::size_t n = 20000;
  const PointSet x = sample(SamplerSpec{GaussianFamily{0.0, 1.0, 3}, 5}, n);
  const HdEstimate h = hd_estimator(x, delta, 1.0);
  const auto& d = h.diagnostics;
  CHECK(d.frames == h.cylinders.size());
  CHECK(d.feasible);
  CHECK(d.objective <= d.tolerance);
  for (const auto& c : h.cylinders) CHECK((project_to_frame(h.value, c.frame) - c.center).norm() <= c.radius + d.tolerance);
  // The worst per-frame residual lifts to the claimed radius.
  CHECK(d.max_frame_residual * jung_constant(3) / jung_constant(2) <=
        d.claimed_radius + d.tolerance * jung_constant(3) / jung_constant(2));
  CHECK(h.value.norm() <= 1.1 * jung_constant(3) * std::sqrt(2 * std::log(2 / delta) / n));
}
