#pragma once

#include <span>
#include <vector>

#include "tightmean/distributions.hpp"
#include "tightmean/geometry.hpp"

namespace tightmean {

enum class Lightness { InlierLight, OutlierLight };

const char* to_string(Lightness l);

struct LightnessVerdict {
  Lightness label = Lightness::OutlierLight;
  double statistic = 0.0;  // B
  double threshold = 0.0;  // (1 - 2L) sigma^2
};

/// B = (1/n) sum (x_i - mu0)^2 1{|x_i - mu0| <= 2 beta T}; InlierLight iff B <= (1 - 2L) sigma^2.
LightnessVerdict test_lightness_1d(std::span<const double> samples, double mu0, double T,
                                   double beta, double L, double sigma);

struct Verdict2D {
  enum class Outcome { Direction, Bottom };
  Outcome outcome = Outcome::Bottom;
  int axis = -1;  // 0 for e1, 1 for e2; -1 for Bottom
  LightnessVerdict per_axis[2];

  bool is_direction() const noexcept { return outcome == Outcome::Direction; }
};

/// Runs the 1-D test on both coordinates; the first inlier-light axis wins.
Verdict2D test_lightness_2d(const PointSet& samples, double mu0_e1, double mu0_e2, double T,
                            double beta, double L, double sigma);

/// If <v_j, x> is (beta, L)-outlier-light for both j, is x (4 beta, 4 L)-outlier-light
/// in every direction? Returns true when the implication holds (or is vacuous).
/// Throws HypothesisViolated unless |<v1, v2>| <= 3/4.
bool lift_outlier_lightness_check(const DiscreteDistribution& dist, const Point2& v1,
                                  const Point2& v2, double beta, double L, double T, double sigma);

/// If <e_axis, x> is (beta, L)-inlier-light, is some <v_j, x> (beta/8, L/8)-inlier-light?
/// Requires pairwise |<v_j, v_k>| <= 3/4.
bool triangle_inlier_lightness_check(const DiscreteDistribution& dist, int axis,
                                     const std::vector<Point2>& directions, double beta, double L,
                                     double T, double sigma);

}  // namespace tightmean
