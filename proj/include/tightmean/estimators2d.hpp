#pragma once

#include <cstddef>
#include <vector>

#include "tightmean/geometry.hpp"
#include "tightmean/lightness.hpp"
#include "tightmean/psi.hpp"

namespace tightmean {

// beta < 1/32 and L > 32 beta are needed, and the tester threshold 1 - 2L must
// stay positive, so L sits in (32 beta, 1/2).
inline constexpr double kDefaultBeta = 1.0 / 96.0;
inline constexpr double kDefaultL = 0.35;
inline constexpr double kDefaultXi = 0.05;
inline constexpr double kMaxTau = 0.05;

struct Estimator2DConfig {
  double beta = kDefaultBeta;
  double L = kDefaultL;
  double xi = kDefaultXi;
  double tau = 0.0;
  double delta = 0.01;
  double sigma = 1.0;
  DirectionNet net;
  PsiFunction psi = PsiFunction{};
  double alpha_inlier = 1.0;
  double alpha_default = 1.0;
  /// Trimmed mean divides by the survivor count instead of the sample count.
  bool divide_by_survivors = false;

  /// Fills the net (rho = delta^xi), tau (from the improved-rate slack unless
  /// given), alpha_inlier = 1 - tau and alpha_default = 1 + xi, then validates.
  static Estimator2DConfig make(double delta, double sigma, PsiFunction psi = PsiFunction{},
                                double beta = kDefaultBeta, double L = kDefaultL,
                                double xi = kDefaultXi, double tau = -1.0,
                                std::size_t net_cap = kDefaultDirectionCap);

  void validate() const;
};

/// min(eta(psi, beta/32) * (L/32) / 8, kMaxTau)
double default_tau(const PsiFunction& psi, double beta, double L);

enum class EstimatorPath { InlierLight, OutlierLight };

const char* to_string(EstimatorPath p);

struct StripRecord {
  Point2 direction;
  double init = 0.0;
  double estimate = 0.0;
  double alpha = 1.0;
  Lightness lightness = Lightness::OutlierLight;
  double statistic = 0.0;
  double half_width = 0.0;
  double budget = 0.0;  // failure probability spent on this direction
};

struct BudgetLedger {
  double mom_axes = 0.0;
  double mom_net = 0.0;
  double tester = 0.0;
  double path = 0.0;

  double total() const noexcept { return mom_axes + mom_net + tester + path; }
};

struct Estimate2D {
  Point2 value = Point2::Zero();
  double claimed_radius = 0.0;
  EstimatorPath path = EstimatorPath::OutlierLight;
  std::vector<StripRecord> strips;
  bool fallback_used = false;  // strip intersection was empty
  std::size_t trimmed = 0;
  bool no_survivors = false;
  Verdict2D verdict;
  BudgetLedger budget;
};

struct StripSolution {
  Point2 center = Point2::Zero();
  double region_radius = 0.0;
  bool fallback_used = false;
};

/// MEB center of the strip intersection, or the min-violation point if empty.
StripSolution solve_strips(const std::vector<ConfidenceStrip>& strips);

/// Runs at cfg.delta on all of `samples`; inits[i] belongs to cfg.net.vectors[i].
Estimate2D inlier_light_estimator_2d(const PointSet& samples, const std::vector<double>& inits,
                                     const Estimator2DConfig& cfg);

/// Drops points with |x_j - mu0_j| > sqrt(beta) T on either axis and divides
/// the survivors' sum by the full sample count.
Estimate2D outlier_light_estimator_2d(const PointSet& samples, double mu0_e1, double mu0_e2,
                                      double beta, double T, bool divide_by_survivors = false);

/// The dispatch step of heavy_tailed_estimator_2d on its own: median-of-means
/// axis inits from the first ceil(xi n) samples, the 2-D lightness test on the
/// samples after the first 2 ceil(xi n).
struct DispatchTest {
  double mu0[2] = {0.0, 0.0};
  double T = 0.0;
  double delta = 0.0;  // tester budget
  std::size_t n_tested = 0;
  Verdict2D verdict;
};

DispatchTest run_dispatch_test(const PointSet& samples, const Estimator2DConfig& cfg);

Estimate2D heavy_tailed_estimator_2d(const PointSet& samples, const Estimator2DConfig& cfg);

/// Smallest n heavy_tailed_estimator_2d accepts.
std::size_t heavy_2d_min_samples(double delta, double xi);

}  // namespace tightmean
