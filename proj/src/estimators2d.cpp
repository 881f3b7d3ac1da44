#include "tightmean/estimators2d.hpp"

#include <algorithm>
#include <cmath>

#include "tightmean/error.hpp"
#include "tightmean/estimators1d.hpp"

namespace tightmean {

namespace {

double rate(double sigma, double delta, double n) {
  return sigma * std::sqrt(2.0 * std::log(2.0 / delta) / n);
}

std::size_t share(double xi, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(xi * static_cast<double>(n)));
}

// <u, x_i> for every column, written into `out`.
void project_into(const PointSet& samples, const Point2& u, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index i = 0; i < samples.cols(); ++i)
    out[static_cast<std::size_t>(i)] = u.x() * samples(0, i) + u.y() * samples(1, i);
}

}  // namespace

const char* to_string(EstimatorPath p) {
  return p == EstimatorPath::InlierLight ? "inlier-light" : "outlier-light";
}

double default_tau(const PsiFunction& psi, double beta, double L) {
  const double eta = compute_eta(psi, beta / 32.0);
  return std::min(eta * (L / 32.0) / 8.0, kMaxTau);
}

Estimator2DConfig Estimator2DConfig::make(double delta, double sigma, PsiFunction psi, double beta,
                                          double L, double xi, double tau, std::size_t net_cap) {
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  require(xi > 0 && xi < 1, ErrorCode::InvalidArgument, "xi must lie in (0,1)");
  Estimator2DConfig cfg;
  cfg.beta = beta;
  cfg.L = L;
  cfg.xi = xi;
  cfg.delta = delta;
  cfg.sigma = sigma;
  cfg.psi = std::move(psi);
  cfg.net = build_rho_net(std::pow(delta, xi), net_cap);
  if (beta > 0 && beta < 1.0 / 32.0 && tau < 0) tau = default_tau(cfg.psi, beta, L);
  cfg.tau = tau;
  cfg.alpha_inlier = 1.0 - tau;
  cfg.alpha_default = 1.0 + xi;
  cfg.validate();
  return cfg;
}

void Estimator2DConfig::validate() const {
  require(beta > 0 && beta < 1.0 / 32.0, ErrorCode::InvalidArgument, "need 0 < beta < 1/32");
  require(L > 32.0 * beta && L < 1.0, ErrorCode::InvalidArgument, "need 32 beta < L < 1");
  require(xi > 0 && xi < 1, ErrorCode::InvalidArgument, "xi must lie in (0,1)");
  require(tau > 0 && tau < 1, ErrorCode::InvalidArgument, "tau must lie in (0,1)");
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  require(sigma > 0, ErrorCode::InvalidArgument, "sigma must be positive");
  require(net.size() > 0, ErrorCode::InvalidArgument, "empty direction net");
  require(alpha_inlier < 1.0 && 1.0 < alpha_default, ErrorCode::InvalidArgument,
          "need alpha_inlier < 1 < alpha_default");
}

StripSolution solve_strips(const std::vector<ConfidenceStrip>& strips) {
  StripSolution sol;
  const ConvexRegion region = intersect_strips(strips);
  if (!region.empty) {
    const Ball b = meb_of_region(region);
    sol.center = b.center;
    sol.region_radius = b.radius;
  } else {
    sol.center = min_violation_point(strips);
    sol.fallback_used = true;
  }
  return sol;
}

Estimate2D inlier_light_estimator_2d(const PointSet& samples, const std::vector<double>& inits,
                                     const Estimator2DConfig& cfg) {
  require(samples.rows() == 2, ErrorCode::InvalidArgument, "expected 2 x n samples");
  require(samples.cols() > 0, ErrorCode::EmptyInput, "no samples");
  require(inits.size() == cfg.net.size(), ErrorCode::InvalidArgument,
          "need one initial estimate per net direction");
  const auto n = static_cast<std::size_t>(samples.cols());
  const double per_direction = cfg.delta / (4.0 * static_cast<double>(cfg.net.size()));
  const auto params = CatoniParams::for_samples(cfg.sigma, per_direction, n);
  const double base_width = rate(cfg.sigma, cfg.delta, static_cast<double>(n));

  Estimate2D est;
  est.path = EstimatorPath::InlierLight;
  est.strips.reserve(cfg.net.size());
  std::vector<ConfidenceStrip> strips;
  strips.reserve(cfg.net.size());
  std::vector<double> proj;
  for (std::size_t k = 0; k < cfg.net.size(); ++k) {
    const Point2& u = cfg.net.vectors[k];
    project_into(samples, u, proj);
    const LightnessVerdict v =
        test_lightness_1d(proj, inits[k], params.T(), cfg.beta / 32.0, cfg.L / 32.0, cfg.sigma);
    const Estimate1D e = catoni_local(proj, inits[k], cfg.psi, params);

    StripRecord rec;
    rec.direction = u;
    rec.init = inits[k];
    rec.estimate = e.value;
    rec.lightness = v.label;
    rec.statistic = v.statistic;
    rec.alpha = v.label == Lightness::InlierLight ? cfg.alpha_inlier : cfg.alpha_default;
    rec.half_width = rec.alpha * base_width;
    rec.budget = 2.0 * per_direction;
    strips.push_back({u, rec.estimate, rec.half_width});
    est.strips.push_back(rec);
  }

  const StripSolution sol = solve_strips(strips);
  est.value = sol.center;
  est.fallback_used = sol.fallback_used;
  est.budget.path = 2.0 * per_direction * static_cast<double>(cfg.net.size());
  est.claimed_radius = (1.0 - cfg.tau) * jung_constant(2) * base_width;
  return est;
}

Estimate2D outlier_light_estimator_2d(const PointSet& samples, double mu0_e1, double mu0_e2,
                                      double beta, double T, bool divide_by_survivors) {
  require(samples.rows() == 2, ErrorCode::InvalidArgument, "expected 2 x n samples");
  require(samples.cols() > 0, ErrorCode::EmptyInput, "no samples");
  require(beta > 0 && T > 0, ErrorCode::InvalidArgument, "beta and T must be positive");
  const double cut = std::sqrt(beta) * T;
  Point2 sum = Point2::Zero();
  std::size_t kept = 0;
  for (Eigen::Index i = 0; i < samples.cols(); ++i) {
    if (std::abs(samples(0, i) - mu0_e1) > cut || std::abs(samples(1, i) - mu0_e2) > cut) continue;
    sum += samples.col(i);
    ++kept;
  }
  Estimate2D est;
  est.path = EstimatorPath::OutlierLight;
  est.trimmed = static_cast<std::size_t>(samples.cols()) - kept;
  est.no_survivors = kept == 0;
  const double denom = divide_by_survivors ? static_cast<double>(std::max<std::size_t>(kept, 1))
                                           : static_cast<double>(samples.cols());
  est.value = sum / denom;
  return est;
}

std::size_t heavy_2d_min_samples(double delta, double xi) { return catoni_min_samples(delta, xi); }

namespace {

struct Split {
  std::size_t n = 0;
  std::size_t m = 0;
};

Split checked_split(const PointSet& samples, const Estimator2DConfig& cfg) {
  cfg.validate();
  require(samples.rows() == 2, ErrorCode::InvalidArgument, "expected 2 x n samples");
  const auto n = static_cast<std::size_t>(samples.cols());
  const std::size_t m = share(cfg.xi, n);
  require(n >= heavy_2d_min_samples(cfg.delta, cfg.xi) && n > 2 * m, ErrorCode::TooFewSamples,
          "heavy_tailed_estimator_2d: too few samples");
  return {n, m};
}

double mom_budget(const Estimator2DConfig& cfg) {
  return cfg.delta / (4.0 * static_cast<double>(cfg.net.size() + 2));
}

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

DispatchTest dispatch_test(const PointSet& samples, const Estimator2DConfig& cfg, const Split& s) {
  DispatchTest out;
  std::vector<double> proj;
  const PointSet first = samples.middleCols(0, idx(s.m));
  for (int j = 0; j < 2; ++j) {
    project_into(first, j == 0 ? Point2::UnitX() : Point2::UnitY(), proj);
    out.mu0[j] = median_of_means(proj, mom_budget(cfg));
  }
  const auto rest = samples.middleCols(idx(2 * s.m), idx(s.n - 2 * s.m));
  out.n_tested = static_cast<std::size_t>(rest.cols());
  out.delta = cfg.delta / 4.0;
  out.T = cfg.sigma * std::sqrt(static_cast<double>(out.n_tested) / (2.0 * std::log(4.0 / out.delta)));
  out.verdict = test_lightness_2d(rest, out.mu0[0], out.mu0[1], out.T, cfg.beta, cfg.L, cfg.sigma);
  return out;
}

}  // namespace

DispatchTest run_dispatch_test(const PointSet& samples, const Estimator2DConfig& cfg) {
  return dispatch_test(samples, cfg, checked_split(samples, cfg));
}

Estimate2D heavy_tailed_estimator_2d(const PointSet& samples, const Estimator2DConfig& cfg) {
  const Split s = checked_split(samples, cfg);
  const DispatchTest test = dispatch_test(samples, cfg, s);
  const std::size_t U = cfg.net.size();
  const double mom_delta = mom_budget(cfg);

  std::vector<double> proj;
  const PointSet second = samples.middleCols(idx(s.m), idx(s.m));
  std::vector<double> inits(U);
  for (std::size_t k = 0; k < U; ++k) {
    project_into(second, cfg.net.vectors[k], proj);
    inits[k] = median_of_means(proj, mom_delta);
  }

  const PointSet rest = samples.middleCols(idx(2 * s.m), idx(s.n - 2 * s.m));
  Estimate2D est;
  if (test.verdict.is_direction()) {
    Estimator2DConfig inner = cfg;
    inner.delta = cfg.delta / 8.0;
    est = inlier_light_estimator_2d(rest, inits, inner);
  } else {
    const double outlier_delta = cfg.delta / 4.0;
    const double T = cfg.sigma * std::sqrt(static_cast<double>(rest.cols()) /
                                           (2.0 * std::log(2.0 / outlier_delta)));
    est = outlier_light_estimator_2d(rest, test.mu0[0], test.mu0[1], cfg.beta, T,
                                     cfg.divide_by_survivors);
    est.budget.path = outlier_delta;
  }
  est.verdict = test.verdict;
  est.budget.mom_axes = 2.0 * mom_delta;
  est.budget.mom_net = static_cast<double>(U) * mom_delta;
  est.budget.tester = test.delta;
  est.claimed_radius =
      (1.0 - cfg.tau) * jung_constant(2) * rate(cfg.sigma, cfg.delta, static_cast<double>(s.n));
  return est;
}

}  // namespace tightmean
