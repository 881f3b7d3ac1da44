#include "tightmean/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tightmean/error.hpp"
#include "tightmean/rng.hpp"

namespace tightmean {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DiscreteDistribution::DiscreteDistribution(Eigen::MatrixXd support, Eigen::VectorXd probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  require(support_.rows() >= 1, ErrorCode::InvalidArgument, "distribution dimension must be >= 1");
  require(support_.cols() >= 1, ErrorCode::InvalidArgument, "distribution support is empty");
  require(probs_.size() == support_.cols(), ErrorCode::InvalidArgument,
          "probs and support sizes differ");
  require(support_.allFinite(), ErrorCode::InvalidArgument, "support points must be finite");
  require((probs_.array() >= 0.0).all(), ErrorCode::InvalidArgument, "probs must be nonnegative");
  require(std::abs(probs_.sum() - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "probs must sum to 1 within 1e-12");
}

DiscreteDistribution DiscreteDistribution::point_mass(const Eigen::VectorXd& p) {
  return DiscreteDistribution(p, Eigen::VectorXd::Ones(1));
}

DiscreteDistribution DiscreteDistribution::from_1d(const std::vector<double>& xs,
                                                   const std::vector<double>& ps) {
  require(xs.size() == ps.size(), ErrorCode::InvalidArgument, "xs and ps sizes differ");
  const auto k = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd s(1, k);
  Eigen::VectorXd p(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    s(0, i) = xs[static_cast<std::size_t>(i)];
    p[i] = ps[static_cast<std::size_t>(i)];
  }
  return {s, p};
}

DiscreteDistribution DiscreteDistribution::project(const Eigen::VectorXd& w) const {
  require(w.size() == support_.rows(), ErrorCode::InvalidArgument, "projection dimension mismatch");
  Eigen::MatrixXd s = w.transpose() * support_;
  return {s, probs_};
}

DiscreteDistribution DiscreteDistribution::product(const DiscreteDistribution& a,
                                                   const DiscreteDistribution& b) {
  const Eigen::Index da = a.support_.rows(), db = b.support_.rows();
  Eigen::MatrixXd s(da + db, a.size() * b.size());
  Eigen::VectorXd p(a.size() * b.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j, ++k) {
      s.col(k).head(da) = a.support_.col(i);
      s.col(k).tail(db) = b.support_.col(j);
      p[k] = a.probs_[i] * b.probs_[j];
    }
  }
  // Products of probabilities can drift from summing to exactly 1.
  p /= p.sum();
  return {s, p};
}

DiscreteDistribution distribution_from_json(const nlohmann::json& doc) {
  try {
    const int d = doc.at("dimension").get<int>();
    const auto& support = doc.at("support");
    const auto probs = doc.at("probs").get<std::vector<double>>();
    require(d >= 1, ErrorCode::InvalidSpec, "dimension must be >= 1");
    require(support.size() == probs.size(), ErrorCode::InvalidSpec, "support/probs length mismatch");
    Eigen::MatrixXd s(d, static_cast<Eigen::Index>(probs.size()));
    Eigen::VectorXd p(static_cast<Eigen::Index>(probs.size()));
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const auto pt = support[i].get<std::vector<double>>();
      require(static_cast<int>(pt.size()) == d, ErrorCode::InvalidSpec,
              "support point has wrong dimension");
      for (int r = 0; r < d; ++r) s(r, static_cast<Eigen::Index>(i)) = pt[static_cast<std::size_t>(r)];
      p[static_cast<Eigen::Index>(i)] = probs[i];
    }
    return {s, p};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("bad distribution document: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) fail(ErrorCode::InvalidSpec, e.what());
    throw;
  }
}

nlohmann::json to_json(const DiscreteDistribution& dist) {
  nlohmann::json doc;
  doc["dimension"] = dist.dimension();
  auto support = nlohmann::json::array();
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    std::vector<double> pt(dist.support().col(i).data(),
                           dist.support().col(i).data() + dist.dimension());
    support.push_back(pt);
  }
  doc["support"] = support;
  doc["probs"] = std::vector<double>(dist.probs().data(), dist.probs().data() + dist.size());
  return doc;
}

Moments moments(const DiscreteDistribution& dist) {
  Moments m;
  const auto& s = dist.support();
  const auto& p = dist.probs();
  m.mean = s * p;
  const Eigen::MatrixXd centered = s.colwise() - m.mean;
  m.covariance = centered * p.asDiagonal() * centered.transpose();
  if (dist.dimension() == 1) {
    m.sigma_sq_bound = m.covariance(0, 0);
  } else if (dist.dimension() == 2) {
    const double a = m.covariance(0, 0), b = m.covariance(0, 1), c = m.covariance(1, 1);
    m.sigma_sq_bound = 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.covariance, Eigen::EigenvaluesOnly);
    m.sigma_sq_bound = es.eigenvalues().maxCoeff();
  }
  return m;
}

namespace {

double mean_1d(const DiscreteDistribution& d) {
  require(d.dimension() == 1, ErrorCode::InvalidArgument, "expected a one-dimensional distribution");
  return d.support().row(0).dot(d.probs());
}

}  // namespace

double inlier_moment(const DiscreteDistribution& dist1d, double radius) {
  const double mu = mean_1d(dist1d);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dist1d.size(); ++i) {
    const double y = dist1d.support()(0, i) - mu;
    if (std::abs(y) <= radius) acc += dist1d.probs()[i] * y * y;
  }
  return acc;
}

double outlier_moment(const DiscreteDistribution& dist1d, double radius) {
  const double mu = mean_1d(dist1d);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dist1d.size(); ++i) {
    const double y = dist1d.support()(0, i) - mu;
    if (std::abs(y) >= radius) acc += dist1d.probs()[i] * y * y;
  }
  return acc;
}

bool is_inlier_light(const DiscreteDistribution& dist1d, double beta, double L, double T,
                     double sigma) {
  require(T > 0 && sigma > 0, ErrorCode::InvalidArgument, "T and sigma must be positive");
  return inlier_moment(dist1d, beta * T) < (1.0 - L) * sigma * sigma;
}

namespace {

struct Centered2D {
  Eigen::Matrix2Xd y;
  Eigen::VectorXd p;
};

Centered2D center_2d(const DiscreteDistribution& dist) {
  require(dist.dimension() == 2, ErrorCode::InvalidArgument, "expected a two-dimensional distribution");
  const Eigen::Vector2d mu = dist.support() * dist.probs();
  return {dist.support().colwise() - mu, dist.probs()};
}

double moment_at(const Centered2D& c, double theta, double radius, double slack) {
  const Eigen::Vector2d w(std::cos(theta), std::sin(theta));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < c.y.cols(); ++i) {
    const double t = w.dot(c.y.col(i));
    if (std::abs(t) >= radius * (1.0 - slack)) acc += c.p[i] * t * t;
  }
  return acc;
}

double wrap_pi(double a) {
  a = std::fmod(a, kPi);
  return a < 0 ? a + kPi : a;
}

}  // namespace

double max_directional_outlier_moment_2d(const DiscreteDistribution& dist2d, double radius) {
  require(radius > 0, ErrorCode::InvalidArgument, "radius must be positive");
  const Centered2D c = center_2d(dist2d);

  std::vector<double> crit;
  for (Eigen::Index i = 0; i < c.y.cols(); ++i) {
    const double r = c.y.col(i).norm();
    if (r < radius || c.p[i] == 0.0) continue;
    const double phi = std::atan2(c.y(1, i), c.y(0, i));
    const double half = std::acos(std::min(1.0, radius / r));
    crit.push_back(wrap_pi(phi - half));
    crit.push_back(wrap_pi(phi + half));
  }
  if (crit.empty()) return 0.0;
  std::sort(crit.begin(), crit.end());

  double best = 0.0;
  const std::size_t k = crit.size();
  for (std::size_t a = 0; a < k; ++a) {
    const double lo = crit[a];
    const double hi = a + 1 < k ? crit[a + 1] : crit[0] + kPi;
    // Closed endpoint: atoms exactly on the threshold count (>=).
    best = std::max(best, moment_at(c, lo, radius, 1e-12));
    if (hi - lo <= 0.0) continue;

    const double mid = 0.5 * (lo + hi);
    const Eigen::Vector2d wm(std::cos(mid), std::sin(mid));
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    for (Eigen::Index i = 0; i < c.y.cols(); ++i) {
      if (std::abs(wm.dot(c.y.col(i))) >= radius) m += c.p[i] * c.y.col(i) * c.y.col(i).transpose();
    }
    // On the arc the moment is A + B cos 2t + C sin 2t.
    const double A = 0.5 * (m(0, 0) + m(1, 1));
    const double B = 0.5 * (m(0, 0) - m(1, 1));
    const double C = m(0, 1);
    auto q = [&](double t) { return A + B * std::cos(2 * t) + C * std::sin(2 * t); };
    best = std::max({best, q(lo), q(hi)});
    double star = 0.5 * std::atan2(C, B);
    for (int shift = -2; shift <= 2; ++shift) {
      const double t = star + shift * kPi;
      if (t > lo && t < hi) best = std::max(best, q(t));
    }
  }
  return best;
}

double sampled_directional_outlier_moment_2d(const DiscreteDistribution& dist2d, double radius,
                                             std::size_t directions) {
  const Centered2D c = center_2d(dist2d);
  double best = 0.0;
  for (std::size_t s = 0; s < directions; ++s) {
    const double t = kPi * static_cast<double>(s) / static_cast<double>(directions);
    best = std::max(best, moment_at(c, t, radius, 0.0));
  }
  return best;
}

bool is_outlier_light(const DiscreteDistribution& dist, double beta, double L, double T,
                      double sigma, std::size_t direction_samples) {
  require(T > 0 && sigma > 0, ErrorCode::InvalidArgument, "T and sigma must be positive");
  const double radius = beta * T;
  const double bound = L * sigma * sigma;
  const int d = dist.dimension();
  if (d == 1) return outlier_moment(dist, radius) < bound;
  if (d == 2) return max_directional_outlier_moment_2d(dist, radius) < bound;

  const Eigen::VectorXd mu = dist.support() * dist.probs();
  const Eigen::MatrixXd y = dist.support().colwise() - mu;
  auto moment_along = [&](const Eigen::VectorXd& w) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.cols(); ++i) {
      const double t = w.dot(y.col(i));
      if (std::abs(t) >= radius) acc += dist.probs()[i] * t * t;
    }
    return acc;
  };
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    const double r = y.col(i).norm();
    if (r > 0 && moment_along(y.col(i) / r) >= bound) return false;
  }
  Rng rng(0x0071e5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w(d);
  for (std::size_t s = 0; s < direction_samples; ++s) {
    for (int k = 0; k < d; ++k) w[k] = normal(rng);
    if (moment_along(w.normalized()) >= bound) return false;
  }
  return true;
}

double gaussian_inlier_moment(double s, double radius) {
  if (radius <= 0) return 0.0;
  const double t = radius / s;
  const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi);
  return s * s * (std::erf(t / std::sqrt(2.0)) - 2.0 * t * pdf);
}

double gaussian_outlier_moment(double s, double radius) {
  if (radius <= 0) return s * s;
  const double t = radius / s;
  const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi);
  return s * s * (std::erfc(t / std::sqrt(2.0)) + 2.0 * t * pdf);
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const SamplerSpec& spec) {
  std::visit(overloaded{
                 [](const DiscreteFamily&) {},
                 [](const GaussianFamily& g) {
                   require(g.dim >= 1 && g.sigma >= 0 && std::isfinite(g.mean), ErrorCode::InvalidSpec,
                           "gaussian: need dim >= 1, sigma >= 0");
                 },
                 [](const StudentTFamily& t) {
                   require(t.dim >= 1 && t.dof > 2 && t.scale > 0, ErrorCode::InvalidSpec,
                           "student-t: need dim >= 1, dof > 2 (finite variance), scale > 0");
                 },
                 [](const TwoPointOutlierFamily& f) {
                   require(f.dim >= 1 && f.axis >= 0 && f.axis < f.dim, ErrorCode::InvalidSpec,
                           "two-point: axis must index a coordinate");
                   require(f.M > 0 && f.sigma > 0 && f.outlier_share >= 0 && f.outlier_share <= 1,
                           ErrorCode::InvalidSpec, "two-point: need M, sigma > 0, share in [0,1]");
                   require(f.outlier_share * f.sigma * f.sigma / (f.M * f.M) < 1.0, ErrorCode::InvalidSpec,
                           "two-point: outlier probability would reach 1");
                 },
             },
             spec.family);
}

int dimension(const SamplerSpec& spec) {
  return std::visit(overloaded{
                        [](const DiscreteFamily& f) { return f.dist.dimension(); },
                        [](const auto& f) { return f.dim; },
                    },
                    spec.family);
}

Eigen::VectorXd true_mean(const SamplerSpec& spec) {
  return std::visit(overloaded{
                        [](const DiscreteFamily& f) -> Eigen::VectorXd { return moments(f.dist).mean; },
                        [](const GaussianFamily& g) -> Eigen::VectorXd {
                          return Eigen::VectorXd::Constant(g.dim, g.mean);
                        },
                        [](const auto& f) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(f.dim); },
                    },
                    spec.family);
}

double variance_bound(const SamplerSpec& spec) {
  return std::visit(overloaded{
                        [](const DiscreteFamily& f) { return moments(f.dist).sigma_sq_bound; },
                        [](const GaussianFamily& g) { return g.sigma * g.sigma; },
                        [](const StudentTFamily& t) { return t.scale * t.scale * t.dof / (t.dof - 2.0); },
                        [](const TwoPointOutlierFamily& f) { return f.sigma * f.sigma; },
                    },
                    spec.family);
}

PointSet sample(const SamplerSpec& spec, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidSpec, "sample: n must be >= 1");
  validate(spec);
  const int d = dimension(spec);
  const auto cols = static_cast<Eigen::Index>(n);
  PointSet out(d, cols);
  Rng rng(spec.seed);
  std::visit(overloaded{
                 [&](const DiscreteFamily& f) {
                   const auto& p = f.dist.probs();
                   std::discrete_distribution<Eigen::Index> pick(p.data(), p.data() + p.size());
                   for (Eigen::Index i = 0; i < cols; ++i) out.col(i) = f.dist.support().col(pick(rng));
                 },
                 [&](const GaussianFamily& g) {
                   std::normal_distribution<double> normal(g.mean, g.sigma);
                   for (Eigen::Index i = 0; i < cols; ++i) {
                     for (int k = 0; k < d; ++k) out(k, i) = normal(rng);
                   }
                 },
                 [&](const StudentTFamily& t) {
                   std::student_t_distribution<double> student(t.dof);
                   for (Eigen::Index i = 0; i < cols; ++i) {
                     for (int k = 0; k < d; ++k) out(k, i) = t.scale * student(rng);
                   }
                 },
                 [&](const TwoPointOutlierFamily& f) {
                   const double q = f.outlier_share * f.sigma * f.sigma / (f.M * f.M);
                   const double core = std::sqrt((1.0 - f.outlier_share) * f.sigma * f.sigma / (1.0 - q));
                   std::uniform_real_distribution<double> unit(0.0, 1.0);
                   std::normal_distribution<double> normal(0.0, 1.0);
                   for (Eigen::Index i = 0; i < cols; ++i) {
                     for (int k = 0; k < d; ++k) {
                       if (k != f.axis) {
                         out(k, i) = f.sigma * normal(rng);
                         continue;
                       }
                       const double u = unit(rng);
                       if (u < q) {
                         out(k, i) = u < 0.5 * q ? -f.M : f.M;
                       } else {
                         out(k, i) = core * normal(rng);
                       }
                     }
                   }
                 },
             },
             spec.family);
  return out;
}

double threshold_scale(double sigma, std::size_t n, double delta) {
  require(sigma > 0 && n >= 1 && delta > 0 && delta < 1, ErrorCode::InvalidArgument,
          "threshold_scale: need sigma > 0, n >= 1, delta in (0,1)");
  return sigma * std::sqrt(static_cast<double>(n) / (2.0 * std::log(2.0 / delta)));
}

DiscreteDistribution make_inlier_light_instance(double beta, double L, std::size_t n, double delta,
                                                double sigma, double c) {
  require(beta > 0 && beta < 1 && L > 0 && L < 1, ErrorCode::InvalidArgument,
          "make_inlier_light_instance: beta and L must lie in (0,1)");
  require(c > beta && c < 1, ErrorCode::InvalidArgument,
          "make_inlier_light_instance: c must lie in (beta, 1) so the far atoms are outliers");
  const double T = threshold_scale(sigma, n, delta);
  const double far = c * T;
  const double p = 0.75 * sigma * sigma / (far * far);
  require(p < 1.0, ErrorCode::Infeasible, "far-atom probability would reach 1");
  const double near = sigma * std::sqrt(0.25 / (1.0 - p));
  require(near <= beta * T, ErrorCode::Infeasible, "near pair would not sit within beta T");
  require(2.0 * L < 0.75, ErrorCode::Infeasible, "inlier share 0.25 leaves no 2L margin");

  const auto e1 = DiscreteDistribution::from_1d({-far, -near, near, far},
                                                {0.5 * p, 0.5 * (1 - p), 0.5 * (1 - p), 0.5 * p});
  const auto e2 = DiscreteDistribution::from_1d({-sigma, sigma}, {0.5, 0.5});
  require(is_inlier_light(e1, beta, 2.0 * L, T, sigma), ErrorCode::Infeasible,
          "construction failed its own inlier-light check");
  return DiscreteDistribution::product(e1, e2);
}

}  // namespace tightmean
