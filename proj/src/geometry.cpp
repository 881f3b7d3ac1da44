#include "tightmean/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <random>

#include "tightmean/error.hpp"
#include "tightmean/rng.hpp"

namespace tightmean {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DirectionNet build_rho_net(double rho, std::size_t cap) {
  require(rho > 0 && std::isfinite(rho), ErrorCode::InvalidArgument, "InvalidRho: rho must be > 0");
  require(cap >= 1, ErrorCode::InvalidArgument, "direction cap must be >= 1");
  const double wanted = std::ceil(2.0 * kPi / rho);
  std::size_t m = wanted >= static_cast<double>(cap) ? cap : static_cast<std::size_t>(wanted);
  m = std::max<std::size_t>(m, 1);

  DirectionNet net;
  net.rho_requested = rho;
  net.capped = static_cast<double>(m) < wanted;
  net.rho_effective = m == 1 ? 2.0 : 2.0 * std::sin(kPi / (2.0 * static_cast<double>(m)));
  net.vectors.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
    net.vectors.emplace_back(std::cos(a), std::sin(a));
  }
  return net;
}

double residual_norm(const Eigen::VectorXd& x, const Frame& frame) {
  const double a = frame.v1.dot(x);
  const double b = frame.v2.dot(x);
  return std::sqrt(std::max(0.0, x.squaredNorm() - a * a - b * b));
}

namespace {

Eigen::VectorXd orthogonal_completion(const Eigen::VectorXd& z) {
  const auto d = z.size();
  Eigen::Index least = 0;
  for (Eigen::Index k = 1; k < d; ++k) {
    if (std::abs(z[k]) < std::abs(z[least])) least = k;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Unit(d, least);
  w -= w.dot(z) * z;
  w.normalize();
  // one more pass keeps orthogonality at the 1e-16 level
  w -= w.dot(z) * z;
  return w.normalized();
}

}  // namespace

SubspaceNet build_subspace_net(int d, double zeta, std::size_t cap, std::uint64_t seed) {
  require(d >= 2, ErrorCode::InvalidArgument, "subspace net needs d >= 2");
  require(zeta > 0 && zeta < 1, ErrorCode::InvalidArgument, "InvalidZeta: zeta must lie in (0,1)");
  SubspaceNet net;
  net.dimension = d;
  net.zeta = zeta;
  if (d == 2) {
    net.pairs.push_back({Eigen::Vector2d::UnitX(), Eigen::Vector2d::UnitY()});
    return net;
  }

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> kept;
  std::size_t rejections = 0;
  while (kept.empty() || rejections < 10 * kept.size()) {
    Eigen::VectorXd z(d);
    for (int k = 0; k < d; ++k) z[k] = normal(rng);
    const double norm = z.norm();
    if (norm == 0.0) continue;
    z /= norm;
    // A plane through z also contains -z, so packing is done up to sign.
    bool covered = false;
    for (const auto& q : kept) {
      const double c = std::abs(q.dot(z));
      if (2.0 - 2.0 * c <= zeta * zeta) {
        covered = true;
        break;
      }
    }
    if (covered) {
      ++rejections;
      continue;
    }
    kept.push_back(z);
    rejections = 0;
    if (kept.size() > cap) {
      fail(ErrorCode::NetTooLarge, "subspace net exceeds cap of " + std::to_string(cap) +
                                       " pairs (size grows like (1/zeta)^O(d))");
    }
  }
  net.pairs.reserve(kept.size());
  for (const auto& z : kept) net.pairs.push_back({z, orthogonal_completion(z)});
  return net;
}

double max_strip_violation(const std::vector<ConfidenceStrip>& strips, const Point2& w) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : strips) {
    worst = std::max(worst, std::abs(s.direction.dot(w) - s.center) - s.half_width);
  }
  return worst;
}

namespace {

double bounding_half_size(const std::vector<ConfidenceStrip>& strips) {
  double extent = 0.0;
  for (const auto& s : strips) extent = std::max(extent, std::abs(s.center) + s.half_width);
  return 1e3 * extent + 1.0;
}

// Keeps the part of `poly` with <n, w> <= b.
std::vector<Point2> clip(const std::vector<Point2>& poly, const Point2& n, double b) {
  std::vector<Point2> out;
  if (poly.empty()) return out;
  const double eps = 1e-12 * (std::abs(b) + 1.0);
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % poly.size()];
    const double fp = n.dot(p) - b;
    const double fq = n.dot(q) - b;
    const bool in_p = fp <= eps;
    const bool in_q = fq <= eps;
    if (in_p && in_q) {
      out.push_back(q);
    } else if (in_p != in_q) {
      const double t = fp / (fp - fq);
      out.push_back(p + t * (q - p));
      if (in_q) out.push_back(q);
    }
  }
  return out;
}

}  // namespace

ConvexRegion intersect_strips(const std::vector<ConfidenceStrip>& strips) {
  require(!strips.empty(), ErrorCode::InvalidArgument, "intersect_strips needs at least one strip");
  const double box = bounding_half_size(strips);
  std::vector<Point2> poly = {{-box, -box}, {box, -box}, {box, box}, {-box, box}};
  for (const auto& s : strips) {
    poly = clip(poly, s.direction, s.center + s.half_width);
    poly = clip(poly, -s.direction, s.half_width - s.center);
    if (poly.empty()) break;
  }
  ConvexRegion region;
  const double merge = 1e-13 * box;
  for (const auto& p : poly) {
    if (region.vertices.empty() || (p - region.vertices.back()).norm() > merge) {
      region.vertices.push_back(p);
    }
  }
  while (region.vertices.size() > 1 &&
         (region.vertices.front() - region.vertices.back()).norm() <= merge) {
    region.vertices.pop_back();
  }
  region.empty = region.vertices.empty();
  return region;
}

namespace {

template <typename F>
double golden_min(F&& f, double lo, double hi, double* arg) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-13 * (std::abs(a) + std::abs(b) + 1e-300); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  *arg = 0.5 * (a + b);
  return f(*arg);
}

}  // namespace

Point2 min_violation_point(const std::vector<ConfidenceStrip>& strips) {
  require(!strips.empty(), ErrorCode::InvalidArgument, "min_violation_point needs strips");
  const double box = bounding_half_size(strips) / 1e3;
  auto inner = [&](double x) {
    double y = 0.0;
    return golden_min([&](double yy) { return max_strip_violation(strips, Point2(x, yy)); }, -box,
                      box, &y);
  };
  double x = 0.0;
  golden_min(inner, -box, box, &x);
  double y = 0.0;
  golden_min([&](double yy) { return max_strip_violation(strips, Point2(x, yy)); }, -box, box, &y);
  return {x, y};
}

namespace {

class MebSolver {
 public:
  explicit MebSolver(const PointSet& pts) : pts_(pts), dim_(static_cast<int>(pts.rows())) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(pts.cols()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 shuffle_rng(0x5eed);
    std::shuffle(idx.begin(), idx.end(), shuffle_rng);
    order_.assign(idx.begin(), idx.end());
  }

  Ball solve() {
    for (int attempt = 0; attempt < 16; ++attempt) {
      support_.clear();
      center_ = Eigen::VectorXd::Zero(dim_);
      radius2_ = -1.0;
      mtf(order_.end());

      const double r = std::sqrt(std::max(radius2_, 0.0));
      auto worst = order_.end();
      double worst_dist = r;
      for (auto it = order_.begin(); it != order_.end(); ++it) {
        const double dist = (pts_.col(*it) - center_).norm();
        if (dist > worst_dist) {
          worst_dist = dist;
          worst = it;
        }
      }
      if (worst == order_.end() || worst_dist <= r * (1.0 + 1e-12) + 1e-15) {
        return {center_, r};
      }
      order_.splice(order_.begin(), order_, worst);
      if (attempt == 15) return {center_, worst_dist};
    }
    return {center_, std::sqrt(std::max(radius2_, 0.0))};
  }

 private:
  using Iter = std::list<Eigen::Index>::iterator;

  double excess(Eigen::Index i) const {
    if (radius2_ < 0) return 1.0;
    return (pts_.col(i) - center_).squaredNorm() - radius2_ * (1.0 + 1e-12);
  }

  void mtf(Iter end) {
    if (static_cast<int>(support_.size()) == dim_ + 1) return;
    for (Iter k = order_.begin(); k != end;) {
      Iter j = k++;
      if (excess(*j) > 0 && push(*j)) {
        mtf(j);
        support_.pop_back();
        order_.splice(order_.begin(), order_, j);
      }
    }
  }

  // Smallest ball with support_ + {i} on its boundary; false if the new
  // point is affinely dependent on the current support.
  bool push(Eigen::Index i) {
    if (support_.empty()) {
      support_.push_back(i);
      center_ = pts_.col(i);
      radius2_ = 0.0;
      return true;
    }
    const Eigen::VectorXd q0 = pts_.col(support_.front());
    const auto m = static_cast<Eigen::Index>(support_.size());
    Eigen::MatrixXd q(dim_, m);
    for (Eigen::Index k = 1; k < m; ++k) q.col(k - 1) = pts_.col(support_[k]) - q0;
    q.col(m - 1) = pts_.col(i) - q0;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(q);
    qr.setThreshold(1e-10);
    if (qr.rank() < m) return false;

    const Eigen::MatrixXd gram = q.transpose() * q;
    const Eigen::VectorXd rhs = 0.5 * gram.diagonal();
    const Eigen::VectorXd lambda = gram.ldlt().solve(rhs);
    center_ = q0 + q * lambda;
    radius2_ = (center_ - q0).squaredNorm();
    support_.push_back(i);
    return true;
  }

  const PointSet& pts_;
  int dim_;
  std::list<Eigen::Index> order_;
  std::vector<Eigen::Index> support_;
  Eigen::VectorXd center_;
  double radius2_ = -1.0;
};

}  // namespace

Ball min_enclosing_ball(const PointSet& points) {
  require(points.cols() > 0, ErrorCode::EmptyInput, "min_enclosing_ball: empty input");
  require(points.rows() > 0, ErrorCode::InvalidArgument, "min_enclosing_ball: zero dimension");
  return MebSolver(points).solve();
}

Ball meb_of_region(const ConvexRegion& region) {
  require(!region.empty && !region.vertices.empty(), ErrorCode::EmptyRegion,
          "meb_of_region: region is empty");
  PointSet pts(2, static_cast<Eigen::Index>(region.vertices.size()));
  for (std::size_t k = 0; k < region.vertices.size(); ++k) {
    pts.col(static_cast<Eigen::Index>(k)) = region.vertices[k];
  }
  return min_enclosing_ball(pts);
}

double diameter(const PointSet& points) {
  double best = 0.0;
  for (Eigen::Index a = 0; a < points.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < points.cols(); ++b) {
      best = std::max(best, (points.col(a) - points.col(b)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double jung_constant(int d) {
  require(d >= 1, ErrorCode::InvalidArgument, "InvalidDimension: d must be >= 1");
  const double dd = static_cast<double>(d);
  return std::sqrt(2.0 * dd / (dd + 1.0));
}

bool check_jung_inequality(const PointSet& points, int d) {
  require(points.cols() >= 2, ErrorCode::InvalidArgument, "Jung check needs at least two points");
  const double r = min_enclosing_ball(points).radius;
  const double dd = static_cast<double>(d);
  return r <= diameter(points) * std::sqrt(dd / (2.0 * (dd + 1.0))) + 1e-9;
}

namespace {

Eigen::MatrixXd random_frame(int d, int k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(d, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < d; ++r) g(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
}

double max_projected_radius(const PointSet& points, int k, std::size_t samples, Rng& rng) {
  const int d = static_cast<int>(points.rows());
  if (k == d) return min_enclosing_ball(points).radius;
  double best = 0.0;
  if (d == 2 && k == 1) {
    for (std::size_t s = 0; s < samples; ++s) {
      const double a = kPi * static_cast<double>(s) / static_cast<double>(samples);
      const Eigen::RowVectorXd proj = Eigen::Vector2d(std::cos(a), std::sin(a)).transpose() * points;
      best = std::max(best, 0.5 * (proj.maxCoeff() - proj.minCoeff()));
    }
    return best;
  }
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::MatrixXd frame = random_frame(d, k, rng);
    best = std::max(best, min_enclosing_ball(frame.transpose() * points).radius);
  }
  return best;
}

}  // namespace

GeneralizedJungReport check_generalized_jung(const PointSet& points, int i, int j,
                                             std::size_t projection_samples, std::uint64_t seed) {
  const int d = static_cast<int>(points.rows());
  require(1 <= j && j <= i && i <= d, ErrorCode::InvalidArgument,
          "InvalidDims: need 1 <= j <= i <= d");
  require(points.cols() >= 1, ErrorCode::EmptyInput, "generalized Jung: empty input");
  require(projection_samples >= 1, ErrorCode::InvalidArgument, "need at least one projection");

  Rng rng(seed);
  GeneralizedJungReport rep;
  rep.i = i;
  rep.j = j;
  rep.factor = std::sqrt(static_cast<double>(i) * (j + 1) / (static_cast<double>(j) * (i + 1)));
  rep.radius_i = max_projected_radius(points, i, projection_samples, rng);
  rep.radius_j_estimate = i == j ? rep.radius_i : max_projected_radius(points, j, projection_samples, rng);
  rep.tolerance = 0.01 * rep.radius_i;
  rep.passed = rep.radius_i <= rep.factor * rep.radius_j_estimate + rep.tolerance;
  rep.note = "R_j is a sampled lower estimate of the true maximum; coarse sampling can fail spuriously";
  return rep;
}

}  // namespace tightmean
