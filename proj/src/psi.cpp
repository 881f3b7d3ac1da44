#include "tightmean/psi.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <mutex>
#include <utility>

#include "tightmean/error.hpp"

namespace tightmean {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

const char* to_string(PsiKind kind) {
  switch (kind) {
    case PsiKind::ClippedCubicSqrt2: return "clipped-cubic-sqrt2";
    case PsiKind::ClippedCubicOne: return "clipped-cubic-one";
    case PsiKind::CatoniUpperLog: return "catoni-upper-log";
    case PsiKind::CatoniLowerLog: return "catoni-lower-log";
    case PsiKind::Identity: return "identity";
  }
  return "unknown";
}

PsiKind psi_kind_from_string(const std::string& name) {
  for (auto k : {PsiKind::ClippedCubicSqrt2, PsiKind::ClippedCubicOne, PsiKind::CatoniUpperLog,
                 PsiKind::CatoniLowerLog, PsiKind::Identity}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorCode::InvalidArgument, "unknown psi kind: " + name);
}

double PsiFunction::operator()(double x) const noexcept {
  switch (kind_) {
    case PsiKind::ClippedCubicSqrt2:
      if (std::abs(x) <= kSqrt2) return x - x * x * x / 6.0;
      return (2.0 * kSqrt2 / 3.0) * sign(x);
    case PsiKind::ClippedCubicOne:
      if (std::abs(x) <= 1.0) return x - x * x * x / 6.0;
      return (5.0 / 6.0) * sign(x);
    case PsiKind::CatoniUpperLog:
      return x >= 0 ? std::log1p(x + 0.5 * x * x) : -std::log1p(-x + 0.5 * x * x);
    case PsiKind::CatoniLowerLog:
      return x >= 0 ? -std::log1p(-x + 0.5 * x * x) : std::log1p(x + 0.5 * x * x);
    case PsiKind::Identity:
      return x;
  }
  return 0.0;
}

double PsiFunction::sup_abs() const noexcept {
  switch (kind_) {
    case PsiKind::ClippedCubicSqrt2: return 2.0 * kSqrt2 / 3.0;
    case PsiKind::ClippedCubicOne: return 5.0 / 6.0;
    default: return kInf;
  }
}

bool PsiFunction::is_bounded() const noexcept { return std::isfinite(sup_abs()); }

PsiFunction PsiFunction::with_certificate(double beta, double eta) const {
  PsiFunction out = *this;
  out.eta_[beta] = eta;
  return out;
}

double eval_psi(const PsiFunction& f, double x) noexcept { return f(x); }

double catoni_lower_bound(double x, double eta) noexcept {
  const double arg = -x + (1.0 - eta) * 0.5 * x * x;  // log(1 + arg)
  if (arg <= -1.0) return kInf;
  return -std::log1p(arg);
}

double catoni_upper_bound(double x, double eta) noexcept {
  const double arg = x + (1.0 - eta) * 0.5 * x * x;
  if (arg <= -1.0) return -kInf;
  return std::log1p(arg);
}

VerificationReport verify_base_constraint(const PsiFunction& f, const GridSpec& grid) {
  require(grid.points >= 2 && grid.hi > grid.lo, ErrorCode::InvalidArgument,
          "grid must have at least two points and hi > lo");
  VerificationReport report;
  const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.lo + step * static_cast<double>(i);
    const double p = f(x);
    const double lo = catoni_lower_bound(x);
    const double hi = catoni_upper_bound(x);
    if (p < lo - kBaseConstraintTolerance || p > hi + kBaseConstraintTolerance) {
      report.violations.push_back({x, p, lo, hi});
    }
  }
  report.points_checked = grid.points;
  return report;
}

namespace {

// Only x > 0 is examined: for odd psi the x < 0 half is the same pair of
// inequalities after substituting x -> -x.
bool holds_on(const std::vector<double>& xs, const std::vector<double>& ps, double eta) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::abs(xs[i]);
    const double p = xs[i] >= 0 ? ps[i] : -ps[i];
    const double tol = 4.0 * DBL_EPSILON * x;
    if (p > catoni_upper_bound(x, eta) + tol) return false;
    if (p < catoni_lower_bound(x, eta) - tol) return false;
  }
  return true;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  std::vector<double> xs(points);
  const double step = points > 1 ? (hi - lo) / static_cast<double>(points - 1) : 0.0;
  for (std::size_t i = 0; i < points; ++i) xs[i] = lo + step * static_cast<double>(i);
  return xs;
}

}  // namespace

bool improved_constraint_holds_at(const PsiFunction& f, double eta, const std::vector<double>& xs) {
  std::vector<double> ps(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = f(xs[i]);
  return holds_on(xs, ps, eta);
}

bool improved_constraint_holds(const PsiFunction& f, double beta, double eta, std::size_t points,
                               double hi) {
  require(beta > 0, ErrorCode::InvalidArgument, "beta must be positive");
  return improved_constraint_holds_at(f, eta, uniform_grid(beta / 2.0, hi, points));
}

double compute_eta(const PsiFunction& f, double beta) {
  require(beta > 0 && beta < 1, ErrorCode::InvalidArgument, "compute_eta: beta must lie in (0,1)");

  static std::mutex mu;
  static std::map<std::pair<int, double>, double> memo;
  const auto key = std::make_pair(static_cast<int>(f.kind()), beta);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) {
      if (std::isnan(it->second)) {
        fail(ErrorCode::NoImprovedSlack, std::string("no improved slack for ") + to_string(f.kind()));
      }
      return it->second;
    }
  }

  const auto xs = uniform_grid(beta / 2.0, 50.0, 1'000'000);
  std::vector<double> ps(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = f(xs[i]);

  double result = std::numeric_limits<double>::quiet_NaN();
  if (holds_on(xs, ps, kEtaFloor)) {
    double lo = std::log(kEtaFloor);
    double hi = std::log(0.5);
    if (holds_on(xs, ps, 0.5)) {
      lo = hi;
    } else {
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (holds_on(xs, ps, std::exp(mid))) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
    }
    result = std::exp(lo);
  }

  {
    std::lock_guard<std::mutex> lock(mu);
    memo[key] = result;
  }
  if (std::isnan(result)) {
    fail(ErrorCode::NoImprovedSlack, std::string("no improved slack for ") + to_string(f.kind()));
  }
  return result;
}

}  // namespace tightmean
