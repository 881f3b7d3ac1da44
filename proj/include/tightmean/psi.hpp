#pragma once

#include <map>
#include <string>
#include <vector>

namespace tightmean {

/// Families of odd influence functions. `Identity` (psi(x) = x) does not
/// satisfy the log sandwich and exists as a negative control.
enum class PsiKind {
  ClippedCubicSqrt2,
  ClippedCubicOne,
  CatoniUpperLog,
  CatoniLowerLog,
  Identity,
};

const char* to_string(PsiKind kind);
PsiKind psi_kind_from_string(const std::string& name);

/// An influence function together with the (beta -> eta) certificates that
/// were verified for it. Immutable; `with_certificate` returns a copy.
class PsiFunction {
 public:
  explicit PsiFunction(PsiKind kind = PsiKind::ClippedCubicSqrt2) : kind_(kind) {}

  PsiKind kind() const noexcept { return kind_; }
  double operator()(double x) const noexcept;

  /// sup |psi|; infinite for the log forms and the identity.
  double sup_abs() const noexcept;
  bool is_bounded() const noexcept;

  const std::map<double, double>& eta_certificates() const noexcept { return eta_; }
  PsiFunction with_certificate(double beta, double eta) const;

 private:
  PsiKind kind_;
  std::map<double, double> eta_;
};

double eval_psi(const PsiFunction& f, double x) noexcept;

/// Lower and upper Catoni envelopes with the variance term scaled by (1 - eta).
/// Returns +inf / -inf when the log argument is non-positive.
double catoni_lower_bound(double x, double eta = 0.0) noexcept;
double catoni_upper_bound(double x, double eta = 0.0) noexcept;

struct GridSpec {
  double lo = -20.0;
  double hi = 20.0;
  std::size_t points = 1'000'000;
};

struct ConstraintViolation {
  double x;
  double psi;
  double lower;
  double upper;
};

struct VerificationReport {
  std::size_t points_checked = 0;
  std::vector<ConstraintViolation> violations;
  bool passed() const noexcept { return violations.empty(); }
};

inline constexpr double kBaseConstraintTolerance = 1e-12;

/// Checks -log(1-x+x^2/2) <= psi(x) <= log(1+x+x^2/2) on a uniform grid.
VerificationReport verify_base_constraint(const PsiFunction& f, const GridSpec& grid = {});

/// True if the eta-tightened sandwich holds at every point of a uniform grid
/// on [beta/2, hi] (mirrored by oddness).
bool improved_constraint_holds(const PsiFunction& f, double beta, double eta,
                               std::size_t points = 1'000'000, double hi = 50.0);

/// Same check on caller-supplied abscissae (|x| >= beta/2 is the caller's job).
bool improved_constraint_holds_at(const PsiFunction& f, double eta, const std::vector<double>& xs);

/// Largest eta for which the tightened sandwich holds for |x| >= beta/2.
/// Bisection is done on log(eta) down to kEtaFloor with relative tolerance
/// 1e-6; throws NoImprovedSlack if even the floor fails. Results are memoized
/// per (kind, beta).
double compute_eta(const PsiFunction& f, double beta);

inline constexpr double kEtaFloor = 1e-12;

}  // namespace tightmean
