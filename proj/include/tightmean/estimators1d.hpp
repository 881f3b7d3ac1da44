#pragma once

#include <cstddef>
#include <span>

#include "tightmean/psi.hpp"

namespace tightmean {

/// Constant in the (1 + C2 log(1/delta)/n) slack of the local Catoni radius.
inline constexpr double kCatoniC2 = 4.0;
/// catoni() needs n >= ceil((kCatoniSampleFactor / xi) log(1/delta)).
inline constexpr double kCatoniSampleFactor = 20.0;

struct Estimate1D {
  double value = 0.0;
  double half_width = 0.0;  // claimed 1 - delta radius
  double delta = 0.0;
  std::size_t n_used = 0;
};

/// sigma, delta and the outlier scale T. `for_samples` fixes
/// T = sigma sqrt(n / (2 log(2/delta))).
class CatoniParams {
 public:
  static CatoniParams for_samples(double sigma, double delta, std::size_t n);
  static CatoniParams with_scale(double sigma, double delta, double T);

  double sigma() const noexcept { return sigma_; }
  double delta() const noexcept { return delta_; }
  double T() const noexcept { return T_; }

 private:
  CatoniParams(double sigma, double delta, double T) : sigma_(sigma), delta_(delta), T_(T) {}
  double sigma_;
  double delta_;
  double T_;
};

/// k = max(1, min(floor(n/2), ceil(8 ln(1/delta)))) contiguous batches.
std::size_t mom_batch_count(std::size_t n, double delta);

/// Lower median of the contiguous batch means.
double median_of_means(std::span<const double> samples, double delta);

/// One Newton-style step from mu0: mu0 + (T/n) sum psi((x_i - mu0)/T).
Estimate1D catoni_local(std::span<const double> samples, double mu0, const PsiFunction& psi,
                        const CatoniParams& params);

/// Median-of-means on the first ceil(xi n) samples (at delta/2), then
/// catoni_local on the rest (at delta/2).
Estimate1D catoni(std::span<const double> samples, double delta, double sigma,
                  const PsiFunction& psi, double xi);

/// Sample size below which catoni() refuses to run.
std::size_t catoni_min_samples(double delta, double xi);

}  // namespace tightmean
