#include "tightmean/estimators1d.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tightmean/error.hpp"

namespace tightmean {

CatoniParams CatoniParams::for_samples(double sigma, double delta, std::size_t n) {
  require(sigma > 0 && delta > 0 && delta < 1 && n >= 1, ErrorCode::InvalidArgument,
          "CatoniParams: need sigma > 0, delta in (0,1), n >= 1");
  const double T = sigma * std::sqrt(static_cast<double>(n) / (2.0 * std::log(2.0 / delta)));
  return {sigma, delta, T};
}

CatoniParams CatoniParams::with_scale(double sigma, double delta, double T) {
  require(sigma > 0 && delta > 0 && delta < 1 && T > 0, ErrorCode::InvalidArgument,
          "CatoniParams: need sigma > 0, delta in (0,1), T > 0");
  return {sigma, delta, T};
}

std::size_t mom_batch_count(std::size_t n, double delta) {
  const auto wanted = static_cast<std::size_t>(std::ceil(8.0 * std::log(1.0 / delta)));
  return std::max<std::size_t>(1, std::min(n / 2, wanted));
}

double median_of_means(std::span<const double> samples, double delta) {
  require(!samples.empty(), ErrorCode::EmptyInput, "median_of_means: no samples");
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "median_of_means: delta must lie in (0,1)");
  const std::size_t n = samples.size();
  const std::size_t k = mom_batch_count(n, delta);
  std::vector<double> means(k);
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t lo = b * n / k;
    const std::size_t hi = (b + 1) * n / k;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += samples[i];
    means[b] = acc / static_cast<double>(hi - lo);
  }
  auto mid = means.begin() + static_cast<std::ptrdiff_t>((k - 1) / 2);
  std::nth_element(means.begin(), mid, means.end());
  return *mid;
}

Estimate1D catoni_local(std::span<const double> samples, double mu0, const PsiFunction& psi,
                        const CatoniParams& params) {
  require(!samples.empty(), ErrorCode::EmptyInput, "catoni_local: no samples");
  const double T = params.T();
  const double n = static_cast<double>(samples.size());
  double acc = 0.0;
  for (double x : samples) acc += psi((x - mu0) / T);

  Estimate1D est;
  est.value = mu0 + T * acc / n;
  est.delta = params.delta();
  est.n_used = samples.size();
  est.half_width = (1.0 + kCatoniC2 * std::log(1.0 / params.delta()) / n) * params.sigma() *
                   std::sqrt(2.0 * std::log(2.0 / params.delta()) / n);
  return est;
}

std::size_t catoni_min_samples(double delta, double xi) {
  return static_cast<std::size_t>(std::ceil(kCatoniSampleFactor / xi * std::log(1.0 / delta)));
}

Estimate1D catoni(std::span<const double> samples, double delta, double sigma,
                  const PsiFunction& psi, double xi) {
  require(xi > 0 && xi < 1, ErrorCode::InvalidArgument, "catoni: xi must lie in (0,1)");
  require(delta > 0 && delta < 1, ErrorCode::InvalidArgument, "catoni: delta must lie in (0,1)");
  require(sigma > 0, ErrorCode::InvalidArgument, "catoni: sigma must be positive");
  const std::size_t n = samples.size();
  require(n >= catoni_min_samples(delta, xi) && n >= 2, ErrorCode::TooFewSamples,
          "catoni: need n >= ceil((20/xi) log(1/delta))");

  const auto m = std::min(n - 1, static_cast<std::size_t>(std::ceil(xi * static_cast<double>(n))));
  const double mu0 = median_of_means(samples.first(m), delta / 2.0);
  const auto rest = samples.subspan(m);
  Estimate1D est = catoni_local(rest, mu0, psi, CatoniParams::for_samples(sigma, delta / 2.0, rest.size()));
  est.delta = delta;
  est.n_used = n;
  est.half_width = (1.0 + xi) * sigma * std::sqrt(2.0 * std::log(4.0 / delta) / static_cast<double>(n));
  return est;
}

}  // namespace tightmean
