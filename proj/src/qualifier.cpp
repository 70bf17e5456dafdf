#include "eepred/qualifier.hpp"

#include <cmath>
#include <vector>
#include <string>

#include "eepred/error.hpp"

namespace eepred {

std::string_view to_string(Observable observable) {
  return observable == Observable::kPosition ? "x" : "v";
}

Observable parse_observable(std::string_view text) {
  if (text == "x") return Observable::kPosition;
  if (text == "v") return Observable::kVelocity;
  throw DomainError("unknown observable '" + std::string(text) + "' (expected x or v)");
}

PeakSeries find_peaks(std::span<const double> series) {
  PeakSeries peaks;
  if (series.size() < 3) return peaks;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    if (series[i - 1] < series[i] && series[i] >= series[i + 1]) {
      peaks.indices.push_back(i);
      peaks.values.push_back(series[i]);
    }
  }
  return peaks;
}

QualifierStats qualifier_threshold(std::span<const double> peak_values) {
  const std::size_t n = peak_values.size();
  if (n < 2) throw InsufficientPeaksError(n);

  double sum = 0.0;
  for (double value : peak_values) sum += value;
  const double mean = sum / static_cast<double>(n);

  double sq = 0.0;
  for (double value : peak_values) sq += (value - mean) * (value - mean);
  const double sigma = std::sqrt(sq / static_cast<double>(n));

  return {mean, sigma, mean + 4.0 * sigma};
}

QualifierResult qualify_peaks(std::span<const double> peak_values, const QualifierConfig& config) {
  std::vector<double> kept;
  kept.reserve(peak_values.size());
  for (double value : peak_values) {
    if (value > config.min_peak) kept.push_back(value);
  }

  QualifierResult result;
  result.observable = config.observable;
  result.n_peaks = kept.size();

  if (kept.size() < 2) {
    if (config.policy == FewPeaksPolicy::kThrow) throw InsufficientPeaksError(kept.size());
    result.insufficient_peaks = true;
    return result;
  }

  const QualifierStats stats = qualifier_threshold(kept);
  result.mean_peak = stats.mean_peak;
  result.sigma_peak = stats.sigma_peak;
  result.threshold = stats.threshold;
  for (double value : kept) {
    if (value > stats.threshold) ++result.n_exceedances;
  }
  result.extreme = result.n_exceedances >= 1;
  return result;
}

QualifierResult qualify_series(std::span<const double> series, const QualifierConfig& config) {
  return qualify_peaks(find_peaks(series).values, config);
}

QualifierResult classify_trajectory(const Trajectory& traj, const QualifierConfig& config) {
  const auto& channel = config.observable == Observable::kPosition ? traj.x : traj.v;
  if (traj.transient_cut_index >= channel.size()) {
    throw DomainError("trajectory has no post-transient samples");
  }
  std::span<const double> tail(channel);
  return qualify_series(tail.subspan(traj.transient_cut_index), config);
}

QualifierResult simulate_and_classify(const SystemParams& params, const SimConfig& sim,
                                      const QualifierConfig& config) {
  const std::size_t cut = transient_cut_index(sim);
  const bool use_x = config.observable == Observable::kPosition;
  std::vector<double> peaks;
  double prev2 = 0.0;
  double prev1 = 0.0;
  std::size_t seen = 0;
  integrate_streaming(params, sim, [&](std::size_t k, double, double x, double v) {
    if (k < cut) return;
    const double s = use_x ? x : v;
    if (seen >= 2 && prev2 < prev1 && prev1 >= s) peaks.push_back(prev1);
    prev2 = prev1;
    prev1 = s;
    ++seen;
  });
  if (seen == 0) throw DomainError("trajectory has no post-transient samples");
  return qualify_peaks(peaks, config);
}

}  // namespace eepred
