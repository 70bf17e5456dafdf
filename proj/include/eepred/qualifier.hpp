#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "eepred/sim.hpp"

namespace eepred {

enum class Observable { kPosition, kVelocity };

std::string_view to_string(Observable observable);
// Accepts "x" or "v". Throws DomainError otherwise.
Observable parse_observable(std::string_view text);

struct PeakSeries {
  std::vector<std::size_t> indices;
  std::vector<double> values;

  std::size_t count() const { return values.size(); }
};

struct QualifierStats {
  double mean_peak = 0.0;
  double sigma_peak = 0.0;
  double threshold = 0.0;
};

struct QualifierResult {
  double mean_peak = 0.0;
  double sigma_peak = 0.0;
  double threshold = 0.0;
  std::size_t n_peaks = 0;
  std::size_t n_exceedances = 0;
  bool extreme = false;
  // Set when fewer than two peaks were found and the label defaulted to
  // non-extreme.
  bool insufficient_peaks = false;
  Observable observable = Observable::kPosition;

  int label() const { return extreme ? 1 : 0; }
};

enum class FewPeaksPolicy { kThrow, kNonExtreme };

struct QualifierConfig {
  Observable observable = Observable::kPosition;
  // Only local maxima strictly above this level enter the statistics: the
  // threshold is one-sided, and orbits that have decayed onto the rest
  // point produce no peaks at all.
  double min_peak = 1e-6;
  FewPeaksPolicy policy = FewPeaksPolicy::kThrow;
};

// Interior samples with s[i-1] < s[i] >= s[i+1]; a flat top is credited to
// its first sample. Series shorter than 3 give no peaks.
PeakSeries find_peaks(std::span<const double> series);

// Mean and population standard deviation of the peak values, with threshold
// mean + 4 sigma. Throws InsufficientPeaksError for fewer than two peaks.
QualifierStats qualifier_threshold(std::span<const double> peak_values);
inline QualifierStats qualifier_threshold(const PeakSeries& peaks) {
  return qualifier_threshold(peaks.values);
}

// Qualifies a raw series: the event is extreme iff some peak lies strictly
// above the threshold.
// Statistics and label from a peak list; peaks at or below config.min_peak
// are dropped first.
QualifierResult qualify_peaks(std::span<const double> peak_values, const QualifierConfig& config = {});
QualifierResult qualify_series(std::span<const double> series, const QualifierConfig& config = {});

// Applies qualify_series to the post-transient part of the configured channel.
QualifierResult classify_trajectory(const Trajectory& traj, const QualifierConfig& config = {});
inline QualifierResult classify_trajectory(const Trajectory& traj, Observable observable,
                                           FewPeaksPolicy policy = FewPeaksPolicy::kThrow) {
  return classify_trajectory(traj, QualifierConfig{observable, 1e-6, policy});
}

// Integrates and qualifies without storing the trajectory. Gives the same
// result as classify_trajectory(integrate(params, sim), config).
QualifierResult simulate_and_classify(const SystemParams& params, const SimConfig& sim,
                                      const QualifierConfig& config = {});

}  // namespace eepred
