#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eepred/matrix.hpp"
#include "eepred/qualifier.hpp"
#include "eepred/random.hpp"
#include "eepred/sim.hpp"

namespace eepred {

// The six regimes of (f, epsilon, delta): which of the three bifurcation
// parameters is pinned to exactly zero.
struct Combination {
  char tag;
  bool f_zero;
  bool epsilon_zero;
  bool delta_zero;
  const char* name;
};

inline constexpr std::array<Combination, 6> kCombinations{{
    {'a', true, false, false, "time delay with parametric drive"},
    {'b', false, true, false, "time delay with forcing"},
    {'c', false, true, true, "external force only"},
    {'d', false, false, true, "parametric drive with forcing"},
    {'e', true, false, true, "parametric drive only"},
    {'f', false, false, false, "time delay with parametric drive and forcing"},
}};

// Throws DomainError for tags outside a..f.
const Combination& combination(char tag);
std::size_t combination_index(char tag);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Sampling interval per nonzero parameter; intervals of zeroed parameters are
// ignored.
struct ComboRanges {
  Range f;
  Range epsilon;
  Range delta;
};

using RangeTable = std::array<ComboRanges, 6>;

// Shipped ranges; each interval brackets the extreme and non-extreme example
// points of its regime.
RangeTable default_ranges();

struct ParamPoint {
  double f = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

ParamPoint sample_point(const Combination& combo, const ComboRanges& ranges, Rng& rng);

struct LabeledSample {
  double f = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  char combo = 'a';
  int label = 0;
};

struct GenerationConfig {
  SystemParams base;  // f, epsilon, delta are overwritten per draw
  SimConfig sim;
  QualifierConfig qualifier{Observable::kPosition, 1e-6, FewPeaksPolicy::kNonExtreme};
  RangeTable ranges = default_ranges();
  std::size_t quota = 50;  // per label per combination
  std::size_t max_attempts = 20000;  // per combination
  std::uint64_t seed = 2022;
  std::size_t workers = 1;
};

struct GenerationStats {
  std::array<std::size_t, 6> attempts{};
  std::array<std::size_t, 6> diverged{};
};

struct Dataset {
  std::vector<LabeledSample> rows;
  std::string config_digest;
  std::uint64_t seed = 0;
  GenerationStats stats;

  std::size_t size() const { return rows.size(); }
  Matrix features() const;
  Labels labels() const;
};

// Label-stratified rejection sampling: candidate k of combination c is drawn
// from derive_seed(seed, {c, k}), simulated and qualified; candidates are
// committed in draw order until both label buckets hold `quota` rows.
// Diverged candidates are skipped and counted. The result does not depend
// on `workers`. Throws GenerationError naming the first bucket that cannot
// be filled within max_attempts.
using ProgressFn = std::function<void(const std::string&)>;
Dataset generate_dataset(const GenerationConfig& config, const ProgressFn& progress = {});

// Label source for generate_dataset: 0 or 1, or nullopt for a diverged
// candidate. Must be safe to call concurrently.
using Labeler = std::function<std::optional<int>(const ParamPoint&)>;
Dataset generate_dataset(const GenerationConfig& config, const Labeler& labeler,
                         const ProgressFn& progress = {});

// Simulates and labels one parameter point. Throws DivergenceError.
QualifierResult label_point(const ParamPoint& point, const GenerationConfig& config);

struct Split {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Uniform permutation under `seed`; the first round(train_fraction * n) rows
// train, the rest test.
Split shuffle_split(std::size_t n_rows, std::uint64_t seed, double train_fraction = 0.75);

struct SetCounts {
  std::size_t extreme = 0;
  std::size_t non_extreme = 0;
  std::array<std::size_t, 6> combos{};
};

struct DistributionReport {
  SetCounts train;
  SetCounts test;
};

DistributionReport distribution_report(const Dataset& dataset, const Split& split);

// Per-feature standardization with statistics from the training rows only.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> variance;  // population (divisor n)

  Matrix apply(const Matrix& rows) const;
};

// Throws DomainError for fewer than two rows or a zero-variance feature.
Scaler fit_scaler(const Matrix& train_rows);
inline Matrix apply_scaler(const Scaler& scaler, const Matrix& rows) { return scaler.apply(rows); }

// CSV with exact header "f,epsilon,delta,combo,label", preceded by '#'
// comment lines carrying the digest and seed.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);
Dataset read_dataset_csv(std::istream& in);

}  // namespace eepred
