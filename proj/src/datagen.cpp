#include "eepred/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "eepred/error.hpp"
#include "eepred/parallel.hpp"
#include "eepred/serialize.hpp"

namespace eepred {

const Combination& combination(char tag) { return kCombinations[combination_index(tag)]; }

std::size_t combination_index(char tag) {
  if (tag < 'a' || tag > 'f') {
    throw DomainError(std::string("unknown combination tag '") + tag + "'");
  }
  return static_cast<std::size_t>(tag - 'a');
}

RangeTable default_ranges() {
  RangeTable table{};
  // a: f = 0
  table[0].epsilon = {0.04, 0.0875};
  table[0].delta = {1e-4, 1e-3};
  // b: epsilon = 0
  table[1].f = {2.8, 3.225};
  table[1].delta = {0.005, 0.04};
  // c: epsilon = delta = 0
  table[2].f = {1.75, 3.35};
  // d: delta = 0
  table[3].f = {0.2, 0.6};
  table[3].epsilon = {0.04, 0.0875};
  // e: f = delta = 0
  table[4].epsilon = {0.04, 0.0875};
  // f: all nonzero
  table[5].f = {5e-4, 0.2};
  table[5].epsilon = {0.04, 0.0875};
  table[5].delta = {1e-4, 1e-3};
  return table;
}

ParamPoint sample_point(const Combination& combo, const ComboRanges& ranges, Rng& rng) {
  ParamPoint point;
  if (!combo.f_zero) point.f = rng.uniform(ranges.f.lo, ranges.f.hi);
  if (!combo.epsilon_zero) point.epsilon = rng.uniform(ranges.epsilon.lo, ranges.epsilon.hi);
  if (!combo.delta_zero) point.delta = rng.uniform(ranges.delta.lo, ranges.delta.hi);
  return point;
}

QualifierResult label_point(const ParamPoint& point, const GenerationConfig& config) {
  SystemParams params = config.base;
  params.f = point.f;
  params.epsilon = point.epsilon;
  params.delta = point.delta;
  return simulate_and_classify(params, config.sim, config.qualifier);
}

Matrix Dataset::features() const {
  Matrix out(0, 3);
  for (const auto& row : rows) {
    const double values[3] = {row.f, row.epsilon, row.delta};
    out.append_row(values);
  }
  return out;
}

Labels Dataset::labels() const {
  Labels out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.label);
  return out;
}

namespace {

void check_ranges(const Combination& combo, const ComboRanges& r) {
  auto check = [&](bool zeroed, const Range& range, const char* name) {
    if (zeroed) return;
    if (!(range.lo <= range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi)) {
      throw DomainError(std::string("combination ") + combo.tag + ": empty " + name + " range");
    }
    if (range.lo <= 0.0 && range.hi >= 0.0) {
      throw DomainError(std::string("combination ") + combo.tag + ": " + name +
                        " range must exclude zero");
    }
  };
  check(combo.f_zero, r.f, "f");
  check(combo.epsilon_zero, r.epsilon, "epsilon");
  check(combo.delta_zero, r.delta, "delta");
}

}  // namespace

Dataset generate_dataset(const GenerationConfig& config, const ProgressFn& progress) {
  const Labeler simulate = [&config](const ParamPoint& point) -> std::optional<int> {
    try {
      return label_point(point, config).label();
    } catch (const DivergenceError&) {
      return std::nullopt;
    }
  };
  return generate_dataset(config, simulate, progress);
}

Dataset generate_dataset(const GenerationConfig& config, const Labeler& labeler,
                         const ProgressFn& progress) {
  Dataset dataset;
  dataset.seed = config.seed;
  dataset.config_digest = digest(to_json(config));
  config.base.validate();
  config.sim.validate(config.base);

  const std::size_t batch = std::max<std::size_t>(1, config.workers);

  for (std::size_t ci = 0; ci < kCombinations.size(); ++ci) {
    const Combination& combo = kCombinations[ci];
    const ComboRanges& ranges = config.ranges[ci];
    check_ranges(combo, ranges);

    std::array<std::size_t, 2> filled{};
    std::size_t attempt = 0;
    auto done = [&] { return filled[0] >= config.quota && filled[1] >= config.quota; };

    while (!done() && attempt < config.max_attempts) {
      const std::size_t count = std::min(batch, config.max_attempts - attempt);
      std::vector<ParamPoint> points(count);
      std::vector<std::optional<int>> labels(count);
      parallel_for(count, config.workers, [&](std::size_t j) {
        Rng rng(derive_seed(config.seed, {ci, attempt + j}));
        points[j] = sample_point(combo, ranges, rng);
        labels[j] = labeler(points[j]);
        if (labels[j] && *labels[j] != 0 && *labels[j] != 1) {
          throw DomainError("labeler returned a label outside {0, 1}");
        }
      });

      for (std::size_t j = 0; j < count && !done(); ++j) {
        ++attempt;
        if (!labels[j]) {
          ++dataset.stats.diverged[ci];
          continue;
        }
        const int label = *labels[j];
        if (filled[label] >= config.quota) continue;
        ++filled[label];
        dataset.rows.push_back({points[j].f, points[j].epsilon, points[j].delta, combo.tag, label});
      }
      if (progress && attempt % 100 == 0) {
        std::ostringstream msg;
        msg << "combo " << combo.tag << ": " << attempt << " draws, extreme " << filled[1] << "/"
            << config.quota << ", non-extreme " << filled[0] << "/" << config.quota;
        progress(msg.str());
      }
    }
    dataset.stats.attempts[ci] = attempt;

    for (int label : {1, 0}) {
      if (filled[label] < config.quota) {
        std::ostringstream msg;
        msg << "bucket (combo " << combo.tag << ", " << (label ? "extreme" : "non-extreme")
            << ") holds " << filled[label] << "/" << config.quota << " after " << attempt
            << " attempts";
        throw GenerationError(msg.str());
      }
    }
    if (progress) {
      std::ostringstream msg;
      msg << "combo " << combo.tag << " complete after " << attempt << " draws ("
          << dataset.stats.diverged[ci] << " diverged)";
      progress(msg.str());
    }
  }
  return dataset;
}

Split shuffle_split(std::size_t n_rows, std::uint64_t seed, double train_fraction) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw DomainError("train fraction must lie in [0, 1]");
  }
  std::vector<std::size_t> order(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
  Rng rng(derive_seed(seed, {0x5eed}));
  rng.shuffle(std::span<std::size_t>(order));

  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_rows)));
  Split split;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return split;
}

DistributionReport distribution_report(const Dataset& dataset, const Split& split) {
  auto tally = [&](const std::vector<std::size_t>& indices) {
    SetCounts counts;
    for (std::size_t i : indices) {
      const auto& row = dataset.rows.at(i);
      (row.label ? counts.extreme : counts.non_extreme)++;
      counts.combos[combination_index(row.combo)]++;
    }
    return counts;
  };
  return {tally(split.train), tally(split.test)};
}

Scaler fit_scaler(const Matrix& train_rows) {
  if (train_rows.rows() < 2) throw DomainError("scaler needs at least two training rows");
  const std::size_t n = train_rows.rows();
  const std::size_t d = train_rows.cols();
  Scaler scaler;
  scaler.mean.assign(d, 0.0);
  scaler.variance.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += train_rows(i, j);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (train_rows(i, j) - mean) * (train_rows(i, j) - mean);
    const double var = sq / static_cast<double>(n);
    const double floor = 1e-12 * std::max(1.0, std::abs(mean));
    if (!(var > floor * floor)) {
      throw DomainError("feature " + std::to_string(j) + " has zero variance in the training rows");
    }
    scaler.mean[j] = mean;
    scaler.variance[j] = var;
  }
  return scaler;
}

Matrix Scaler::apply(const Matrix& rows) const {
  if (rows.cols() != mean.size() && !rows.empty()) {
    throw DomainError("scaler fitted on " + std::to_string(mean.size()) + " features, got " +
                      std::to_string(rows.cols()));
  }
  Matrix out = rows;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = (out(i, j) - mean[j]) / std::sqrt(variance[j]);
    }
  }
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  out << "# eepred dataset config_digest=" << dataset.config_digest << " seed=" << dataset.seed
      << " rows=" << dataset.size() << "\n";
  out << "f,epsilon,delta,combo,label\n";
  for (const auto& row : dataset.rows) {
    out << format_double(row.f) << ',' << format_double(row.epsilon) << ','
        << format_double(row.delta) << ',' << row.combo << ',' << row.label << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset dataset;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        if (token.rfind("config_digest=", 0) == 0) dataset.config_digest = token.substr(14);
        if (token.rfind("seed=", 0) == 0) dataset.seed = std::stoull(token.substr(5));
      }
      continue;
    }
    if (!header_seen) {
      if (line != "f,epsilon,delta,combo,label") {
        throw IoError("dataset CSV: unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string f, eps, delta, combo, label;
    if (!std::getline(fields, f, ',') || !std::getline(fields, eps, ',') ||
        !std::getline(fields, delta, ',') || !std::getline(fields, combo, ',') ||
        !std::getline(fields, label)) {
      throw IoError("dataset CSV: malformed line " + std::to_string(line_no));
    }
    try {
      LabeledSample row;
      row.f = std::stod(f);
      row.epsilon = std::stod(eps);
      row.delta = std::stod(delta);
      if (combo.size() != 1) throw IoError("bad combo");
      row.combo = combo[0];
      const Combination& c = combination(row.combo);
      row.label = std::stoi(label);
      if (row.label != 0 && row.label != 1) throw IoError("bad label");
      if ((c.f_zero && row.f != 0.0) || (c.epsilon_zero && row.epsilon != 0.0) ||
          (c.delta_zero && row.delta != 0.0)) {
        throw IoError("zero pattern violated");
      }
      dataset.rows.push_back(row);
    } catch (const std::exception& e) {
      throw IoError("dataset CSV: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) throw IoError("dataset CSV: missing header");
  return dataset;
}

}  // namespace eepred
