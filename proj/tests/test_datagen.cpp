#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "eepred/datagen.hpp"
#include "eepred/error.hpp"

using namespace eepred;

namespace {

// Deterministic pseudo-label with a sprinkling of divergent candidates.
std::optional<int> synthetic_label(const ParamPoint& p) {
  const double h = (p.f + p.epsilon + p.delta) * 1e4;
  if (std::fmod(h * 7.0, 11.0) < 0.4) return std::nullopt;
  return std::fmod(h, 2.0) >= 1.0 ? 1 : 0;
}

GenerationConfig small_config(std::size_t quota) {
  GenerationConfig c;
  c.quota = quota;
  c.max_attempts = 5000;
  c.seed = 99;
  return c;
}

Dataset synthetic_dataset(std::size_t n_per_label_combo) {
  return generate_dataset(small_config(n_per_label_combo), synthetic_label);
}

bool follows_zero_pattern(const LabeledSample& row) {
  const Combination& c = combination(row.combo);
  auto ok = [](bool zeroed, double v) { return zeroed ? v == 0.0 : v != 0.0; };
  return ok(c.f_zero, row.f) && ok(c.epsilon_zero, row.epsilon) && ok(c.delta_zero, row.delta);
}

}  // namespace

TEST_CASE("combination table") {
  CHECK(kCombinations.size() == 6);
  CHECK(combination('a').f_zero);
  CHECK_FALSE(combination('a').delta_zero);
  CHECK(combination('c').epsilon_zero);
  CHECK(combination('c').delta_zero);
  CHECK(combination('e').f_zero);
  CHECK(combination('e').delta_zero);
  const Combination& f = combination('f');
  const bool any_zero = f.f_zero || f.epsilon_zero || f.delta_zero;
  CHECK_FALSE(any_zero);
  CHECK(combination_index('d') == 3);
  CHECK_THROWS_AS(combination('g'), DomainError);
}

TEST_CASE("sample_point respects zero patterns and ranges") {
  Rng rng(5);
  ComboRanges r;
  r.f = {3.0, 3.3};
  r.epsilon = {0.05, 0.1};
  r.delta = {1e-4, 1e-3};
  for (int i = 0; i < 200; ++i) {
    const ParamPoint c = sample_point(combination('c'), r, rng);
    CHECK(c.f >= 3.0);
    CHECK(c.f <= 3.3);
    CHECK(c.epsilon == 0.0);
    CHECK(c.delta == 0.0);
    const ParamPoint a = sample_point(combination('a'), r, rng);
    CHECK(a.f == 0.0);
    CHECK(a.epsilon > 0.0);
    CHECK(a.delta > 0.0);
  }
  // the Fig. 1(k) point is a legal draw for combination f
  const ComboRanges defaults = default_ranges()[5];
  CHECK(0.001 >= defaults.f.lo);
  CHECK(0.001 <= defaults.f.hi);
  CHECK(0.081 >= defaults.epsilon.lo);
  CHECK(0.081 <= defaults.epsilon.hi);
  CHECK(5e-4 >= defaults.delta.lo);
  CHECK(5e-4 <= defaults.delta.hi);
}

TEST_CASE("quota arithmetic") {
  const Dataset d = synthetic_dataset(2);
  CHECK(d.size() == 24);
  std::size_t positives = 0;
  std::array<std::size_t, 6> per_combo{};
  for (const auto& row : d.rows) {
    positives += row.label;
    per_combo[combination_index(row.combo)]++;
    CHECK(follows_zero_pattern(row));
  }
  CHECK(positives == 12);
  for (auto n : per_combo) CHECK(n == 4);

  const Dataset full = synthetic_dataset(50);
  CHECK(full.size() == 600);
  CHECK(std::count_if(full.rows.begin(), full.rows.end(), [](auto& r) { return r.label == 1; }) == 300);
  std::size_t diverged = 0;
  for (auto n : full.stats.diverged) diverged += n;
  CHECK(diverged > 0);
}

TEST_CASE("generation is reproducible and independent of worker count") {
  GenerationConfig c = small_config(5);
  const Dataset a = generate_dataset(c, synthetic_label);
  c.workers = 3;
  const Dataset b = generate_dataset(c, synthetic_label);
  std::ostringstream sa, sb;
  write_dataset_csv(sa, a);
  write_dataset_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.stats.attempts == b.stats.attempts);

  c.seed = 100;
  std::ostringstream sc;
  write_dataset_csv(sc, generate_dataset(c, synthetic_label));
  CHECK(sc.str() != sa.str());
}

TEST_CASE("unreachable bucket names itself") {
  GenerationConfig c = small_config(3);
  c.max_attempts = 200;
  const Labeler never_extreme = [](const ParamPoint&) { return std::optional<int>(0); };
  try {
    generate_dataset(c, never_extreme);
    FAIL("expected a generation error");
  } catch (const GenerationError& e) {
    const std::string what = e.what();
    CHECK(what.find("combo a") != std::string::npos);
    CHECK(what.find("extreme") != std::string::npos);
  }
}

TEST_CASE("ranges must exclude zero") {
  GenerationConfig c = small_config(1);
  c.ranges[2].f = {0.0, 1.0};
  CHECK_THROWS_AS(generate_dataset(c, synthetic_label), DomainError);
  c.ranges[2].f = {2.0, 1.0};
  CHECK_THROWS_AS(generate_dataset(c, synthetic_label), DomainError);
}

TEST_CASE("shuffle_split partitions the rows") {
  const Split s = shuffle_split(600, 1);
  CHECK(s.train.size() == 450);
  CHECK(s.test.size() == 150);
  std::vector<std::size_t> all(s.train);
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(600);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);

  const Split again = shuffle_split(600, 1);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK(shuffle_split(600, 2).train != s.train);

  const Split small = shuffle_split(24, 3);
  CHECK(small.train.size() == 18);
  CHECK(small.test.size() == 6);
}

TEST_CASE("five shuffles are roughly balanced") {
  const Dataset d = synthetic_dataset(50);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DistributionReport r = distribution_report(d, shuffle_split(d.size(), seed));
    CHECK(r.train.extreme + r.train.non_extreme == 450);
    CHECK(r.test.extreme + r.test.non_extreme == 150);
    CHECK(std::abs(static_cast<double>(r.train.extreme) - 225.0) <= 22.5);
    CHECK(std::abs(static_cast<double>(r.test.extreme) - 75.0) <= 7.5 * 2);
    std::size_t train_total = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(r.train.combos[k] + r.test.combos[k] == 100);
      train_total += r.train.combos[k];
    }
    CHECK(train_total == 450);
  }
}

TEST_CASE("empty split gives an all-zero table") {
  const Dataset d = synthetic_dataset(1);
  const DistributionReport r = distribution_report(d, Split{});
  CHECK(r.train.extreme == 0);
  CHECK(r.test.non_extreme == 0);
  for (auto n : r.train.combos) CHECK(n == 0);
}

TEST_CASE("scaler moments") {
  const Matrix single{{1.0}, {3.0}};
  const Scaler s = fit_scaler(single);
  CHECK(s.mean[0] == 2.0);
  CHECK(s.variance[0] == 1.0);
  const Matrix scaled = apply_scaler(s, single);
  CHECK(scaled(0, 0) == -1.0);
  CHECK(scaled(1, 0) == 1.0);

  Rng rng(8);
  Matrix train(0, 3);
  for (int i = 0; i < 450; ++i) {
    const double row[3] = {rng.uniform(0.0, 3.4), rng.uniform(0.0, 0.12), rng.uniform(0.0, 1e-3)};
    train.append_row(row);
  }
  const Scaler fitted = fit_scaler(train);
  const Matrix z = fitted.apply(train);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) mean += z(i, j);
    mean /= z.rows();
    double var = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) var += (z(i, j) - mean) * (z(i, j) - mean);
    var /= z.rows();
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(var - 1.0) < 1e-9);
  }

  const Scaler again = fit_scaler(z);
  const Matrix zz = again.apply(z);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(zz(i, j) - z(i, j)) < 1e-12);
  }
}

TEST_CASE("scaler uses train statistics only") {
  const Matrix train{{0.0}, {2.0}};
  const Matrix test{{100.0}, {104.0}};
  const Matrix out = fit_scaler(train).apply(test);
  CHECK(out(0, 0) == 99.0);
  CHECK(out(1, 0) == 103.0);
}

TEST_CASE("scaler rejects degenerate input") {
  CHECK_THROWS_AS(fit_scaler(Matrix{{1.0, 2.0}}), DomainError);
  CHECK_THROWS_AS(fit_scaler(Matrix{{1.0, 2.0}, {1.0, 3.0}}), DomainError);
}

TEST_CASE("dataset CSV round trip") {
  const Dataset d = synthetic_dataset(2);
  std::ostringstream out;
  write_dataset_csv(out, d);
  const std::string text = out.str();
  CHECK(text.find("\nf,epsilon,delta,combo,label\n") != std::string::npos);
  CHECK(text.find('e' + std::string("-")) == std::string::npos);
  CHECK(text.find("E-") == std::string::npos);

  std::istringstream in(text);
  const Dataset back = read_dataset_csv(in);
  REQUIRE(back.size() == d.size());
  CHECK(back.config_digest == d.config_digest);
  CHECK(back.seed == d.seed);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.rows[i].f == d.rows[i].f);
    CHECK(back.rows[i].epsilon == d.rows[i].epsilon);
    CHECK(back.rows[i].delta == d.rows[i].delta);
    CHECK(back.rows[i].combo == d.rows[i].combo);
    CHECK(back.rows[i].label == d.rows[i].label);
  }
}

TEST_CASE("malformed dataset CSV is rejected") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset_csv(in);
  };
  CHECK_THROWS_AS(parse("a,b,c\n"), IoError);
  CHECK_THROWS_AS(parse(""), IoError);
  CHECK_THROWS_AS(parse("f,epsilon,delta,combo,label\n1,2\n"), IoError);
  CHECK_THROWS_AS(parse("f,epsilon,delta,combo,label\n0,0.1,0.001,z,1\n"), IoError);
  CHECK_THROWS_AS(parse("f,epsilon,delta,combo,label\n0,0.1,0.001,a,2\n"), IoError);
  CHECK_THROWS_AS(parse("f,epsilon,delta,combo,label\n1.0,0.1,0.001,a,1\n"), IoError);
  CHECK_THROWS_AS(parse("f,epsilon,delta,combo,label\nx,0.1,0.001,a,1\n"), IoError);
  CHECK(parse("f,epsilon,delta,combo,label\n0,0.1,0.001,a,1\n").size() == 1);
}
