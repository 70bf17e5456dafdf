#include "eepred/serialize.hpp"

#include <charconv>
#include <cstdio>

#include "eepred/error.hpp"

namespace eepred {

std::string format_double(double value) {
  char buf[512];
  const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (result.ec != std::errc{}) throw DomainError("format_double: value out of range");
  return std::string(buf, result.ptr);
}

std::string digest(const Json& doc) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Json to_json(const SystemParams& p) {
  return {{"f", p.f},          {"epsilon", p.epsilon},     {"delta", p.delta},
          {"lambda", p.lambda}, {"omega0_sq", p.omega0_sq}, {"omega_p", p.omega_p},
          {"alpha", p.alpha},   {"tau", p.tau},             {"omega_e", p.omega_e},
          {"g", p.g},           {"omega_cap_sq", p.omega_cap_sq()}};
}

Json to_json(const SimConfig& c) {
  return {{"dt", c.dt},
          {"t_end", c.t_end},
          {"t_transient", c.t_transient},
          {"x0", c.x0},
          {"v0", c.v0},
          {"history", c.history_value()},
          {"blowup_bound", c.blowup_bound}};
}

Json to_json(const QualifierConfig& c) {
  return {{"observable", std::string(to_string(c.observable))},
          {"min_peak", c.min_peak},
          {"few_peaks", c.policy == FewPeaksPolicy::kThrow ? "error" : "non-extreme"}};
}

Json to_json(const QualifierResult& r) {
  return {{"observable", std::string(to_string(r.observable))},
          {"mean_peak", r.mean_peak},
          {"sigma_peak", r.sigma_peak},
          {"threshold", r.threshold},
          {"n_peaks", r.n_peaks},
          {"n_exceedances", r.n_exceedances},
          {"label", r.extreme ? "extreme" : "non-extreme"},
          {"insufficient_peaks", r.insufficient_peaks}};
}

Json to_json(const RangeTable& ranges) {
  Json doc = Json::object();
  for (std::size_t i = 0; i < kCombinations.size(); ++i) {
    const Combination& c = kCombinations[i];
    Json entry = Json::object();
    if (!c.f_zero) entry["f"] = {ranges[i].f.lo, ranges[i].f.hi};
    if (!c.epsilon_zero) entry["epsilon"] = {ranges[i].epsilon.lo, ranges[i].epsilon.hi};
    if (!c.delta_zero) entry["delta"] = {ranges[i].delta.lo, ranges[i].delta.hi};
    doc[std::string(1, c.tag)] = entry;
  }
  return doc;
}

Json to_json(const GenerationConfig& c) {
  Json base = to_json(c.base);
  base.erase("f");
  base.erase("epsilon");
  base.erase("delta");
  return {{"system", base},
          {"sim", to_json(c.sim)},
          {"qualifier", to_json(c.qualifier)},
          {"ranges", to_json(c.ranges)},
          {"quota", c.quota},
          {"max_attempts", c.max_attempts},
          {"seed", c.seed}};
}

Json to_json(const Split& s) {
  return {{"seed", s.seed}, {"train_idx", s.train}, {"test_idx", s.test}};
}

Json to_json(const DistributionReport& r) {
  auto set = [](const SetCounts& c) {
    Json combos = Json::object();
    for (std::size_t i = 0; i < kCombinations.size(); ++i) {
      combos[std::string(1, kCombinations[i].tag)] = c.combos[i];
    }
    return Json{{"extreme", c.extreme}, {"non_extreme", c.non_extreme}, {"combos", combos}};
  };
  return {{"train", set(r.train)}, {"test", set(r.test)}};
}

namespace {

template <class T>
void overlay(const Json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

Range range_from(const Json& doc) {
  if (!doc.is_array() || doc.size() != 2) throw DomainError("range must be [lo, hi]");
  return {doc[0].get<double>(), doc[1].get<double>()};
}

}  // namespace

SystemParams system_params_from_json(const Json& doc, SystemParams p) {
  overlay(doc, "f", p.f);
  overlay(doc, "epsilon", p.epsilon);
  overlay(doc, "delta", p.delta);
  overlay(doc, "lambda", p.lambda);
  overlay(doc, "omega0_sq", p.omega0_sq);
  overlay(doc, "omega_p", p.omega_p);
  overlay(doc, "alpha", p.alpha);
  overlay(doc, "tau", p.tau);
  overlay(doc, "omega_e", p.omega_e);
  overlay(doc, "g", p.g);
  return p;
}

SimConfig sim_config_from_json(const Json& doc, SimConfig c) {
  overlay(doc, "dt", c.dt);
  overlay(doc, "t_end", c.t_end);
  overlay(doc, "t_transient", c.t_transient);
  overlay(doc, "x0", c.x0);
  overlay(doc, "v0", c.v0);
  if (doc.contains("history")) c.history = doc.at("history").get<double>();
  overlay(doc, "blowup_bound", c.blowup_bound);
  return c;
}

QualifierConfig qualifier_config_from_json(const Json& doc, QualifierConfig c) {
  if (doc.contains("observable")) c.observable = parse_observable(doc.at("observable").get<std::string>());
  overlay(doc, "min_peak", c.min_peak);
  if (doc.contains("few_peaks")) {
    const auto policy = doc.at("few_peaks").get<std::string>();
    if (policy == "error") {
      c.policy = FewPeaksPolicy::kThrow;
    } else if (policy == "non-extreme") {
      c.policy = FewPeaksPolicy::kNonExtreme;
    } else {
      throw DomainError("few_peaks must be 'error' or 'non-extreme'");
    }
  }
  return c;
}

RangeTable ranges_from_json(const Json& doc, RangeTable table) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key().size() != 1) throw DomainError("unknown combination '" + it.key() + "'");
    auto& entry = table[combination_index(it.key()[0])];
    const Json& value = it.value();
    if (value.contains("f")) entry.f = range_from(value.at("f"));
    if (value.contains("epsilon")) entry.epsilon = range_from(value.at("epsilon"));
    if (value.contains("delta")) entry.delta = range_from(value.at("delta"));
  }
  return table;
}

Split split_from_json(const Json& doc) {
  Split s;
  s.seed = doc.at("seed").get<std::uint64_t>();
  s.train = doc.at("train_idx").get<std::vector<std::size_t>>();
  s.test = doc.at("test_idx").get<std::vector<std::size_t>>();
  return s;
}

}  // namespace eepred
