#include "eepred/config.hpp"

#include <fstream>
#include <sstream>

#include "eepred/error.hpp"

namespace eepred {

GenerationConfig RunConfig::generation() const {
  GenerationConfig g;
  g.base = system;
  g.sim = sim;
  g.sim.t_end = data_t_end;
  g.sim.t_transient = data_t_transient;
  g.qualifier = qualifier;
  g.ranges = ranges;
  g.quota = quota;
  g.max_attempts = max_attempts;
  g.seed = data_seed;
  g.workers = workers;
  return g;
}

ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig e;
  e.shuffle_seeds = shuffle_seeds;
  e.models = models;
  e.model_configs = model_configs;
  e.train_fraction = train_fraction;
  e.workers = workers;
  return e;
}

void apply_desk_scale(RunConfig& c) {
  c.quota = 10;
  c.data_t_end = 20000.0;
  c.data_t_transient = 2500.0;
  c.model_configs.rf.n_trees = 100;
  c.model_configs.mlp.epochs = 30;
}

Json to_json(const RunConfig& c) {
  Json system = to_json(c.system);
  system.erase("omega_cap_sq");
  Json models = Json::array();
  for (ModelKind kind : c.models) models.push_back(to_string(kind));
  Json hyper = Json::object();
  hyper["lr"] = hyperparams_json(ModelKind::kLR, c.model_configs);
  hyper["svm"] = hyperparams_json(ModelKind::kSVM, c.model_configs);
  hyper["rf"] = hyperparams_json(ModelKind::kRF, c.model_configs);
  hyper["mlp"] = hyperparams_json(ModelKind::kMLP, c.model_configs);
  return {{"system", system},
          {"sim", to_json(c.sim)},
          {"qualifier", to_json(c.qualifier)},
          {"data",
           {{"t_end", c.data_t_end},
            {"t_transient", c.data_t_transient},
            {"ranges", to_json(c.ranges)},
            {"quota", c.quota},
            {"max_attempts", c.max_attempts},
            {"seed", c.data_seed}}},
          {"experiment",
           {{"shuffle_seeds", c.shuffle_seeds},
            {"models", models},
            {"train_fraction", c.train_fraction}}},
          {"models", hyper},
          {"output_dir", c.output_dir}};
}

namespace {

void check_known_keys(const Json& doc, const Json& reference, const std::string& path) {
  if (!doc.is_object()) return;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!reference.contains(it.key())) throw DomainError("unknown config key '" + key + "'");
    const Json& ref = reference.at(it.key());
    if (ref.is_object()) {
      if (!it.value().is_object()) throw DomainError("config key '" + key + "' must be an object");
      check_known_keys(it.value(), ref, key);
    }
  }
}

template <class T>
void overlay(const Json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json(const Json& doc, RunConfig c) {
  if (!doc.is_object()) throw DomainError("config document must be an object");
  check_known_keys(doc, to_json(c), "");
  try {
    const Json empty = Json::object();
    auto section = [&](const char* key) -> const Json& {
      return doc.contains(key) ? doc.at(key) : empty;
    };
    c.system = system_params_from_json(section("system"), c.system);
    c.sim = sim_config_from_json(section("sim"), c.sim);
    c.qualifier = qualifier_config_from_json(section("qualifier"), c.qualifier);

    const Json& data = section("data");
    overlay(data, "t_end", c.data_t_end);
    overlay(data, "t_transient", c.data_t_transient);
    if (data.contains("ranges")) c.ranges = ranges_from_json(data.at("ranges"), c.ranges);
    overlay(data, "quota", c.quota);
    overlay(data, "max_attempts", c.max_attempts);
    overlay(data, "seed", c.data_seed);

    const Json& exp = section("experiment");
    overlay(exp, "shuffle_seeds", c.shuffle_seeds);
    if (exp.contains("models")) {
      c.models.clear();
      for (const auto& name : exp.at("models")) c.models.push_back(parse_model_kind(name.get<std::string>()));
    }
    overlay(exp, "train_fraction", c.train_fraction);

    c.model_configs = model_configs_from_json(section("models"), c.model_configs);
    overlay(doc, "output_dir", c.output_dir);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string config_digest(const RunConfig& config) { return digest(to_json(config)); }

RunConfig read_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw IoError("malformed config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(doc, std::move(base));
}

void write_run_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw DomainError("override must look like key.path=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json patch = Json::object();
  Json* node = &patch;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> names;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw DomainError("empty component in override key '" + key + "'");
    names.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < names.size(); ++i) node = &(*node)[names[i]];
  (*node)[names.back()] = value;

  config = run_config_from_json(patch, config);
}

}  // namespace eepred
