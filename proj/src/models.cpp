#include "eepred/models.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "eepred/version.hpp"

namespace eepred {

namespace {

constexpr int kFormatVersion = 1;

Json tree_node_json(const DecisionTree& tree, int id) {
  const TreeNode& node = tree.nodes[id];
  Json out = {{"counts", {node.counts[0], node.counts[1]}}};
  if (!node.is_leaf()) {
    out["feature"] = node.feature;
    out["threshold"] = node.threshold;
    out["left"] = tree_node_json(tree, node.left);
    out["right"] = tree_node_json(tree, node.right);
  }
  return out;
}

int tree_node_from_json(const Json& doc, DecisionTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  const auto counts = doc.at("counts");
  tree.nodes[id].counts = {counts.at(0).get<std::uint32_t>(), counts.at(1).get<std::uint32_t>()};
  if (doc.contains("feature")) {
    const int feature = doc.at("feature").get<int>();
    if (feature < 0) throw IoError("model file: negative split feature");
    tree.nodes[id].feature = feature;
    tree.nodes[id].threshold = doc.at("threshold").get<double>();
    const int l = tree_node_from_json(doc.at("left"), tree);
    tree.nodes[id].left = l;
    const int r = tree_node_from_json(doc.at("right"), tree);
    tree.nodes[id].right = r;
  }
  return id;
}

Json parameters_json(const LRModel& m) {
  return {{"weights", m.weights},
          {"intercept", m.intercept},
          {"threshold", m.threshold},
          {"iterations", m.iterations}};
}

Json parameters_json(const SVMModel& m) {
  Json sv = Json::array();
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
    const auto row = m.support_vectors.row(i);
    sv.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"width", m.width},
          {"C", m.C},
          {"bias", m.bias},
          {"iterations", m.iterations},
          {"kkt_violation", m.kkt_violation},
          {"dual_coef", m.dual_coef},
          {"support_vectors", sv}};
}

Json parameters_json(const RFModel& m) {
  Json trees = Json::array();
  for (const auto& tree : m.trees) trees.push_back(tree_node_json(tree, 0));
  return {{"max_features", m.max_features},
          {"min_leaf", m.min_leaf},
          {"bootstrap", m.bootstrap},
          {"tree_seeds", m.tree_seeds},
          {"trees", trees}};
}

Json parameters_json(const MLPModel& m) {
  Json layers = Json::array();
  const auto& sizes = m.layer_sizes();
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const auto W = m.weights(l);
    const auto b = m.biases(l);
    Json rows = Json::array();
    for (std::size_t r = 0; r < sizes[l]; ++r) {
      rows.push_back(std::vector<double>(W.begin() + r * sizes[l - 1],
                                         W.begin() + (r + 1) * sizes[l - 1]));
    }
    layers.push_back({{"in", sizes[l - 1]},
                      {"out", sizes[l]},
                      {"weights", rows},
                      {"biases", std::vector<double>(b.begin(), b.end())}});
  }
  return {{"layers", layers}};
}

LRModel lr_from_json(const Json& p) {
  LRModel m;
  m.weights = p.at("weights").get<std::vector<double>>();
  m.intercept = p.at("intercept").get<double>();
  m.threshold = p.at("threshold").get<double>();
  m.iterations = p.value("iterations", std::size_t{0});
  return m;
}

SVMModel svm_from_json(const Json& p) {
  SVMModel m;
  m.width = p.at("width").get<double>();
  m.C = p.at("C").get<double>();
  m.bias = p.at("bias").get<double>();
  m.iterations = p.value("iterations", std::size_t{0});
  m.kkt_violation = p.value("kkt_violation", 0.0);
  m.dual_coef = p.at("dual_coef").get<std::vector<double>>();
  for (const auto& row : p.at("support_vectors")) {
    m.support_vectors.append_row(row.get<std::vector<double>>());
  }
  m.validate();
  return m;
}

RFModel rf_from_json(const Json& p, std::uint64_t seed) {
  RFModel m;
  m.seed = seed;
  m.max_features = p.at("max_features").get<std::size_t>();
  m.min_leaf = p.at("min_leaf").get<std::size_t>();
  m.bootstrap = p.at("bootstrap").get<bool>();
  m.tree_seeds = p.at("tree_seeds").get<std::vector<std::uint64_t>>();
  for (const auto& t : p.at("trees")) {
    DecisionTree tree;
    tree_node_from_json(t, tree);
    m.trees.push_back(std::move(tree));
  }
  if (m.trees.empty()) throw IoError("model file: random forest without trees");
  return m;
}

MLPModel mlp_from_json(const Json& p) {
  const auto& layers = p.at("layers");
  if (layers.empty()) throw IoError("model file: MLP without layers");
  std::vector<std::size_t> sizes{layers.at(0).at("in").get<std::size_t>()};
  for (const auto& layer : layers) {
    if (layer.at("in").get<std::size_t>() != sizes.back()) {
      throw IoError("model file: MLP layer shapes do not chain");
    }
    sizes.push_back(layer.at("out").get<std::size_t>());
  }
  MLPModel m(sizes);
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const auto& layer = layers.at(l - 1);
    auto W = m.weights(l);
    auto b = m.biases(l);
    const auto& rows = layer.at("weights");
    if (rows.size() != sizes[l]) throw IoError("model file: MLP weight rows mismatch");
    for (std::size_t r = 0; r < sizes[l]; ++r) {
      const auto row = rows.at(r).get<std::vector<double>>();
      if (row.size() != sizes[l - 1]) throw IoError("model file: MLP weight columns mismatch");
      std::copy(row.begin(), row.end(), W.begin() + r * sizes[l - 1]);
    }
    const auto bias = layer.at("biases").get<std::vector<double>>();
    if (bias.size() != sizes[l]) throw IoError("model file: MLP bias length mismatch");
    std::copy(bias.begin(), bias.end(), b.begin());
  }
  return m;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLR: return "LR";
    case ModelKind::kSVM: return "SVM";
    case ModelKind::kRF: return "RF";
    case ModelKind::kMLP: return "MLP";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (ModelKind k : kAllModels) {
    if (to_string(k) == upper) return k;
  }
  throw DomainError("unknown model type '" + std::string(name) + "' (expected lr, svm, rf or mlp)");
}

Json hyperparams_json(ModelKind kind, const ModelConfigs& c) {
  switch (kind) {
    case ModelKind::kLR:
      return {{"learning_rate", c.lr.learning_rate},
              {"tolerance", c.lr.tolerance},
              {"max_iterations", c.lr.max_iterations},
              {"threshold", c.lr.threshold}};
    case ModelKind::kSVM:
      return {{"C", c.svm.C},
              {"width", c.svm.width ? Json(*c.svm.width) : Json(nullptr)},
              {"tolerance", c.svm.tolerance},
              {"max_iterations", c.svm.max_iterations}};
    case ModelKind::kRF:
      return {{"n_trees", c.rf.n_trees},
              {"max_features", c.rf.max_features},
              {"min_leaf", c.rf.min_leaf},
              {"bootstrap", c.rf.bootstrap},
              {"seed", c.rf.seed}};
    case ModelKind::kMLP:
      return {{"layers", c.mlp.layers},
              {"epochs", c.mlp.epochs},
              {"batch_size", c.mlp.batch_size},
              {"learning_rate", c.mlp.adam.learning_rate},
              {"beta1", c.mlp.adam.beta1},
              {"beta2", c.mlp.adam.beta2},
              {"epsilon", c.mlp.adam.epsilon},
              {"seed", c.mlp.seed}};
  }
  return Json::object();
}

ModelConfigs model_configs_from_json(const Json& doc, ModelConfigs base) {
  if (doc.contains("lr")) {
    const auto& d = doc["lr"];
    base.lr.learning_rate = d.value("learning_rate", base.lr.learning_rate);
    base.lr.tolerance = d.value("tolerance", base.lr.tolerance);
    base.lr.max_iterations = d.value("max_iterations", base.lr.max_iterations);
    base.lr.threshold = d.value("threshold", base.lr.threshold);
  }
  if (doc.contains("svm")) {
    const auto& d = doc["svm"];
    base.svm.C = d.value("C", base.svm.C);
    if (d.contains("width")) {
      if (d["width"].is_null()) base.svm.width.reset();
      else base.svm.width = d["width"].get<double>();
    }
    base.svm.tolerance = d.value("tolerance", base.svm.tolerance);
    base.svm.max_iterations = d.value("max_iterations", base.svm.max_iterations);
  }
  if (doc.contains("rf")) {
    const auto& d = doc["rf"];
    base.rf.n_trees = d.value("n_trees", base.rf.n_trees);
    base.rf.max_features = d.value("max_features", base.rf.max_features);
    base.rf.min_leaf = d.value("min_leaf", base.rf.min_leaf);
    base.rf.bootstrap = d.value("bootstrap", base.rf.bootstrap);
    base.rf.seed = d.value("seed", base.rf.seed);
  }
  if (doc.contains("mlp")) {
    const auto& d = doc["mlp"];
    base.mlp.layers = d.value("layers", base.mlp.layers);
    base.mlp.epochs = d.value("epochs", base.mlp.epochs);
    base.mlp.batch_size = d.value("batch_size", base.mlp.batch_size);
    base.mlp.adam.learning_rate = d.value("learning_rate", base.mlp.adam.learning_rate);
    base.mlp.adam.beta1 = d.value("beta1", base.mlp.adam.beta1);
    base.mlp.adam.beta2 = d.value("beta2", base.mlp.adam.beta2);
    base.mlp.adam.epsilon = d.value("epsilon", base.mlp.adam.epsilon);
    base.mlp.seed = d.value("seed", base.mlp.seed);
  }
  return base;
}

TrainedModel train_model(ModelKind kind, const ModelConfigs& configs, const Matrix& X,
                         const Labels& y) {
  TrainedModel out;
  out.kind = kind;
  out.hyperparams = hyperparams_json(kind, configs);
  switch (kind) {
    case ModelKind::kLR:
      out.parameters = lr_train(X, y, configs.lr);
      break;
    case ModelKind::kSVM:
      out.parameters = svm_train(X, y, configs.svm);
      break;
    case ModelKind::kRF:
      out.seed = configs.rf.seed;
      out.parameters = rf_train(X, y, configs.rf);
      break;
    case ModelKind::kMLP: {
      out.seed = configs.mlp.seed;
      auto result = mlp_train(X, y, configs.mlp);
      out.parameters = std::move(result.model);
      out.log = std::move(result.log);
      break;
    }
  }
  return out;
}

Prediction predict(const TrainedModel& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LRModel>) return lr_predict(m, x);
        else if constexpr (std::is_same_v<T, SVMModel>) return svm_predict(m, x);
        else if constexpr (std::is_same_v<T, RFModel>) return rf_predict(m, x);
        else return mlp_predict(m, x);
      },
      model.parameters);
}

Labels predict_labels(const TrainedModel& model, const Matrix& X) {
  Labels out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict(model, X.row(i)).label;
  return out;
}

Json to_json(const TrainedModel& model) {
  Json parameters = std::visit([](const auto& m) { return parameters_json(m); }, model.parameters);
  return {{"format_version", kFormatVersion},
          {"tool_version", kVersion},
          {"model_type", to_string(model.kind)},
          {"hyperparams", model.hyperparams},
          {"seed", model.seed},
          {"parameters", parameters}};
}

TrainedModel model_from_json(const Json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw IoError("model file: unsupported format_version");
    }
    TrainedModel out;
    out.kind = parse_model_kind(doc.at("model_type").get<std::string>());
    out.hyperparams = doc.value("hyperparams", Json::object());
    out.seed = doc.value("seed", std::uint64_t{0});
    const Json& p = doc.at("parameters");
    switch (out.kind) {
      case ModelKind::kLR: out.parameters = lr_from_json(p); break;
      case ModelKind::kSVM: out.parameters = svm_from_json(p); break;
      case ModelKind::kRF: out.parameters = rf_from_json(p, out.seed); break;
      case ModelKind::kMLP: out.parameters = mlp_from_json(p); break;
    }
    return out;
  } catch (const Json::exception& e) {
    throw IoError(std::string("model file: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("model file: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << to_json(model).dump(1) << '\n';
  if (!out) throw IoError("failed writing model file " + path.string());
}

TrainedModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

void write_train_log_csv(const std::filesystem::path& path, const TrainLog& log,
                         std::string_view config_digest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write train log " + path.string());
  out << "# eepred train_log config_digest=" << config_digest << " epochs=" << log.size() << '\n';
  out << "epoch,loss,train_accuracy\n";
  for (const auto& r : log) {
    out << r.epoch << ',' << format_double(r.loss) << ',' << format_double(r.train_accuracy) << '\n';
  }
  if (!out) throw IoError("failed writing train log " + path.string());
}

TrainLog read_train_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open train log " + path.string());
  TrainLog log;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "epoch,loss,train_accuracy") throw IoError("train log: unexpected header");
      header = true;
      continue;
    }
    std::istringstream fields(line);
    std::string epoch, loss, acc;
    if (!std::getline(fields, epoch, ',') || !std::getline(fields, loss, ',') ||
        !std::getline(fields, acc)) {
      throw IoError("train log: malformed row '" + line + "'");
    }
    try {
      log.push_back({std::stoul(epoch), std::stod(loss), std::stod(acc)});
    } catch (const std::exception&) {
      throw IoError("train log: malformed row '" + line + "'");
    }
  }
  if (!header) throw IoError("train log: missing header");
  return log;
}

}  // namespace eepred
