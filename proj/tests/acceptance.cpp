// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any line fails.
//
//   acceptance [--artifacts DIR] [1 2 3 4 5 6 7 7d 8 9 | fast | full]
//
// "fast" is 1-6, 7d and 9; "full" is 7 and 8, which share one full-size
// dataset and experiment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eepred/config.hpp"
#include "eepred/error.hpp"
#include "eepred/forest.hpp"
#include "eepred/mlp.hpp"
#include "eepred/svm.hpp"

using namespace eepred;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(const std::string& id, const std::string& title, const Outcome& o, double seconds,
            std::optional<double> budget = std::nullopt) {
  Outcome out = o;
  if (budget && seconds > *budget) {
    out.pass = false;
    out.detail += "; over the time budget";
  }
  std::printf("%s  %-3s %-32s %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
              out.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

template <class Fn>
void run(const std::string& id, const std::string& title, std::optional<double> budget, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, title, o, secs, budget);
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

// 1. Printed confusion matrices and their metrics, in [[TN, FP], [FN, TP]]
// order followed by accuracy, precision, recall and F1.

struct PrintedRow {
  const char* model;
  int shuffle;
  ConfusionMatrix cm;
  double acc, pre, rec, f1;
};

const PrintedRow kPrinted[] = {
    {"LR", 1, {60, 20, 11, 59}, 0.79, 0.747, 0.843, 0.792},
    {"LR", 2, {58, 25, 5, 62}, 0.8, 0.713, 0.925, 0.806},
    {"LR", 3, {55, 23, 11, 61}, 0.77, 0.726, 0.847, 0.782},
    {"LR", 4, {56, 17, 21, 56}, 0.75, 0.767, 0.727, 0.747},
    {"LR", 5, {57, 13, 17, 63}, 0.8, 0.829, 0.788, 0.808},
    {"SVM", 1, {63, 17, 2, 68}, 0.87, 0.8, 0.971, 0.877},
    {"SVM", 2, {62, 21, 2, 65}, 0.85, 0.756, 0.97, 0.849},
    {"SVM", 3, {52, 26, 17, 55}, 0.713, 0.679, 0.764, 0.719},
    {"SVM", 4, {57, 16, 2, 75}, 0.88, 0.824, 0.974, 0.893},
    {"SVM", 5, {56, 14, 6, 74}, 0.87, 0.841, 0.925, 0.881},
    {"RF", 1, {72, 8, 0, 70}, 0.94, 0.897, 1.0, 0.946},
    {"RF", 2, {66, 17, 2, 65}, 0.87, 0.793, 0.97, 0.872},
    {"RF", 3, {66, 12, 36, 36}, 0.68, 0.75, 0.5, 0.6},
    {"RF", 4, {71, 2, 7, 70}, 0.94, 0.972, 0.909, 0.939},
    {"RF", 5, {66, 4, 3, 77}, 0.95, 0.951, 0.963, 0.957},
    {"MLP", 1, {80, 0, 1, 69}, 0.99, 1.0, 0.986, 0.993},
    {"MLP", 2, {77, 6, 5, 62}, 0.93, 0.912, 0.925, 0.919},
    {"MLP", 3, {72, 6, 9, 63}, 0.9, 0.913, 0.875, 0.894},
    {"MLP", 4, {64, 9, 7, 70}, 0.89, 0.886, 0.909, 0.897},
    {"MLP", 5, {69, 1, 3, 77}, 0.97, 0.99, 0.96, 0.975},
};

Outcome criterion_metric_oracle() {
  int matched = 0, total = 0;
  std::string misses;
  for (const auto& row : kPrinted) {
    const MetricSet m = metrics(row.cm);
    const double got[4] = {m.accuracy, m.precision, m.recall, m.f1};
    const double want[4] = {row.acc, row.pre, row.rec, row.f1};
    const char* names[4] = {"acc", "pre", "rec", "f1"};
    for (int k = 0; k < 4; ++k) {
      ++total;
      if (std::abs(got[k] - want[k]) <= 0.005) {
        ++matched;
      } else {
        char buf[128];
        std::snprintf(buf, sizeof buf, " %s#%d %s computed %.4f printed %.3g;", row.model, row.shuffle,
                      names[k], got[k], want[k]);
        misses += buf;
      }
    }
  }
  std::string detail = std::to_string(matched) + "/" + std::to_string(total) + " within 0.005";
  if (!misses.empty()) detail += " (mismatch:" + misses + ")";
  return {matched == total, detail};
}

// 2. Labels of the twelve example trajectories.

struct Panel {
  char name;
  double f, epsilon, delta;
  int label;
};

const Panel kPanels[] = {
    {'a', 0.0, 0.081, 5e-4, 1},  {'b', 0.0, 0.1, 5e-4, 0},   {'c', 3.055, 0.0, 0.019, 1},
    {'d', 3.055, 0.0, 0.04, 0},  {'e', 3.1665, 0.0, 0.0, 1}, {'f', 1.8, 0.0, 0.0, 0},
    {'g', 1.0, 0.081, 0.0, 1},   {'h', 1.8, 0.081, 0.0, 0},  {'i', 0.0, 0.081, 0.0, 1},
    {'j', 0.0, 0.05, 0.0, 0},    {'k', 0.001, 0.081, 5e-4, 1}, {'l', 0.1, 0.081, 5e-4, 0},
};

int panel_label(const Panel& p, SystemParams base, const SimConfig& sim) {
  base.f = p.f;
  base.epsilon = p.epsilon;
  base.delta = p.delta;
  const QualifierConfig q{Observable::kPosition, 1e-6, FewPeaksPolicy::kNonExtreme};
  try {
    return simulate_and_classify(base, sim, q).label();
  } catch (const DivergenceError&) {
    return -1;
  }
}

Outcome criterion_fig1_labels() {
  struct Variant {
    const char* name;
    double g, x0, v0, t_end;
  };
  const Variant variants[] = {
      {"default", 9.8, 0.1, 0.1, 5000},     {"g=9.81", 9.81, 0.1, 0.1, 5000},
      {"g=10", 10.0, 0.1, 0.1, 5000},       {"ic=(0.5,0)", 9.8, 0.5, 0.0, 5000},
      {"ic=(0,0.5)", 9.8, 0.0, 0.5, 5000},  {"t_end=50000", 9.8, 0.1, 0.1, 50000},
  };
  int matched = 0;
  std::string mismatched;
  std::printf("      sensitivity (label per panel a..l, want ");
  for (const auto& p : kPanels) std::printf("%d", p.label);
  std::printf("):\n");
  for (std::size_t v = 0; v < std::size(variants); ++v) {
    SystemParams base;
    base.g = variants[v].g;
    SimConfig sim;
    sim.x0 = variants[v].x0;
    sim.v0 = variants[v].v0;
    sim.t_end = variants[v].t_end;
    std::string labels;
    int hits = 0;
    for (const auto& p : kPanels) {
      const int got = panel_label(p, base, sim);
      labels += got < 0 ? 'D' : static_cast<char>('0' + got);
      hits += got == p.label;
      if (v == 0 && got != p.label) mismatched += p.name;
    }
    if (v == 0) matched = hits;
    std::printf("      %-12s %s  %d/12\n", variants[v].name, labels.c_str(), hits);
  }
  std::string detail = std::to_string(matched) + "/12 labels reproduced, need 10";
  if (!mismatched.empty()) detail += " (mismatched panels " + mismatched + ")";
  return {matched >= 10, detail};
}

// 3. Harmonic reduction: with lambda -> 0, g = 0, alpha = 0 and no drives
// the motion is x'' = -0.25 x, so x(t) = cos(0.5 t) from (1, 0).

double harmonic_error(double dt) {
  SystemParams p;
  p.lambda = 1e-300;
  p.g = 0.0;
  p.alpha = 0.0;
  SimConfig c;
  c.dt = dt;
  c.t_end = 100.0;
  c.t_transient = 0.0;
  c.x0 = 1.0;
  c.v0 = 0.0;
  const Trajectory t = integrate(p, c);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t.x[i] - std::cos(0.5 * t.t[i])));
  return worst;
}

Outcome criterion_integrator() {
  const double coarse = harmonic_error(0.01);
  const double fine = harmonic_error(0.005);
  const double ratio = coarse / fine;
  return {coarse < 1e-6 && ratio >= 12.0, fmt("max error %.3e", coarse) + fmt(", halving dt gains %.2fx", ratio)};
}

// 4. Gradient check.

Outcome criterion_gradient() {
  MLPModel m = MLPModel::glorot({3, 6, 5, 1}, 2024);
  Rng rng(77);
  for (auto& w : m.params()) w += rng.uniform(-0.05, 0.05);
  Matrix X(0, 3);
  Labels y;
  for (int i = 0; i < 16; ++i) {
    const double row[3] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    X.append_row(row);
    y.push_back(row[0] + row[1] * row[2] > 0 ? 1 : 0);
  }
  const GradientResult g = mlp_grad(m, X, y);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t k = rng.below(m.n_params());
    const double saved = m.params()[k];
    m.params()[k] = saved + h;
    const double up = mlp_grad(m, X, y).loss;
    m.params()[k] = saved - h;
    const double down = mlp_grad(m, X, y).loss;
    m.params()[k] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(g.gradient[k]), std::abs(numeric), 1e-10});
    worst = std::max(worst, std::abs(g.gradient[k] - numeric) / scale);
  }
  return {worst < 1e-5, fmt("worst relative difference %.2e over 10 coordinates", worst)};
}

// 5. SVM KKT. The generated dataset comes from the determinism fixture.

struct KktSummary {
  double min_alpha = 1e300;
  double max_alpha_over_c = 0.0;
  double max_equality = 0.0;
  std::size_t models = 0;
};

void add_kkt(KktSummary& k, const SVMModel& m) {
  double sum = 0.0;
  for (double a : m.dual_coef) {
    sum += a;
    k.min_alpha = std::min(k.min_alpha, std::abs(a));
    k.max_alpha_over_c = std::max(k.max_alpha_over_c, std::abs(a) / m.C);
  }
  k.max_equality = std::max(k.max_equality, std::abs(sum));
  ++k.models;
}

// 6. Random forest oracle on XOR.

double exhaustive_best(const Matrix& X, const Labels& y, const std::vector<std::size_t>& rows, int depth) {
  std::size_t ones = 0;
  for (std::size_t r : rows) ones += static_cast<std::size_t>(y[r]);
  double best = static_cast<double>(std::max(ones, rows.size() - ones));
  if (depth == 0) return best;
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::set<double> values;
    for (std::size_t r : rows) values.insert(X(r, f));
    for (auto it = values.begin(); it != values.end() && std::next(it) != values.end(); ++it) {
      const double t = 0.5 * (*it + *std::next(it));
      std::vector<std::size_t> left, right;
      for (std::size_t r : rows) (X(r, f) <= t ? left : right).push_back(r);
      best = std::max(best, exhaustive_best(X, y, left, depth - 1) + exhaustive_best(X, y, right, depth - 1));
    }
  }
  return best;
}

Outcome criterion_rf_oracle() {
  const Matrix X{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const Labels y{0, 1, 1, 0};
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const double oracle_depth1 = exhaustive_best(X, y, all, 1);
  const double oracle_depth2 = exhaustive_best(X, y, all, 2);

  RFConfig rc;
  rc.n_trees = 1;
  rc.bootstrap = false;
  rc.max_features = 2;
  rc.seed = 99;
  const RFModel forest = rf_train(X, y, rc);
  Rng rng(derive_seed(rc.seed, {0}));
  const DecisionTree tree = tree_train(X, y, rng, TreeConfig{0, 1});

  std::size_t correct = 0;
  for (std::size_t i = 0; i < 4; ++i) correct += tree.predict(X.row(i)) == y[i];
  bool same = true;
  Rng probe(5);
  for (int i = 0; i < 2000 && same; ++i) {
    const double x[2] = {probe.uniform(-0.5, 1.5), probe.uniform(-0.5, 1.5)};
    same = rf_predict(forest, x).label == tree.predict(x);
  }
  for (std::size_t i = 0; i < 4 && same; ++i) same = rf_predict(forest, X.row(i)).label == tree.predict(X.row(i));

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "tree %zu/4 (exhaustive: depth1 %.0f/4, depth2 %.0f/4); 1-tree forest %s the tree on 2004 inputs",
                correct, oracle_depth1, oracle_depth2, same ? "equals" : "differs from");
  return {correct == 4 && oracle_depth2 == 4.0 && same, buf};
}

// 7, 8 and 9 run the full pipeline.

struct PipelineRun {
  std::string dataset_csv;
  std::map<std::string, std::string> models;
  std::string report_json;
  ExperimentReport report;
  std::vector<SVMModel> svms;
  std::optional<TrainLog> first_mlp_log;
  double gen_seconds = 0.0;
  double experiment_seconds = 0.0;
};

PipelineRun run_pipeline(const RunConfig& config) {
  PipelineRun out;
  auto t0 = std::chrono::steady_clock::now();
  const Dataset d = generate_dataset(config.generation());
  out.gen_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream csv;
  write_dataset_csv(csv, d);
  out.dataset_csv = csv.str();

  std::mutex m;
  auto observer = [&](const ExperimentCell& cell, const TrainedModel& model) {
    std::lock_guard lock(m);
    out.models[std::to_string(cell.shuffle) + "_" + to_string(cell.model)] = to_json(model).dump(1);
    if (model.kind == ModelKind::kSVM) out.svms.push_back(std::get<SVMModel>(model.parameters));
    if (model.log && cell.shuffle == 1) out.first_mlp_log = model.log;
  };
  t0 = std::chrono::steady_clock::now();
  std::istringstream in(out.dataset_csv);
  out.report = run_experiment(read_dataset_csv(in), config.experiment(), observer);
  out.experiment_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.report_json = to_json(out.report).dump(2);
  return out;
}

void save_artifacts(const fs::path& dir, const PipelineRun& run) {
  fs::create_directories(dir);
  std::ofstream(dir / "dataset.csv") << run.dataset_csv;
  std::ofstream(dir / "report.json") << run.report_json << '\n';
  std::ofstream(dir / "report.txt") << render_report_table(run.report);
}

std::string means_line(const ExperimentReport& r) {
  std::string s = "mean accuracy";
  for (const auto& sum : r.summaries) s += " " + to_string(sum.model) + fmt("=%.3f", sum.accuracy.mean);
  return s;
}

Outcome ordering_outcome(const ExperimentReport& r, bool full) {
  const double lr = r.summary(ModelKind::kLR).accuracy.mean;
  const double mlp = r.summary(ModelKind::kMLP).accuracy.mean;
  bool ok = mlp >= lr;
  if (full) {
    for (const auto& s : r.summaries) ok = ok && s.accuracy.mean >= 0.6;
    ok = ok && mlp >= 0.85;
  }
  return {ok, means_line(r)};
}

Outcome training_curve_outcome(const TrainLog& log) {
  if (log.size() < 100) return {false, "train log has " + std::to_string(log.size()) + " epochs"};
  const double first = log.front().loss;
  const double last = log[99].loss;
  std::vector<double> blocks;
  for (std::size_t b = 0; b + 20 <= log.size(); b += 20) {
    double acc = 0.0;
    for (std::size_t e = b; e < b + 20; ++e) acc += log[e].train_accuracy;
    blocks.push_back(acc / 20.0);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < blocks.size(); ++i) monotone = monotone && blocks[i] >= blocks[i - 1];
  std::string detail = fmt("loss epoch 1 %.4f", first) + fmt(", epoch 100 %.4f", last) +
                       fmt(" (ratio %.3f); 20-epoch accuracy means", last / first);
  for (double b : blocks) detail += fmt(" %.3f", b);
  return {last <= 0.5 * first && monotone, detail};
}

RunConfig determinism_config() {
  RunConfig c;
  apply_desk_scale(c);
  c.quota = 3;
  c.shuffle_seeds = {1, 2};
  c.model_configs.rf.n_trees = 30;
  c.model_configs.mlp.epochs = 10;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path artifacts = "acceptance_artifacts";
  std::set<std::string> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--artifacts" && i + 1 < argc) {
      artifacts = argv[++i];
    } else if (arg == "fast") {
      for (const char* id : {"1", "2", "3", "4", "5", "6", "7d", "9"}) wanted.insert(id);
    } else if (arg == "full") {
      wanted.insert("7");
      wanted.insert("8");
    } else {
      wanted.insert(arg);
    }
  }
  if (wanted.empty()) {
    for (const char* id : {"1", "2", "3", "4", "5", "6", "7", "7d", "8", "9"}) wanted.insert(id);
  }
  auto want = [&](const char* id) { return wanted.count(id) > 0; };

  if (want("1")) run("1", "metric oracle vs printed table", 1.0, criterion_metric_oracle);
  if (want("2")) run("2", "example trajectory labels", 300.0, criterion_fig1_labels);
  if (want("3")) run("3", "integrator harmonic reduction", std::nullopt, criterion_integrator);
  if (want("4")) run("4", "MLP gradient check", std::nullopt, criterion_gradient);

  std::optional<PipelineRun> det_a;
  if (want("5") || want("9")) {
    RunConfig c = determinism_config();
    c.workers = 1;
    det_a = run_pipeline(c);
  }
  if (want("5")) {
    run("5", "SVM KKT suite", std::nullopt, [&]() -> Outcome {
      KktSummary k;
      for (const auto& m : det_a->svms) add_kkt(k, m);
      const bool feasible = k.models > 0 && k.min_alpha >= 0.0 && k.max_alpha_over_c <= 1.0 &&
                            k.max_equality < 1e-6;
      Matrix X2{{1, 0, 0}, {-1, 0, 0}};
      const SVMModel two = svm_train(X2, Labels{1, 0}, SVMConfig{1.0, 1.0});
      const bool exact = two.dual_coef.size() == 2 && std::abs(two.dual_coef[0]) == 1.0 &&
                         std::abs(two.dual_coef[1]) == 1.0 && two.bias == 0.0;
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "%zu trained SVMs: min alpha %.3g, max alpha/C %.3g, max |sum alpha y| %.1e; two-point problem %s",
                    k.models, k.min_alpha, k.max_alpha_over_c, k.max_equality, exact ? "exact" : "NOT exact");
      return {feasible && exact, buf};
    });
  }
  if (want("6")) run("6", "random forest XOR oracle", std::nullopt, criterion_rf_oracle);

  if (want("7d")) {
    run("7d", "desk-scale run ordering", 300.0, [&]() -> Outcome {
      RunConfig c;
      apply_desk_scale(c);
      const PipelineRun r = run_pipeline(c);
      save_artifacts(artifacts / "desk", r);
      Outcome o = ordering_outcome(r.report, false);
      o.detail += fmt("; generation %.0f s", r.gen_seconds) + fmt(", experiment %.0f s", r.experiment_seconds);
      return o;
    });
  }

  if (want("7") || want("8")) {
    std::optional<PipelineRun> full;
    run("7", "full-size end-to-end run", 7200.0, [&]() -> Outcome {
      full = run_pipeline(RunConfig{});
      save_artifacts(artifacts / "full", *full);
      Outcome o = ordering_outcome(full->report, true);
      o.detail += fmt("; generation %.0f s", full->gen_seconds) + fmt(", experiment %.0f s", full->experiment_seconds);
      return o;
    });
    if (want("8")) {
      run("8", "MLP training curve", std::nullopt, [&]() -> Outcome {
        if (!full || !full->first_mlp_log) return {false, "full-size run produced no MLP log"};
        return training_curve_outcome(*full->first_mlp_log);
      });
    }
  }

  if (want("9")) {
    run("9", "pipeline determinism", std::nullopt, [&]() -> Outcome {
      RunConfig c = determinism_config();
      c.workers = 2;
      const PipelineRun b = run_pipeline(c);
      const bool same_csv = det_a->dataset_csv == b.dataset_csv;
      const bool same_models = det_a->models == b.models;
      const bool same_report = det_a->report_json == b.report_json;
      std::string detail = "workers 1 vs 2: dataset " + std::string(same_csv ? "identical" : "DIFFERS") +
                           ", " + std::to_string(b.models.size()) + " model files " +
                           (same_models ? "identical" : "DIFFER") + ", report " +
                           (same_report ? "identical" : "DIFFERS");
      return {same_csv && same_models && same_report && !b.models.empty(), detail};
    });
  }

  return g_failures == 0 ? 0 : 1;
}
