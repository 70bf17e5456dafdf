#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "eepred/config.hpp"
#include "eepred/error.hpp"
#include "eepred/version.hpp"

namespace py = pybind11;
using namespace eepred;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

RunConfig config_from(const std::string& json_text) {
  return run_config_from_json(Json::parse(json_text));
}

py::dict simulate(const std::string& config_json) {
  const RunConfig c = config_from(config_json);
  const Trajectory traj = integrate(c.system, c.sim);
  py::dict out;
  out["t"] = to_array(traj.t);
  out["x"] = to_array(traj.x);
  out["v"] = to_array(traj.v);
  out["transient_cut_index"] = traj.transient_cut_index;
  return out;
}

std::string classify(const std::string& config_json) {
  const RunConfig c = config_from(config_json);
  return to_json(simulate_and_classify(c.system, c.sim, c.qualifier)).dump();
}

std::string qualify(const std::vector<double>& series, double min_peak) {
  QualifierConfig q{Observable::kPosition, min_peak, FewPeaksPolicy::kNonExtreme};
  Json doc = to_json(qualify_series(series, q));
  doc.erase("observable");
  return doc.dump();
}

std::string metrics_json(std::size_t tn, std::size_t fp, std::size_t fn, std::size_t tp) {
  return to_json(metrics({tn, fp, fn, tp})).dump();
}

std::string generate_csv(const std::string& config_json, std::size_t workers) {
  RunConfig c = config_from(config_json);
  c.workers = workers;
  std::ostringstream out;
  write_dataset_csv(out, generate_dataset(c.generation()));
  return out.str();
}

std::string experiment(const std::string& dataset_csv, const std::string& config_json,
                       std::size_t workers) {
  RunConfig c = config_from(config_json);
  c.workers = workers;
  std::istringstream in(dataset_csv);
  return to_json(run_experiment(read_dataset_csv(in), c.experiment())).dump();
}

std::string train(const std::string& kind, const std::vector<std::vector<double>>& X,
                  const std::vector<int>& y, const std::string& config_json) {
  const RunConfig c = config_from(config_json);
  return to_json(train_model(parse_model_kind(kind), c.model_configs, to_matrix(X), y)).dump();
}

py::tuple predict_rows(const std::string& model_json, const std::vector<std::vector<double>>& X) {
  const TrainedModel model = model_from_json(Json::parse(model_json));
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& row : X) {
    const Prediction p = predict(model, row);
    scores.push_back(p.score);
    labels.push_back(p.label);
  }
  return py::make_tuple(to_array(scores), labels);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of eepred";
  m.attr("__version__") = kVersion;

  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const Json::exception& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("default_config", [] { return to_json(RunConfig{}).dump(); });
  m.def("desk_config", [] {
    RunConfig c;
    apply_desk_scale(c);
    return to_json(c).dump();
  });
  m.def("config_digest", [](const std::string& j) { return config_digest(config_from(j)); });
  m.def("normalize_config", [](const std::string& j) { return to_json(config_from(j)).dump(); });
  m.def("omega_cap_sq", [](double lambda, double omega0_sq, double g) {
    SystemParams p;
    p.lambda = lambda;
    p.omega0_sq = omega0_sq;
    p.g = g;
    return p.omega_cap_sq();
  });
  m.def("simulate", &simulate, py::arg("config_json"));
  m.def("classify", &classify, py::arg("config_json"));
  m.def("qualify", &qualify, py::arg("series"), py::arg("min_peak") = 1e-6);
  m.def("metrics", &metrics_json, py::arg("tn"), py::arg("fp"), py::arg("fn"), py::arg("tp"));
  m.def("generate_dataset_csv", &generate_csv, py::arg("config_json"), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("run_experiment", &experiment, py::arg("dataset_csv"), py::arg("config_json"),
        py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("train", &train, py::arg("kind"), py::arg("X"), py::arg("y"), py::arg("config_json"));
  m.def("predict", &predict_rows, py::arg("model_json"), py::arg("X"));
}
