// Python bindings. Reports and configs travel as dicts (through JSON text),
// matrices as complex numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qmcgs/harness.hpp"

namespace py = pybind11;
using namespace qmcgs;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::array_t<std::complex<double>> to_numpy(const Matrix& m) {
  py::array_t<std::complex<double>> a({m.rows(), m.cols()});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) v(r, c) = m(r, c);
  return a;
}

Matrix from_numpy(const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  auto v = a.unchecked<2>();
  for (py::ssize_t r = 0; r < a.shape(0); ++r)
    for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = v(r, c);
  return m;
}

// Command defaults overlaid with keyword values, as the config file would.
RunConfig make_config(const std::string& command, const py::dict& kw) {
  RunConfig cfg = default_run_config(command);
  for (const auto& [k, v] : kw) {
    std::string text;
    if (py::isinstance<py::bool_>(v)) text = v.cast<bool>() ? "true" : "false";
    else text = py::str(v).cast<std::string>();
    set_config_value(cfg, k.cast<std::string>(), text);
  }
  validate(cfg);
  return cfg;
}

nlohmann::json bench_json(const std::vector<BenchRow>& rows) {
  std::ostringstream full, summary;
  write_bench_csv(full, rows);
  write_bench_summary_csv(summary, rows);
  return {{"csv", full.str()}, {"summary_csv", summary.str()}};
}

}  // namespace

PYBIND11_MODULE(_qmcgs, m) {
  m.doc() = "Monte Carlo graph search for quantum circuits";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("dft_matrix", [](std::size_t dim) { return to_numpy(dft_matrix(dim)); }, py::arg("dim"));
  m.def("gate_set", [](const std::string& name) {
    std::vector<std::string> labels;
    for (const auto& g : resolve_gate_set(name).gates) labels.push_back(g.label());
    return labels;
  }, py::arg("name"), "gate labels of a builtin set or .gates file");
  m.def("gate_set_names", &builtin_gate_set_names);
  m.def("circuit_unitary", [](const std::string& text) { return to_numpy(evaluate(circuit_from_text(text))); },
        py::arg("text"), "unitary of a circuit in the text format");
  m.def("frobenius_distance", [](const py::array_t<std::complex<double>>& a, const py::array_t<std::complex<double>>& b) {
    return frobenius_distance(from_numpy(a), from_numpy(b));
  });

  m.def("default_config", [](const std::string& command) {
    // only the keys whose defaults vary per command
    const RunConfig c = default_run_config(command);
    nlohmann::json j{{"gate_set", c.gate_set}, {"budget", c.budget}, {"beta", c.beta},
                     {"repeats", c.repeats}, {"max_depth", c.max_depth}, {"lengths", c.lengths},
                     {"methods", c.methods}};
    return to_py(j);
  }, py::arg("command"));

  m.def("synth", [](const py::kwargs& kw) {
    const RunConfig cfg = make_config("synth", kw);
    const GateSet set = resolve_config_gate_set(cfg, "qft3");
    const UnitarySynthesisTask task(parse_target(cfg.target), cfg.success_tol < 0.0 ? 1e-6 : cfg.success_tol);
    if (set.n_qubits != task.n_qubits()) throw ConfigError("gate set and target sizes differ");
    SearchReport r;
    {
      py::gil_scoped_release release;
      r = run_method(cfg.method, task, cfg, set.gates, cfg.seed, 0, false).report;
    }
    nlohmann::json j = report_to_json(r);
    if (r.result_circuit) j["circuit_text"] = to_text(*r.result_circuit);
    return to_py(j);
  }, "run one synthesis; keyword arguments are config keys");

  m.def("bench", [](bool length_mode, const py::kwargs& kw) {
    const RunConfig cfg = make_config(length_mode ? "bench-length" : "bench-samples", kw);
    std::vector<BenchRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_bench(cfg, length_mode);
    }
    return to_py(bench_json(rows));
  }, py::arg("length_mode") = false, "planted-target benchmark; returns the CSV texts");

  m.def("ca_sweep", [](const py::kwargs& kw) {
    const RunConfig cfg = make_config("ca-sweep", kw);
    std::vector<CaRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_ca_sweep(cfg);
    }
    std::ostringstream os;
    write_ca_csv(os, rows);
    return os.str();
  }, "cellular-automaton sweep; returns the CSV text");

  m.def("wolfram_code", &wolfram_code, py::arg("rule"));
  m.def("ca_evolution", [](int rule, std::size_t width, std::size_t steps, const std::string& init, std::uint64_t seed) {
    const auto rows = ca_evolution(rule, width, steps, init, seed);
    py::array_t<std::uint8_t> a({rows.size(), width});
    auto v = a.mutable_unchecked<2>();
    for (std::size_t t = 0; t < rows.size(); ++t)
      for (std::size_t i = 0; i < width; ++i) v(t, i) = rows[t][i];
    return a;
  }, py::arg("rule"), py::arg("width") = 64, py::arg("steps") = 32, py::arg("init") = "center", py::arg("seed") = 0);

  m.def("qml", [](const std::string& path, const std::string& dataset, const py::kwargs& kw) {
    const RunConfig cfg = make_config("qml", kw);
    const Dataset d = load_dataset(path, dataset);
    QmlRun r;
    {
      py::gil_scoped_release release;
      r = run_qml(d, cfg, cfg.seed);
    }
    nlohmann::json j{{"report", report_to_json(r.report)}, {"metadata", r.metadata},
                     {"train_accuracy", r.train_accuracy}, {"test_accuracy", r.test_accuracy}};
    return to_py(j);
  }, py::arg("path"), py::arg("dataset"));
}
