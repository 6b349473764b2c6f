// qmcgs: circuit search experiments from the command line.
//
// Exit status: 0 success, 1 usage or configuration error, 2 budget spent
// without reaching the target.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmcgs/harness.hpp"

namespace fs = std::filesystem;
using namespace qmcgs;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kBudgetSpent = 2;

struct Globals {
  std::string config_file;
  std::vector<std::string> sets;  // key=value overrides
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<std::string> out;
};

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

std::string run_label(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

// Command defaults, then the config file, then --set, then explicit flags.
RunConfig build_config(const std::string& command, const Globals& g) {
  RunConfig cfg = default_run_config(command);
  if (!g.config_file.empty()) apply_config_file(cfg, g.config_file);
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) cfg.seed = *g.seed;
  if (g.budget) cfg.budget = *g.budget;
  if (g.out) cfg.out = *g.out;
  return cfg;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int cmd_synth(const RunConfig& cfg) {
  validate(cfg);
  const Matrix target = parse_target(cfg.target);
  const GateSet set = resolve_config_gate_set(cfg, "qft3");
  const UnitarySynthesisTask task(target, cfg.success_tol < 0.0 ? 1e-6 : cfg.success_tol);
  if (set.n_qubits != task.n_qubits()) {
    throw ConfigError("gate set '" + set.name + "' acts on " + std::to_string(set.n_qubits) +
                      " qubits, the target on " + std::to_string(task.n_qubits()));
  }
  const fs::path out(cfg.out);
  json doc;
  doc["schema"] = "qmcgs.synth.v1";
  doc["target"] = cfg.target;
  doc["gate_set"] = set.name;
  doc["runs"] = json::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < cfg.repeats; ++i) {
    Stopwatch sw;
    const MethodRun r = run_method(cfg.method, task, cfg, set.gates, cfg.seed + i, 0, false);
    doc["runs"].push_back(report_to_json(r.report));
    std::ostringstream trace;
    write_trace_csv(trace, r.report);
    write_file(out / ("trace_" + run_label(i) + ".csv"), trace.str());
    if (r.report.result_circuit) {
      write_file(out / ("circuit_" + run_label(i) + ".txt"), to_text(*r.report.result_circuit));
    }
    all_ok = all_ok && r.report.success;
    std::printf("run %zu seed %llu: %s, %zu samples, loss %.3g, length %zu, %.1fs\n", i,
                static_cast<unsigned long long>(r.report.seed), r.report.success ? "solved" : "not solved",
                r.report.samples_used, r.report.best_loss, r.report.result_length.value_or(0), sw.seconds());
  }
  write_file(out / "report.json", doc.dump(2) + "\n");
  return all_ok ? kOk : kBudgetSpent;
}

int cmd_bench(const RunConfig& cfg, bool length_mode) {
  Stopwatch sw;
  const auto rows = run_bench(cfg, length_mode);
  const std::string stem = length_mode ? "bench_length" : "bench_samples";
  std::ostringstream a, b;
  write_bench_csv(a, rows);
  write_bench_summary_csv(b, rows);
  write_file(fs::path(cfg.out) / (stem + ".csv"), a.str());
  write_file(fs::path(cfg.out) / (stem + "_summary.csv"), b.str());
  std::cout << b.str();
  std::size_t audits = 0, audit_failures = 0;
  for (const auto& r : rows) {
    if (!r.audit) continue;
    ++audits;
    if (!r.audit->ok()) {
      ++audit_failures;
      std::cerr << "graph audit failed: " << r.method << " length " << r.length << " repeat "
                << r.repeat << ": " << r.audit->failure << "\n";
    }
  }
  std::printf("%zu runs, %zu graph audits, %zu failed, %.1fs\n", rows.size(), audits, audit_failures,
              sw.seconds());
  return kOk;
}

int cmd_ca_sweep(const RunConfig& cfg) {
  Stopwatch sw;
  const auto rows = run_ca_sweep(cfg);
  std::ostringstream csv;
  write_ca_csv(csv, rows);
  const fs::path out(cfg.out);
  write_file(out / "ca_sweep.csv", csv.str());
  std::size_t solved = 0, attempted = 0;
  for (const auto& r : rows) {
    if (r.rejected) {
      std::printf("rule %d rejected: %s\n", r.rule, r.reason.c_str());
      continue;
    }
    ++attempted;
    if (r.report.success) ++solved;
    char name[32];
    std::snprintf(name, sizeof name, "rule_%03d.txt", r.rule);
    if (r.report.success && r.report.result_circuit) {
      write_file(out / "circuits" / name, to_text(*r.report.result_circuit));
    }
  }
  std::printf("solved %zu of %zu rules, %.1fs\n", solved, attempted, sw.seconds());
  return solved == attempted ? kOk : kBudgetSpent;
}

int cmd_ca_demo(const RunConfig& cfg) {
  validate(cfg);
  const auto rows = ca_evolution(cfg.rule, cfg.width, cfg.steps, cfg.init, cfg.seed);
  const std::string text = ca_raster_text(rows);
  std::ostringstream csv;
  write_ca_raster_csv(csv, rows);
  char stem[32];
  std::snprintf(stem, sizeof stem, "ca_rule_%03d", cfg.rule);
  write_file(fs::path(cfg.out) / (std::string(stem) + ".txt"), text);
  write_file(fs::path(cfg.out) / (std::string(stem) + ".csv"), csv.str());
  std::cout << text;
  return kOk;
}

int cmd_qml(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.data.empty()) throw ConfigError("qml needs a dataset file (--data or data = PATH)");
  if (!fs::exists(cfg.data)) throw ConfigError("dataset file '" + cfg.data + "' not found");
  Dataset data;
  try {
    data = load_dataset(cfg.data, cfg.dataset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const fs::path out(cfg.out);
  json doc;
  doc["schema"] = "qmcgs.qml.v1";
  doc["dataset"] = data.name;
  doc["runs"] = json::array();
  std::ostringstream summary;
  summary << "#schema=qmcgs.qml_summary.v1\n";
  summary << "seed,bdim,qubits,classes,train_size,test_size,result_length,train_accuracy,test_accuracy\n";
  for (std::size_t i = 0; i < cfg.repeats; ++i) {
    Stopwatch sw;
    const std::uint64_t seed = cfg.seed + i;
    const QmlRun r = run_qml(data, cfg, seed);
    json run;
    run["report"] = report_to_json(r.report);
    run["metadata"] = r.metadata;
    run["train_accuracy"] = r.train_accuracy;
    run["test_accuracy"] = r.test_accuracy;
    doc["runs"].push_back(run);
    std::ostringstream trace;
    write_trace_csv(trace, r.report);
    write_file(out / ("trace_" + run_label(i) + ".csv"), trace.str());
    if (r.report.result_circuit) {
      write_file(out / ("circuit_" + run_label(i) + ".txt"), to_text(*r.report.result_circuit));
    }
    char acc[64];
    std::snprintf(acc, sizeof acc, "%.17g,%.17g", r.train_accuracy, r.test_accuracy);
    summary << seed << "," << r.metadata.value("bdim", 0) << "," << r.metadata.value("qubits", 0) << ","
            << r.metadata.value("classes", 0) << "," << r.metadata.value("train", 0) << ","
            << r.metadata.value("test", 0) << "," << r.report.result_length.value_or(0) << ","
            << acc << "\n";
    std::printf("seed %llu: train %.3f test %.3f, length %zu, %.1fs\n",
                static_cast<unsigned long long>(seed), r.train_accuracy, r.test_accuracy,
                r.report.result_length.value_or(0), sw.seconds());
  }
  write_file(out / "qml_report.json", doc.dump(2) + "\n");
  write_file(out / "qml_summary.csv", summary.str());
  return kOk;
}

int cmd_ingest(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ConfigError("ingest needs a source file (--data)");
  std::ifstream in(cfg.data, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + cfg.data + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  const std::string digest = sha256_hex(bytes);
  const std::string file = fs::path(cfg.data).filename().string();

  json manifest;
  manifest["schema"] = "qmcgs.ingest.v1";
  manifest["dataset"] = cfg.dataset;
  manifest["source_file"] = file;
  manifest["source_sha256"] = digest;
  manifest["pinned"] = false;
  for (const auto& p : pinned_sources()) {
    if (p.dataset != cfg.dataset || p.file != file) continue;
    if (p.sha256 != digest) {
      throw ConfigError(file + ": checksum " + digest + " does not match the pinned " + p.sha256);
    }
    manifest["pinned"] = true;
  }
  if (!manifest["pinned"].get<bool>()) {
    std::cerr << "warning: " << file << " has no pinned checksum; recorded as " << digest << "\n";
  }
  Dataset d;
  try {
    d = parse_dataset(bytes, cfg.dataset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string canonical = to_canonical_csv(d);
  manifest["rows"] = d.features.size();
  manifest["features"] = d.features.empty() ? 0 : d.features[0].size();
  manifest["classes"] = d.n_classes;
  manifest["canonical_file"] = d.name + ".csv";
  manifest["canonical_sha256"] = sha256_hex(canonical);
  write_file(fs::path(cfg.out) / (d.name + ".csv"), canonical);
  write_file(fs::path(cfg.out) / (d.name + ".manifest.json"), manifest.dump(2) + "\n");
  std::printf("%s: %zu rows, sha256 %s%s\n", d.name.c_str(), d.features.size(), digest.c_str(),
              manifest["pinned"].get<bool>() ? " (pinned)" : "");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo graph search for quantum circuits"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_file, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.sets, "config override key=value (repeatable)");
  app.add_option("--seed", g.seed, "base seed; run i uses seed + i");
  app.add_option("--budget", g.budget, "samples per run");
  app.add_option("--out", g.out, "output directory");

  // Subcommand flags feed the same key = value table as the config file.
  std::vector<std::pair<std::string, std::string>> flags;
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags.emplace_back(key, v); }, help);
  };

  auto* synth = app.add_subcommand("synth", "synthesise a unitary (dftN or circuit file)");
  flag(synth, "--target", "target", "dftN or a circuit text file");
  flag(synth, "--method", "method", "mcgs | random | ga | pf | sa");
  flag(synth, "--gate-set", "gate_set", "builtin name or .gates file");
  flag(synth, "--beta", "beta", "score sharpness");
  flag(synth, "--repeats", "repeats", "independent runs");

  auto* bs = app.add_subcommand("bench-samples", "samples to solve planted targets per length");
  auto* bl = app.add_subcommand("bench-length", "result length against certified minimum");
  for (auto* sub : {bs, bl}) {
    flag(sub, "--lengths", "lengths", "e.g. 1-7");
    flag(sub, "--methods", "methods", "e.g. mcgs,random,ga,pf,sa");
    flag(sub, "--repeats", "repeats", "targets per length");
    flag(sub, "--gate-set", "gate_set", "builtin name or .gates file");
  }

  auto* cs = app.add_subcommand("ca-sweep", "prepare cellular-automaton rule states");
  flag(cs, "--rules", "rules", "e.g. 1-255 or 30,90,110");
  flag(cs, "--tau", "tau", "support threshold");
  flag(cs, "--gate-set", "gate_set", "builtin name or .gates file");

  auto* cd = app.add_subcommand("ca-demo", "classical cellular-automaton raster");
  flag(cd, "--rule", "rule", "Wolfram rule 0..255");
  flag(cd, "--width", "width", "cells");
  flag(cd, "--steps", "steps", "updates");
  flag(cd, "--init", "init", "center | random");

  auto* qml = app.add_subcommand("qml", "train a classifier circuit");
  flag(qml, "--dataset", "dataset", "iris | wine | zoo");
  flag(qml, "--data", "data", "dataset file");
  flag(qml, "--repeats", "repeats", "runs with seeds seed, seed + 1, ...");
  flag(qml, "--gate-set", "gate_set", "builtin name or .gates file");

  auto* ingest = app.add_subcommand("ingest", "validate a dataset file and write the canonical CSV");
  flag(ingest, "--dataset", "dataset", "iris | wine | zoo");
  flag(ingest, "--data", "data", "source file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    RunConfig cfg = build_config(command, g);
    for (const auto& [k, v] : flags) set_config_value(cfg, k, v);
    if (command == "synth") return cmd_synth(cfg);
    if (command == "bench-samples") return cmd_bench(cfg, false);
    if (command == "bench-length") return cmd_bench(cfg, true);
    if (command == "ca-sweep") return cmd_ca_sweep(cfg);
    if (command == "ca-demo") return cmd_ca_demo(cfg);
    if (command == "qml") return cmd_qml(cfg);
    if (command == "ingest") return cmd_ingest(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
