#pragma once

// Experiment plumbing shared by the command-line tool, the acceptance suite
// and the Python module: run configuration, method dispatch, planted-target
// benchmarks, the cellular-automaton sweep and the classification runs.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmcgs/baselines.hpp"
#include "qmcgs/datasets.hpp"
#include "qmcgs/graph.hpp"
#include "qmcgs/mcgs.hpp"
#include "qmcgs/report.hpp"
#include "qmcgs/tasks.hpp"

namespace qmcgs {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Plain-text configuration, one "key = value" per line, '#' starts a comment.
// Keys are the field names below; see README for the full list.
struct RunConfig {
  // common
  std::string method = "mcgs";  // mcgs | random | ga | pf | sa
  std::string gate_set;         // empty: per-command default
  std::size_t budget = 100000;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::string out = "out";
  double success_tol = -1.0;  // negative: task default

  // synth
  std::string target = "dft8";  // dftN or a circuit text file

  // mcgs
  double beta = 2.0;
  double epsilon = 1e-6;
  bool optimize_params = true;
  bool fresh_gates = true;
  bool phase_insensitive = false;
  std::size_t max_depth = 0;
  std::size_t batch_size = 0;
  bool warm_start = true;
  double param_init = 0.0;

  // gradient descent
  double step = 0.2;
  std::size_t max_iters = 100;
  double grad_tol = 1e-8;
  double stall_tol = 0.0;

  // baselines
  std::size_t max_length = 7;
  // What bench-samples reveals about each target: "planted" gives baselines
  // the true length and caps MCGS depth at it; "max" gives every method only
  // the max_length bound. bench-length always uses the bound.
  std::string length_hint = "planted";
  bool variable_length = true;
  std::size_t population = 50;
  double crossover_rate = 0.9;
  double mutation_rate = -1.0;
  std::size_t elitism = 2;
  std::size_t particles = 50;
  double t0 = 1.0;
  double cooling = 0.995;
  double sa_k = 1.0;

  // bench-samples / bench-length
  std::string lengths;  // e.g. "1-7"; empty: per-command default
  std::string methods;  // e.g. "mcgs,random"; empty: per-command default
  bool audit = false;   // run the graph audit on every MCGS run

  // ca-sweep / ca-demo
  std::string rules = "1-255";
  double tau = 1e-4;
  int rule = 90;
  std::size_t width = 64;
  std::size_t steps = 32;
  std::string init = "center";
  // After a rule is solved, drop gates one at a time while the support still
  // matches (uncharged evaluations).
  bool prune = true;
  // Depth-capped passes 1..deepen run first; a capped pass that saturates
  // proves the rule needs more gates. The uncapped search gets what is left.
  std::size_t deepen = 3;

  // qml
  std::string dataset = "iris";
  std::string data;  // dataset file
};

// Sets one key. Throws ConfigError for unknown keys or malformed values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
// Applies a whole config text on top of cfg.
void apply_config_text(RunConfig& cfg, std::string_view text);
void apply_config_file(RunConfig& cfg, const std::string& path);

// "1-5,7" -> {1,2,3,4,5,7}
std::vector<std::size_t> parse_index_list(std::string_view spec);
std::vector<std::string> parse_name_list(std::string_view spec);

Matrix parse_target(std::string_view spec);

McgsConfig mcgs_config(const RunConfig& cfg, const Task& task, std::vector<GateInstance> gates,
                       std::uint64_t seed);

struct MethodRun {
  SearchReport report;
  std::optional<GraphAudit> audit;
};

// Runs `method` once. fixed_length > 0 fixes the circuit length of the
// baselines (GA and PF always need one; random and SA use it instead of the
// variable-length mode).
MethodRun run_method(const std::string& method, const Task& task, const RunConfig& cfg,
                     const std::vector<GateInstance>& gates, std::uint64_t seed,
                     std::size_t fixed_length, bool audit);

struct PlantedTarget {
  Circuit circuit;
  Matrix unitary;
  std::size_t length = 0;  // certified minimum
};

// Composes `length` uniformly drawn gates, rejecting draws whose product is
// reachable with fewer gates (breadth-first certified) or is the identity.
// The oracle must reach at least length - 1.
PlantedTarget plant_target(std::span<const GateInstance> gates, int n_qubits, std::size_t length,
                           Rng& rng, const LengthOracle& oracle);

struct BenchRow {
  std::string target;  // planted circuit, inline form
  std::string method;
  std::size_t length = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::size_t samples_used = 0;
  bool success = false;
  std::optional<std::size_t> result_length;
  std::size_t certified_length = 0;
  std::optional<GraphAudit> audit;
};

// Planted-target benchmark. variable_length selects the length-optimality
// variant (random and SA draw circuit lengths up to cfg.max_length; GA and PF
// are not run).
std::vector<BenchRow> run_bench(const RunConfig& cfg, bool variable_length);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);
// Per method and length: runs, successes, mean/stddev/median samples, mean
// result length and mean excess length over successful runs.
void write_bench_summary_csv(std::ostream& os, const std::vector<BenchRow>& rows);

struct CaRow {
  int rule = 0;
  bool rejected = false;
  std::string reason;
  SearchReport report;
};
std::vector<CaRow> run_ca_sweep(const RunConfig& cfg);
// Greedy gate removal keeping task.loss <= tol; returns the number of loss
// evaluations spent.
std::size_t prune_circuit(const Task& task, Circuit& c, double tol);
void write_ca_csv(std::ostream& os, const std::vector<CaRow>& rows);

// Rows of the classical evolution, row 0 the initial state.
std::vector<std::vector<std::uint8_t>> ca_evolution(int rule, std::size_t width, std::size_t steps,
                                                    const std::string& init, std::uint64_t seed);
std::string ca_raster_text(const std::vector<std::vector<std::uint8_t>>& rows);
void write_ca_raster_csv(std::ostream& os, const std::vector<std::vector<std::uint8_t>>& rows);

struct QmlRun {
  SearchReport report;
  nlohmann::json metadata;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};
QmlRun run_qml(const Dataset& data, const RunConfig& cfg, std::uint64_t seed);

// Defaults of one subcommand (budgets, gate sets, beta differ per command).
RunConfig default_run_config(std::string_view command);
// Throws ConfigError for out-of-range values or an unknown method.
void validate(const RunConfig& cfg);
// cfg.gate_set, or the command default for an n-qubit task when it is empty.
GateSet resolve_config_gate_set(const RunConfig& cfg, std::string_view fallback);

}  // namespace qmcgs
