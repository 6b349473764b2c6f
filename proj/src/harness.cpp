#include "qmcgs/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace qmcgs {

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("config key '" + std::string(key) + "': '" + std::string(value) + "' is not " +
                    std::string(want));
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  // Accept 1e5-style budgets too.
  if (v.find_first_of("eE.") != std::string_view::npos) {
    double d = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || p != v.data() + v.size() || !(d >= 0.0) || d != std::floor(d) ||
        d > 1e15) {
      bad_value(key, v, "a nonnegative integer");
    }
    return static_cast<std::size_t>(d);
  }
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

template <typename T>
Setter set(T RunConfig::*field) {
  return [field](RunConfig& c, std::string_view k, std::string_view v) {
    if constexpr (std::is_same_v<T, std::string>) {
      c.*field = std::string(v);
    } else if constexpr (std::is_same_v<T, bool>) {
      c.*field = parse_bool(k, v);
    } else if constexpr (std::is_same_v<T, double>) {
      c.*field = parse_double(k, v);
    } else if constexpr (std::is_same_v<T, int>) {
      const std::size_t x = parse_size(k, v);
      if (x > 1000000) bad_value(k, v, "in range");
      c.*field = static_cast<int>(x);
    } else {
      c.*field = static_cast<T>(parse_size(k, v));
    }
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"method", set(&RunConfig::method)},
      {"gate_set", set(&RunConfig::gate_set)},
      {"budget", set(&RunConfig::budget)},
      {"repeats", set(&RunConfig::repeats)},
      {"seed", set(&RunConfig::seed)},
      {"out", set(&RunConfig::out)},
      {"success_tol", set(&RunConfig::success_tol)},
      {"target", set(&RunConfig::target)},
      {"beta", set(&RunConfig::beta)},
      {"epsilon", set(&RunConfig::epsilon)},
      {"optimize_params", set(&RunConfig::optimize_params)},
      {"fresh_gates", set(&RunConfig::fresh_gates)},
      {"phase_insensitive", set(&RunConfig::phase_insensitive)},
      {"max_depth", set(&RunConfig::max_depth)},
      {"batch_size", set(&RunConfig::batch_size)},
      {"warm_start", set(&RunConfig::warm_start)},
      {"param_init", set(&RunConfig::param_init)},
      {"step", set(&RunConfig::step)},
      {"max_iters", set(&RunConfig::max_iters)},
      {"grad_tol", set(&RunConfig::grad_tol)},
      {"stall_tol", set(&RunConfig::stall_tol)},
      {"max_length", set(&RunConfig::max_length)},
      {"variable_length", set(&RunConfig::variable_length)},
      {"length_hint", set(&RunConfig::length_hint)},
      {"population", set(&RunConfig::population)},
      {"crossover_rate", set(&RunConfig::crossover_rate)},
      {"mutation_rate", set(&RunConfig::mutation_rate)},
      {"elitism", set(&RunConfig::elitism)},
      {"particles", set(&RunConfig::particles)},
      {"t0", set(&RunConfig::t0)},
      {"cooling", set(&RunConfig::cooling)},
      {"sa_k", set(&RunConfig::sa_k)},
      {"lengths", set(&RunConfig::lengths)},
      {"methods", set(&RunConfig::methods)},
      {"audit", set(&RunConfig::audit)},
      {"rules", set(&RunConfig::rules)},
      {"tau", set(&RunConfig::tau)},
      {"rule", set(&RunConfig::rule)},
      {"width", set(&RunConfig::width)},
      {"steps", set(&RunConfig::steps)},
      {"init", set(&RunConfig::init)},
      {"prune", set(&RunConfig::prune)},
      {"deepen", set(&RunConfig::deepen)},
      {"dataset", set(&RunConfig::dataset)},
      {"data", set(&RunConfig::data)},
  };
  return table;
}

constexpr std::string_view kMethods[] = {"mcgs", "random", "ga", "pf", "sa"};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second(cfg, key, trim(value));
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(cfg, trim(std::string_view(line).substr(0, eq)),
                     std::string_view(line).substr(eq + 1));
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

RunConfig default_run_config(std::string_view command) {
  RunConfig c;
  if (command == "synth") {
    // Weak scores: the Frobenius distance of a partial circuit says little
    // about the target, so selection stays close to uniform.
    c.gate_set = "qft3";
    c.budget = 1000000;
    c.beta = 0.5;
    c.max_depth = 7;
    c.stall_tol = 1e-3;
    c.warm_start = false;
  } else if (command == "bench-samples" || command == "bench-length") {
    const bool samples = command == "bench-samples";
    c.gate_set = samples ? "bench8" : "bench8-lc";
    c.budget = 100000;
    c.repeats = 10;
    c.beta = samples ? 24.0 : 8.0;
    c.audit = true;
    c.max_length = samples ? 7 : 4;
    c.max_depth = c.max_length;
    c.lengths = samples ? "1-7" : "1-4";
    c.methods = samples ? "mcgs,random,ga,pf,sa" : "mcgs,random,sa";
  } else if (command == "ca-sweep") {
    c.gate_set = "ca3";
    c.budget = 100000;
    c.beta = 8.0;
  } else if (command == "qml") {
    c.budget = 2000;
    c.beta = 4.0;
    c.param_init = 0.1;
    c.warm_start = false;
    c.max_iters = 30;
    c.stall_tol = 1e-3;
  }
  return c;
}

void validate(const RunConfig& cfg) {
  if (std::find(std::begin(kMethods), std::end(kMethods), cfg.method) == std::end(kMethods)) {
    throw ConfigError("unknown method '" + cfg.method + "' (mcgs, random, ga, pf, sa)");
  }
  if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (cfg.budget < 1) throw ConfigError("budget must be at least 1");
  if (!(cfg.beta >= 0.0)) throw ConfigError("beta must be nonnegative");
  if (!(cfg.epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  if (!(cfg.step > 0.0)) throw ConfigError("step must be positive");
  if (cfg.max_length < 1) throw ConfigError("max_length must be at least 1");
  if (cfg.length_hint != "planted" && cfg.length_hint != "max") {
    throw ConfigError("length_hint must be planted or max");
  }
  if (!(cfg.tau > 0.0 && cfg.tau < 0.125)) throw ConfigError("tau must lie in (0, 1/8)");
  if (cfg.rule < 0 || cfg.rule > 255) throw ConfigError("rule must lie in 0..255");
  if (cfg.width < 3) throw ConfigError("width must be at least 3");
  if (cfg.init != "center" && cfg.init != "random") throw ConfigError("init must be center or random");
  if (!(cfg.crossover_rate >= 0.0 && cfg.crossover_rate <= 1.0)) {
    throw ConfigError("crossover_rate must lie in [0, 1]");
  }
  if (!(cfg.cooling > 0.0 && cfg.cooling <= 1.0)) throw ConfigError("cooling must lie in (0, 1]");
  if (cfg.population < 2 || cfg.particles < 1) throw ConfigError("population too small");
  for (const auto& m : parse_name_list(cfg.methods)) {
    if (std::find(std::begin(kMethods), std::end(kMethods), m) == std::end(kMethods)) {
      throw ConfigError("unknown method '" + m + "' in methods");
    }
  }
}

GateSet resolve_config_gate_set(const RunConfig& cfg, std::string_view fallback) {
  const std::string name = cfg.gate_set.empty() ? std::string(fallback) : cfg.gate_set;
  try {
    return resolve_gate_set(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> parse_index_list(std::string_view spec) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string part = trim(spec.substr(start, end - start));
    start = end + 1;
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_size("list", part));
    } else {
      const std::size_t a = parse_size("list", trim(std::string_view(part).substr(0, dash)));
      const std::size_t b = parse_size("list", trim(std::string_view(part).substr(dash + 1)));
      if (b < a) throw ConfigError("descending range '" + part + "'");
      for (std::size_t i = a; i <= b; ++i) out.push_back(i);
    }
  }
  return out;
}

std::vector<std::string> parse_name_list(std::string_view spec) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    std::string part = trim(spec.substr(start, end - start));
    if (!part.empty()) out.push_back(std::move(part));
    start = end + 1;
  }
  return out;
}

Matrix parse_target(std::string_view spec) {
  if (spec.size() > 3 && spec.substr(0, 3) == "dft" &&
      spec.find_first_not_of("0123456789", 3) == std::string_view::npos) {
    const std::size_t dim = parse_size("target", spec.substr(3));
    if (!is_power_of_two(dim) || dim < 2 || dim > (std::size_t{1} << kMaxQubits)) {
      throw ConfigError("target '" + std::string(spec) + "': size must be a power of two");
    }
    return dft_matrix(dim);
  }
  std::ifstream in{std::string(spec)};
  if (!in) throw ConfigError("target '" + std::string(spec) + "' is neither dftN nor a readable circuit file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return evaluate(circuit_from_text(buf.str()));
  } catch (const std::exception& e) {
    throw ConfigError("target file '" + std::string(spec) + "': " + e.what());
  }
}

McgsConfig mcgs_config(const RunConfig& cfg, const Task& task, std::vector<GateInstance> gates,
                       std::uint64_t seed) {
  McgsConfig m;
  m.epsilon = cfg.epsilon;
  m.beta = cfg.beta;
  m.success_tol = cfg.success_tol < 0.0 ? task.default_success_tol() : cfg.success_tol;
  m.max_samples = cfg.budget;
  m.gate_set = std::move(gates);
  m.optimize_params = cfg.optimize_params;
  m.seed = seed;
  m.descent.step = cfg.step;
  m.descent.max_iters = cfg.max_iters;
  m.descent.grad_tol = cfg.grad_tol;
  m.descent.stall_tol = cfg.stall_tol;
  m.distance = cfg.phase_insensitive ? DistanceMode::PhaseInsensitive : DistanceMode::PhaseSensitive;
  m.batch_size = cfg.batch_size;
  m.fresh_gates = cfg.fresh_gates;
  m.max_depth = cfg.max_depth;
  m.warm_start = cfg.warm_start;
  m.param_init = cfg.param_init;
  return m;
}

MethodRun run_method(const std::string& method, const Task& task, const RunConfig& cfg,
                     const std::vector<GateInstance>& gates, std::uint64_t seed,
                     std::size_t fixed_length, bool audit) {
  MethodRun out;
  SearchLimits limits;
  limits.budget = cfg.budget;
  limits.success_tol = cfg.success_tol < 0.0 ? task.default_success_tol() : cfg.success_tol;
  limits.seed = seed;
  limits.beta = cfg.beta;
  const std::size_t length = fixed_length > 0 ? fixed_length : cfg.max_length;

  if (method == "mcgs") {
    McgsSearch search(task, mcgs_config(cfg, task, gates, seed));
    out.report = search.run();
    if (audit) out.audit = audit_graph(search.graph());
  } else if (method == "random") {
    out.report = random_search(task, gates, length, fixed_length == 0, limits);
  } else if (method == "ga") {
    GaConfig g;
    g.population = cfg.population;
    g.crossover_rate = cfg.crossover_rate;
    g.mutation_rate = cfg.mutation_rate;
    g.elitism = cfg.elitism;
    g.circuit_length = length;
    out.report = genetic_algorithm(task, g, gates, limits);
  } else if (method == "pf") {
    PfConfig p;
    p.particles = cfg.particles;
    p.mutation_rate = cfg.mutation_rate;
    p.circuit_length = length;
    out.report = particle_filter(task, p, gates, limits);
  } else if (method == "sa") {
    SaConfig s;
    s.t0 = cfg.t0;
    s.cooling = cfg.cooling;
    s.k = cfg.sa_k;
    s.variable_length = fixed_length == 0;
    s.min_length = fixed_length > 0 ? fixed_length : 1;
    s.max_length = length;
    out.report = simulated_annealing(task, s, gates, limits);
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  return out;
}

PlantedTarget plant_target(std::span<const GateInstance> gates, int n_qubits, std::size_t length,
                           Rng& rng, const LengthOracle& oracle) {
  if (length < 1) throw std::invalid_argument("planted length must be at least 1");
  if (oracle.max_depth() + 1 < length) {
    throw std::invalid_argument("length oracle too shallow for the planted length");
  }
  // Targets this long are rare for small gate sets; give up rather than spin.
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Circuit c = random_circuit(n_qubits, gates, length, rng);
    Matrix u = evaluate(c);
    const auto shorter = oracle.min_length(u);
    if (shorter && *shorter < length) continue;
    return {std::move(c), std::move(u), length};
  }
  throw std::runtime_error("no target of minimal length " + std::to_string(length) + " found");
}

std::vector<BenchRow> run_bench(const RunConfig& cfg, bool variable_length) {
  validate(cfg);
  const GateSet set = resolve_config_gate_set(cfg, "bench8");
  const auto lengths = parse_index_list(cfg.lengths);
  const auto methods = parse_name_list(cfg.methods);
  if (lengths.empty() || methods.empty()) throw ConfigError("empty lengths or methods");
  const std::size_t max_len = *std::max_element(lengths.begin(), lengths.end());
  if (*std::min_element(lengths.begin(), lengths.end()) < 1) throw ConfigError("lengths start at 1");
  if ((variable_length || cfg.length_hint == "max") && max_len > cfg.max_length) {
    throw ConfigError("max_length is below the longest planted length");
  }
  const LengthOracle oracle(set.gates, set.n_qubits, max_len - 1, cfg.epsilon);

  const bool bounded = variable_length || cfg.length_hint == "max";
  std::vector<BenchRow> rows;
  std::size_t run_index = 0;
  for (std::size_t len : lengths) {
    for (std::size_t rep = 0; rep < cfg.repeats; ++rep, ++run_index) {
      // Target and searches draw from different streams, otherwise random
      // search would replay the planting draws.
      Rng plant_rng(derive_seed(cfg.seed, run_index));
      const PlantedTarget t = plant_target(set.gates, set.n_qubits, len, plant_rng, oracle);
      const UnitarySynthesisTask task(t.unitary, cfg.success_tol < 0.0 ? 1e-6 : cfg.success_tol);
      const std::uint64_t seed = cfg.seed + run_index;
      RunConfig hinted = cfg;
      hinted.max_depth = len;
      for (const auto& m : methods) {
        if (variable_length && (m == "ga" || m == "pf")) continue;
        const MethodRun r = run_method(m, task, bounded ? cfg : hinted, set.gates, seed,
                                       bounded ? 0 : len, cfg.audit && m == "mcgs");
        BenchRow row;
        row.target = to_inline(t.circuit);
        row.method = m;
        row.length = len;
        row.repeat = rep;
        row.seed = seed;
        row.samples_used = r.report.samples_used;
        row.success = r.report.success;
        if (r.report.success) row.result_length = r.report.result_length;
        row.certified_length = t.length;
        row.audit = r.audit;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "#schema=qmcgs.bench.v1\n";
  os << "method,length,repeat,seed,samples_used,success,result_length,certified_length,"
        "audit_ok,audit_exhaustive,target\n";
  for (const auto& r : rows) {
    os << r.method << "," << r.length << "," << r.repeat << "," << r.seed << "," << r.samples_used
       << "," << (r.success ? 1 : 0) << ",";
    if (r.result_length) os << *r.result_length;
    os << "," << r.certified_length << ",";
    if (r.audit) os << (r.audit->ok() ? 1 : 0) << "," << (r.audit->exhaustive ? 1 : 0);
    else os << ",";
    os << "," << csv_quote(r.target) << "\n";
  }
}

void write_bench_summary_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "#schema=qmcgs.bench_summary.v1\n";
  os << "method,length,runs,successes,mean_samples,stddev_samples,median_samples,"
        "mean_result_length,mean_excess_length\n";
  // Keyed by first appearance so the row order follows the run order.
  std::vector<std::pair<std::string, std::size_t>> keys;
  for (const auto& r : rows) {
    const std::pair<std::string, std::size_t> k{r.method, r.length};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  for (const auto& [method, len] : keys) {
    std::vector<double> samples;
    std::size_t succ = 0;
    double len_sum = 0.0, excess_sum = 0.0;
    for (const auto& r : rows) {
      if (r.method != method || r.length != len) continue;
      samples.push_back(static_cast<double>(r.samples_used));
      if (r.success && r.result_length) {
        ++succ;
        len_sum += static_cast<double>(*r.result_length);
        excess_sum += static_cast<double>(*r.result_length) - static_cast<double>(r.certified_length);
      }
    }
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    const double sd = samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0;
    os << method << "," << len << "," << samples.size() << "," << succ << "," << fmt(mean) << ","
       << fmt(sd) << "," << fmt(median(samples)) << ",";
    if (succ) os << fmt(len_sum / static_cast<double>(succ)) << "," << fmt(excess_sum / static_cast<double>(succ));
    else os << ",";
    os << "\n";
  }
}

namespace {

SearchReport deepening_search(const Task& task, const RunConfig& cfg,
                              const std::vector<GateInstance>& gates, std::uint64_t seed) {
  SearchReport total;
  std::size_t spent = 0, aux = 0, grad = 0;
  std::vector<TracePoint> trace;
  const std::size_t stages = cfg.method == "mcgs" ? cfg.deepen : 0;
  for (std::size_t d = 1; d <= stages + 1 && spent < cfg.budget; ++d) {
    RunConfig stage = cfg;
    stage.budget = cfg.budget - spent;
    if (d <= stages) stage.max_depth = d;
    const std::uint64_t s = d <= stages ? derive_seed(seed, d) : seed;
    SearchReport r = run_method(cfg.method, task, stage, gates, s, 0, false).report;
    for (auto p : r.trace) {
      p.sample += spent;
      trace.push_back(p);
    }
    spent += r.samples_used;
    aux += r.aux_evaluations;
    grad += r.gradient_steps;
    total = std::move(r);
    if (total.success) break;
  }
  total.samples_used = spent;
  total.aux_evaluations = aux;
  total.gradient_steps = grad;
  total.trace = std::move(trace);
  total.seed = seed;
  return total;
}

}  // namespace

std::vector<CaRow> run_ca_sweep(const RunConfig& cfg) {
  validate(cfg);
  const GateSet set = resolve_config_gate_set(cfg, "ca3");
  if (set.n_qubits != 3) throw ConfigError("CA gate sets act on 3 qubits");
  std::vector<CaRow> rows;
  const auto rules = parse_index_list(cfg.rules);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    CaRow row;
    row.rule = static_cast<int>(rules[i]);
    if (rules[i] > 255) throw ConfigError("rule " + std::to_string(rules[i]) + " outside 0..255");
    try {
      const CaStatePrepTask task(row.rule, cfg.tau);
      row.report = deepening_search(task, cfg, set.gates, cfg.seed + i);
      row.report.extra["rule"] = row.rule;
      // A flat loss lets the search wander along plateaus before it hits a
      // solution, so found circuits carry idle gates.
      if (cfg.prune && row.report.success && row.report.result_circuit) {
        Circuit& c = *row.report.result_circuit;
        row.report.extra["unpruned_length"] = c.length();
        row.report.aux_evaluations += prune_circuit(task, c, task.default_success_tol());
        row.report.result_length = c.length();
        row.report.best_loss = task.loss(c);
      }
    } catch (const std::invalid_argument& e) {
      row.rejected = true;
      row.reason = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t prune_circuit(const Task& task, Circuit& c, double tol) {
  std::size_t evals = 0;
  // Drops positions i and j (j == i: one gate). Single gates are tried first.
  auto try_drop = [&](std::size_t i, std::size_t j) {
    Circuit shorter(c.n_qubits());
    for (std::size_t k = 0; k < c.length(); ++k) {
      if (k != i && k != j) shorter.append(c.gate(k), c.gate_params(k));
    }
    ++evals;
    if (task.loss(shorter) > tol) return false;
    c = std::move(shorter);
    return true;
  };
  for (bool dropped = true; dropped;) {
    dropped = false;
    for (std::size_t i = 0; i < c.length() && !dropped; ++i) dropped = try_drop(i, i);
    for (std::size_t i = 0; i < c.length() && !dropped; ++i) {
      for (std::size_t j = i + 1; j < c.length() && !dropped; ++j) dropped = try_drop(i, j);
    }
  }
  return evals;
}

void write_ca_csv(std::ostream& os, const std::vector<CaRow>& rows) {
  os << "#schema=qmcgs.ca_sweep.v1\n";
  os << "rule,code,rejected,success,samples_used,result_length,best_loss,circuit,reason\n";
  for (const auto& r : rows) {
    std::string code;
    for (int b : wolfram_code(r.rule)) code += static_cast<char>('0' + b);
    os << r.rule << "," << code << "," << (r.rejected ? 1 : 0) << ",";
    if (r.rejected) {
      os << "0,0,,,," << csv_quote(r.reason) << "\n";
      continue;
    }
    os << (r.report.success ? 1 : 0) << "," << r.report.samples_used << ",";
    if (r.report.result_length) os << *r.report.result_length;
    os << "," << fmt(r.report.best_loss) << ",";
    os << csv_quote(r.report.result_circuit ? to_inline(*r.report.result_circuit) : "") << ",\n";
  }
}

std::vector<std::vector<std::uint8_t>> ca_evolution(int rule, std::size_t width, std::size_t steps,
                                                    const std::string& init, std::uint64_t seed) {
  if (width < 3) throw std::invalid_argument("width must be at least 3");
  if (rule < 0 || rule > 255) throw std::out_of_range("rule outside 0..255");
  std::vector<std::uint8_t> row(width, 0);
  if (init == "center") {
    row[width / 2] = 1;
  } else if (init == "random") {
    Rng rng(seed);
    for (auto& c : row) c = bernoulli(rng, 0.5) ? 1 : 0;
  } else {
    throw std::invalid_argument("init must be center or random");
  }
  std::vector<std::vector<std::uint8_t>> out{row};
  for (std::size_t t = 0; t < steps; ++t) out.push_back(ca_step(out.back(), rule));
  return out;
}

std::string ca_raster_text(const std::vector<std::vector<std::uint8_t>>& rows) {
  std::string s;
  for (const auto& r : rows) {
    for (auto c : r) s += c ? '#' : '.';
    s += '\n';
  }
  return s;
}

void write_ca_raster_csv(std::ostream& os, const std::vector<std::vector<std::uint8_t>>& rows) {
  os << "#schema=qmcgs.ca_raster.v1\n";
  os << "step,cells\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    os << t << ",";
    for (auto c : rows[t]) os << static_cast<char>('0' + c);
    os << "\n";
  }
}

QmlRun run_qml(const Dataset& data, const RunConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  const DatasetLayout& layout = dataset_layout(data.name);
  Rng prep_rng(derive_seed(seed, 0));
  PreparedData prep = prepare_classification(data, layout, prep_rng);
  const GateSet set = resolve_config_gate_set(cfg, prep.qubits == 5 ? "qml5" : "qml4");
  if (set.n_qubits != prep.qubits) {
    throw ConfigError("gate set acts on " + std::to_string(set.n_qubits) + " qubits, " + data.name +
                      " needs " + std::to_string(prep.qubits));
  }
  const ClassificationTask task(prep.train, prep.test, prep.qubits, layout.classes, layout.k_bins);
  QmlRun out;
  out.report = run_method(cfg.method, task, cfg, set.gates, seed, 0, false).report;
  const Circuit c = out.report.result_circuit.value_or(Circuit(prep.qubits));
  out.train_accuracy = accuracy(c, task.train(), task.n_classes());
  out.test_accuracy = accuracy(c, task.test(), task.n_classes());
  out.metadata = std::move(prep.metadata);
  out.report.extra["dataset"] = data.name;
  out.report.extra["train_accuracy"] = out.train_accuracy;
  out.report.extra["test_accuracy"] = out.test_accuracy;
  return out;
}

}  // namespace qmcgs
