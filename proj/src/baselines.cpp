#include "qmcgs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace qmcgs {

namespace {

// Best circuit seen and the success flag, shared by all four methods.
struct Tracker {
  Evaluator eval;
  double success_tol;
  std::optional<Circuit> best;
  double best_loss = std::numeric_limits<double>::infinity();
  bool success = false;

  Tracker(const Task& task, const SearchLimits& limits)
      : eval(task, limits.budget), success_tol(limits.success_tol) {}

  bool done() const { return success || eval.exhausted(); }

  double evaluate(const Circuit& c) {
    const double l = eval.evaluate(c);
    if (l < best_loss) {
      best_loss = l;
      best = c;
    }
    if (l <= success_tol && !success) {
      success = true;
      best = c;
      best_loss = l;
    }
    return l;
  }

  SearchReport report(const char* method, std::uint64_t seed) {
    SearchReport r;
    r.method = method;
    r.seed = seed;
    r.success = success;
    if (best) {
      r.result_circuit = *best;
      r.result_length = best->length();
    }
    eval.finish(r);
    return r;
  }
};

void check_gate_set(std::span<const GateInstance> gate_set, int n_qubits) {
  if (gate_set.empty()) throw std::invalid_argument("empty gate set");
  for (const auto& g : gate_set) validate_wires(g.wires, n_qubits);
}

double score(const Task& task, double loss, double beta) {
  return quality_score(loss / task.loss_scale(), beta);
}

Circuit copy_gates(const Circuit& src, std::size_t from, std::size_t to, Circuit dst) {
  for (std::size_t i = from; i < to; ++i) dst.append(src.gate(i), src.gate_params(i));
  return dst;
}

}  // namespace

Circuit random_circuit(int n_qubits, std::span<const GateInstance> gate_set, std::size_t length,
                       Rng& rng) {
  Circuit c(n_qubits);
  for (std::size_t i = 0; i < length; ++i) c.append(gate_set[uniform_index(rng, gate_set.size())]);
  return c;
}

SearchReport random_search(const Task& task, std::span<const GateInstance> gate_set,
                           std::size_t max_length, bool variable_length,
                           const SearchLimits& limits) {
  check_gate_set(gate_set, task.n_qubits());
  if (max_length < 1) throw std::invalid_argument("max_length must be at least 1");
  Rng rng(limits.seed);
  Tracker t(task, limits);
  while (!t.done()) {
    const std::size_t len = variable_length ? 1 + uniform_index(rng, max_length) : max_length;
    t.evaluate(random_circuit(task.n_qubits(), gate_set, len, rng));
  }
  return t.report("random", limits.seed);
}

std::pair<Circuit, Circuit> crossover_at(const Circuit& a, const Circuit& b, std::size_t j) {
  if (a.length() != b.length()) throw std::invalid_argument("crossover: parents differ in length");
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("crossover: parents differ in register");
  const std::size_t n = a.length();
  if (j < 1 || j >= n) throw std::out_of_range("crossover point outside 1..n-1");
  Circuit c1 = copy_gates(b, j, n, copy_gates(a, 0, j, Circuit(a.n_qubits())));
  Circuit c2 = copy_gates(a, j, n, copy_gates(b, 0, j, Circuit(a.n_qubits())));
  return {std::move(c1), std::move(c2)};
}

std::pair<Circuit, Circuit> crossover(const Circuit& a, const Circuit& b, Rng& rng) {
  if (a.length() != b.length()) throw std::invalid_argument("crossover: parents differ in length");
  if (a.length() < 2) return {a, b};
  return crossover_at(a, b, 1 + uniform_index(rng, a.length() - 1));
}

Circuit mutate(const Circuit& c, double rate, std::span<const GateInstance> gate_set, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("mutation rate outside [0,1]");
  Circuit out(c.n_qubits());
  for (std::size_t i = 0; i < c.length(); ++i) {
    if (rate > 0.0 && bernoulli(rng, rate)) {
      out.append(gate_set[uniform_index(rng, gate_set.size())]);
    } else {
      out.append(c.gate(i), c.gate_params(i));
    }
  }
  return out;
}

SearchReport genetic_algorithm(const Task& task, const GaConfig& cfg,
                               std::span<const GateInstance> gate_set, const SearchLimits& limits) {
  check_gate_set(gate_set, task.n_qubits());
  if (cfg.population < 2) throw std::invalid_argument("population must be at least 2");
  if (cfg.circuit_length < 1) throw std::invalid_argument("circuit_length must be at least 1");
  if (!(cfg.crossover_rate >= 0.0 && cfg.crossover_rate <= 1.0)) {
    throw std::invalid_argument("crossover rate outside [0,1]");
  }
  const double mut =
      cfg.mutation_rate < 0.0 ? std::min(1.0, 2.0 / static_cast<double>(cfg.circuit_length))
                              : cfg.mutation_rate;
  const std::size_t elites = std::min(cfg.elitism, cfg.population);
  Rng rng(limits.seed);
  Tracker t(task, limits);

  std::vector<Circuit> pop;
  for (std::size_t i = 0; i < cfg.population; ++i) {
    if (i < cfg.initial.size()) {
      if (cfg.initial[i].length() != cfg.circuit_length) {
        throw std::invalid_argument("initial individual has the wrong length");
      }
      pop.push_back(cfg.initial[i]);
    } else {
      pop.push_back(random_circuit(task.n_qubits(), gate_set, cfg.circuit_length, rng));
    }
  }
  std::vector<double> loss(pop.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pop.size() && !t.done(); ++i) loss[i] = t.evaluate(pop[i]);

  while (!t.done()) {
    std::vector<double> fit(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      fit[i] = std::isfinite(loss[i]) ? score(task, loss[i], limits.beta) : 0.0;
    }
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return loss[a] < loss[b]; });

    std::vector<Circuit> next;
    std::vector<double> next_loss;
    for (std::size_t e = 0; e < elites; ++e) {
      next.push_back(pop[order[e]]);
      next_loss.push_back(loss[order[e]]);
    }
    while (next.size() < cfg.population) {
      const Circuit& pa = pop[categorical(rng, fit)];
      const Circuit& pb = pop[categorical(rng, fit)];
      auto kids = bernoulli(rng, cfg.crossover_rate) ? crossover(pa, pb, rng)
                                                     : std::pair<Circuit, Circuit>{pa, pb};
      next.push_back(mutate(kids.first, mut, gate_set, rng));
      next_loss.push_back(std::numeric_limits<double>::infinity());
      if (next.size() < cfg.population) {
        next.push_back(mutate(kids.second, mut, gate_set, rng));
        next_loss.push_back(std::numeric_limits<double>::infinity());
      }
    }
    for (std::size_t i = elites; i < next.size() && !t.done(); ++i) next_loss[i] = t.evaluate(next[i]);
    pop = std::move(next);
    loss = std::move(next_loss);
  }
  return t.report("ga", limits.seed);
}

SearchReport particle_filter(const Task& task, const PfConfig& cfg,
                             std::span<const GateInstance> gate_set, const SearchLimits& limits) {
  check_gate_set(gate_set, task.n_qubits());
  if (cfg.particles < 1) throw std::invalid_argument("particle count must be at least 1");
  if (cfg.circuit_length < 1) throw std::invalid_argument("circuit_length must be at least 1");
  const double mut = cfg.mutation_rate < 0.0 ? 1.0 / static_cast<double>(cfg.circuit_length)
                                             : cfg.mutation_rate;
  Rng rng(limits.seed);
  Tracker t(task, limits);

  std::vector<Circuit> particles;
  for (std::size_t i = 0; i < cfg.particles; ++i) {
    if (i < cfg.initial.size()) {
      particles.push_back(cfg.initial[i]);
    } else {
      particles.push_back(random_circuit(task.n_qubits(), gate_set, cfg.circuit_length, rng));
    }
  }
  std::vector<double> weight(particles.size(), 0.0);
  for (std::size_t i = 0; i < particles.size() && !t.done(); ++i) {
    weight[i] = score(task, t.evaluate(particles[i]), limits.beta);
  }
  while (!t.done()) {
    std::vector<Circuit> next;
    next.reserve(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
      next.push_back(mutate(particles[categorical(rng, weight)], mut, gate_set, rng));
    }
    particles = std::move(next);
    for (std::size_t i = 0; i < particles.size() && !t.done(); ++i) {
      weight[i] = score(task, t.evaluate(particles[i]), limits.beta);
    }
  }
  return t.report("pf", limits.seed);
}

double sa_acceptance(double delta, double kT) {
  if (delta <= 0.0) return 1.0;
  if (!(kT > 0.0)) return 0.0;
  return std::exp(-delta / kT);
}

SearchReport simulated_annealing(const Task& task, const SaConfig& cfg,
                                 std::span<const GateInstance> gate_set,
                                 const SearchLimits& limits) {
  check_gate_set(gate_set, task.n_qubits());
  if (!(cfg.cooling > 0.0 && cfg.cooling < 1.0)) throw std::invalid_argument("cooling outside (0,1)");
  if (!(cfg.k > 0.0)) throw std::invalid_argument("k must be positive");
  if (cfg.min_length < 1 || cfg.max_length < cfg.min_length) {
    throw std::invalid_argument("bad length range");
  }
  Rng rng(limits.seed);
  Tracker t(task, limits);
  const int n = task.n_qubits();
  const std::size_t len0 =
      cfg.variable_length ? cfg.min_length + uniform_index(rng, cfg.max_length - cfg.min_length + 1)
                          : cfg.max_length;
  Circuit x = random_circuit(n, gate_set, len0, rng);
  double e = t.evaluate(x) / task.loss_scale();
  double temp = cfg.t0;
  for (std::size_t step = 0; !t.done() && (cfg.max_steps == 0 || step < cfg.max_steps); ++step) {
    Circuit y(n);
    const double r = uniform01(rng);
    if (cfg.variable_length && r < cfg.insert_prob && x.length() < cfg.max_length) {
      const std::size_t pos = uniform_index(rng, x.length() + 1);
      y = copy_gates(x, 0, pos, Circuit(n));
      y.append(gate_set[uniform_index(rng, gate_set.size())]);
      y = copy_gates(x, pos, x.length(), std::move(y));
    } else if (cfg.variable_length && r >= cfg.insert_prob &&
               r < cfg.insert_prob + cfg.delete_prob && x.length() > cfg.min_length) {
      const std::size_t pos = uniform_index(rng, x.length());
      y = copy_gates(x, pos + 1, x.length(), copy_gates(x, 0, pos, Circuit(n)));
    } else {
      const std::size_t pos = uniform_index(rng, x.length());
      y = copy_gates(x, 0, pos, Circuit(n));
      y.append(gate_set[uniform_index(rng, gate_set.size())]);
      y = copy_gates(x, pos + 1, x.length(), std::move(y));
    }
    const double ey = t.evaluate(y) / task.loss_scale();
    if (bernoulli(rng, sa_acceptance(ey - e, cfg.k * temp))) {
      x = std::move(y);
      e = ey;
    }
    temp *= cfg.cooling;
  }
  return t.report("sa", limits.seed);
}

}  // namespace qmcgs
