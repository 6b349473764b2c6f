#pragma once

// Comparison optimizers over gate sequences: random sampling, a genetic
// algorithm, a particle filter and simulated annealing. All of them charge
// samples through the same Evaluator as the graph search. Parameters of
// parametric gates stay at their initial value (0); these methods search the
// discrete structure only.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qmcgs/circuit.hpp"
#include "qmcgs/gates.hpp"
#include "qmcgs/random.hpp"
#include "qmcgs/report.hpp"
#include "qmcgs/tasks.hpp"

namespace qmcgs {

struct SearchLimits {
  std::size_t budget = 100000;
  double success_tol = 1e-6;
  std::uint64_t seed = 0;
  // Scores are exp(-beta * loss / task.loss_scale()).
  double beta = 2.0;
};

struct GaConfig {
  std::size_t population = 50;
  double crossover_rate = 0.9;
  // Negative: 2 / circuit_length.
  double mutation_rate = -1.0;
  std::size_t elitism = 2;
  std::size_t circuit_length = 5;
  // Optional generation-0 individuals; the rest are drawn at random.
  std::vector<Circuit> initial;
};

struct PfConfig {
  std::size_t particles = 50;
  // Negative: 1 / circuit_length.
  double mutation_rate = -1.0;
  std::size_t circuit_length = 5;
  std::vector<Circuit> initial;
};

struct SaConfig {
  double t0 = 1.0;
  double cooling = 0.995;
  double k = 1.0;
  // 0: run until the budget is spent.
  std::size_t max_steps = 0;
  bool variable_length = true;
  std::size_t min_length = 1;
  std::size_t max_length = 5;
  double insert_prob = 0.1;
  double delete_prob = 0.1;
};

// Circuit of uniformly drawn gates; parametric gates start at 0.
Circuit random_circuit(int n_qubits, std::span<const GateInstance> gate_set, std::size_t length,
                       Rng& rng);

SearchReport random_search(const Task& task, std::span<const GateInstance> gate_set,
                           std::size_t max_length, bool variable_length,
                           const SearchLimits& limits);

// One-point crossover after position j (1 <= j < n): children
// (a_1..a_j, b_{j+1}..b_n) and (b_1..b_j, a_{j+1}..a_n). Gates carry their
// parameter values into fresh slots. Throws on length or register mismatch.
std::pair<Circuit, Circuit> crossover_at(const Circuit& a, const Circuit& b, std::size_t j);
// j uniform in 1..n-1; circuits shorter than 2 are returned unchanged.
std::pair<Circuit, Circuit> crossover(const Circuit& a, const Circuit& b, Rng& rng);

// Each position independently replaced, with probability rate, by a uniform
// gate from the set.
Circuit mutate(const Circuit& c, double rate, std::span<const GateInstance> gate_set, Rng& rng);

SearchReport genetic_algorithm(const Task& task, const GaConfig& cfg,
                               std::span<const GateInstance> gate_set, const SearchLimits& limits);

SearchReport particle_filter(const Task& task, const PfConfig& cfg,
                             std::span<const GateInstance> gate_set, const SearchLimits& limits);

// Probability of accepting an energy change delta at temperature kT.
double sa_acceptance(double delta, double kT);

SearchReport simulated_annealing(const Task& task, const SaConfig& cfg,
                                 std::span<const GateInstance> gate_set,
                                 const SearchLimits& limits);

}  // namespace qmcgs
