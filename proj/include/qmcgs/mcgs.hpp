#pragma once

// Monte Carlo graph search: draw a node with probability proportional to its
// score, apply a uniformly drawn gate from the left, merge the result into the
// graph, repeat until a node solves the task or the budget is spent.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qmcgs/gates.hpp"
#include "qmcgs/graph.hpp"
#include "qmcgs/param_opt.hpp"
#include "qmcgs/random.hpp"
#include "qmcgs/report.hpp"
#include "qmcgs/tasks.hpp"

namespace qmcgs {

struct McgsConfig {
  double epsilon = 1e-6;
  double beta = 2.0;
  double success_tol = 1e-6;
  std::size_t max_samples = 100000;
  std::vector<GateInstance> gate_set;
  bool optimize_params = true;
  std::uint64_t seed = 0;
  DescentConfig descent;
  DistanceMode distance = DistanceMode::PhaseSensitive;
  // 0: one categorical node draw per iteration. b > 0: each round includes
  // every node independently with probability min(1, b * pi_i).
  std::size_t batch_size = 0;
  // Draw gates only among those not yet expanded from the chosen node, and
  // drop nodes with no untried gate from node selection. Expanding the same
  // (node, gate) pair twice reproduces an existing edge, so this only removes
  // wasted samples.
  bool fresh_gates = true;
  // Nodes at this depth or deeper are not expanded (0: no limit).
  std::size_t max_depth = 0;
  // Start parameter descent from the parent witness's values with the new
  // gate at param_init. Off: every parameter starts at param_init, which
  // makes a node's parameters a function of its gate sequence, so one
  // sequence reached along different routes lands on one node.
  bool warm_start = true;
  // Zero is a stationary point of real-valued objectives such as the
  // classification loss under RX.
  double param_init = 0.0;
};

// pi_i = s_i / sum_j s_j. Throws std::invalid_argument if no score is positive.
std::vector<double> inclusion_probabilities(std::span<const double> scores);

// Cumulative score tree over an append-only score list: O(log n) draws.
class ScoreSampler {
 public:
  void push(double score);
  // Sets the weight of entry i to zero.
  void remove(std::size_t i);
  // Sets the weight of a removed entry back to score.
  void restore(std::size_t i, double score);
  std::size_t size() const { return n_; }
  double total() const;
  // Index i with probability s_i / total.
  std::size_t draw(Rng& rng) const;

 private:
  double prefix(std::size_t count) const;
  std::vector<double> tree_;  // 1-based Fenwick array
  std::vector<double> value_;
  std::size_t n_ = 0;
};

struct ExpandResult {
  std::size_t node = 0;
  bool was_new = false;
  double loss = 0.0;
};

class McgsSearch {
 public:
  McgsSearch(const Task& task, McgsConfig cfg);

  const CircuitGraph& graph() const { return graph_; }
  const McgsConfig& config() const { return cfg_; }
  const Evaluator& evaluator() const { return eval_; }
  Rng& rng() { return rng_; }

  std::size_t select_node();
  // Draws a gate uniformly unless gate_index is given; charges one sample.
  ExpandResult expand(std::size_t node, std::optional<std::size_t> gate_index = std::nullopt);

  // True when every node has tried every gate (fresh_gates only).
  bool saturated() const { return fresh_gates_left_ == 0; }

  // Runs to success, budget exhaustion or saturation. Call once.
  SearchReport run();

  std::optional<std::size_t> solved_node() const { return solved_; }
  std::size_t best_node() const { return best_node_; }

 private:
  double score_of(double loss) const;
  void add_scores();
  void note(std::size_t node, double loss);
  void retire(std::size_t node);
  void reinstate_relaxed();

  const Task& task_;
  McgsConfig cfg_;
  CircuitGraph graph_;
  Evaluator eval_;
  Rng rng_;
  ScoreSampler sampler_;
  std::vector<std::vector<std::uint8_t>> tried_;
  std::vector<std::size_t> tried_count_;
  std::size_t fresh_gates_left_ = 1;
  // Nodes retired at the depth cap; a shorter route found later frees them.
  std::vector<std::size_t> capped_;
  std::optional<std::size_t> solved_;
  std::size_t best_node_ = CircuitGraph::kRoot;
};

SearchReport run_search(const Task& task, const McgsConfig& cfg);

}  // namespace qmcgs
