#pragma once

// The growing circuit graph: vertices are epsilon-deduplicated unitaries,
// edges are elementary gates applied from the left. A vertex's witness is the
// gate sequence along its BFS-parent chain from the identity root.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qmcgs/circuit.hpp"
#include "qmcgs/gates.hpp"
#include "qmcgs/tensor.hpp"

namespace qmcgs {

enum class DistanceMode {
  PhaseSensitive,    // ||U - V||_F
  PhaseInsensitive,  // min_theta ||U - e^{i theta} V||_F
};

struct GraphNode {
  std::size_t id = 0;
  Matrix unitary;
  double loss = 0.0;
  double score = 1.0;
  std::size_t depth = 0;
  // Edge from the BFS parent; empty for the root.
  std::optional<std::size_t> parent_edge;
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  GateInstance gate;
  std::vector<double> bound_params;
};

struct InsertResult {
  std::size_t node = 0;
  bool was_new = false;
  bool edge_added = false;
};

class CircuitGraph {
 public:
  static constexpr std::size_t kRoot = 0;

  explicit CircuitGraph(int n_qubits, double epsilon = 1e-6,
                        DistanceMode mode = DistanceMode::PhaseSensitive);

  int n_qubits() const { return n_qubits_; }
  double epsilon() const { return epsilon_; }
  DistanceMode mode() const { return mode_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const GraphNode& node(std::size_t id) const { return nodes_.at(id); }
  const GraphEdge& edge(std::size_t id) const { return edges_.at(id); }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::span<const std::size_t> out_edges(std::size_t id) const { return out_.at(id); }

  void set_root_evaluation(double loss, double score);

  double distance(const Matrix& a, const Matrix& b) const;

  // Node within epsilon of u with minimal distance (ties: lowest id).
  std::optional<std::size_t> find_equivalent(const Matrix& u) const;
  // Same answer by exhaustive scan; kept as the index's oracle.
  std::optional<std::size_t> find_equivalent_linear(const Matrix& u) const;

  // Requires u == embed(gate at bound) * parent.unitary within 1e-9
  // (std::invalid_argument otherwise). Adds an edge to an equivalent node when
  // one exists, else a new node whose witness extends the parent's by `gate`.
  // Exact duplicate edges (same endpoints, gate and bound parameters) are not
  // added. A shorter route to an existing node relaxes its depth and parent,
  // and the relaxation propagates to its descendants.
  InsertResult insert(std::size_t parent, const GateInstance& gate,
                      std::span<const double> bound, Matrix u, double loss, double score);

  // Gate sequence along the BFS-parent chain.
  Circuit witness(std::size_t id) const;

  // Breadth-first shortest path (edge count) from the root, as a circuit.
  Circuit shortest_path_circuit(std::size_t target) const;

  // Edge-count distance from the root for every node (SIZE_MAX if unreachable).
  std::vector<std::size_t> bfs_depths() const;

  // Graph dump: "id,depth,loss,score,witness" and "from,to,gate".
  void write_nodes_csv(std::ostream& os) const;
  void write_edges_csv(std::ostream& os) const;

 private:
  using Key = std::array<std::int64_t, 4>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  std::array<double, 4> projection(const Matrix& u) const;
  std::vector<Key> candidate_keys(const Matrix& u) const;
  Key home_key(const Matrix& u) const;
  std::size_t add_edge(std::size_t from, std::size_t to, const GateInstance& gate,
                       std::span<const double> bound);
  void relax_from(std::size_t id);

  int n_qubits_;
  double epsilon_;
  DistanceMode mode_;
  double cell_;
  std::vector<std::vector<cplx>> weights_;
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> index_;
};

// Exhaustive consistency pass: pairwise node distinctness (> epsilon), edge
// consistency (gate * from within epsilon + 1e-9 of to), node depths and
// shortest-path circuit lengths against an independent breadth-first search,
// and witness reconstruction within L * epsilon + 1e-9. The pairwise check is
// skipped above max_pairwise_nodes (reported as not exhaustive).
struct GraphAudit {
  bool exhaustive = true;
  bool distinct = true;
  bool edges_consistent = true;
  bool depths_match = true;
  bool paths_match = true;
  bool witnesses_match = true;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::string failure;
  bool ok() const {
    return distinct && edges_consistent && depths_match && paths_match && witnesses_match;
  }
};

GraphAudit audit_graph(const CircuitGraph& g, std::size_t max_pairwise_nodes = 10000,
                       std::size_t path_samples = 256);

// Length of the shortest gate sequence over gate_set (parametric gates at 0)
// whose product is within epsilon of target, by breadth-first growth of a
// deduplicated graph to max_depth. Empty if not reached, or if the graph
// would exceed node_limit nodes.
std::optional<std::size_t> bfs_min_length(const Matrix& target, std::span<const GateInstance> gate_set,
                                          int n_qubits, std::size_t max_depth,
                                          double epsilon = 1e-6,
                                          std::size_t node_limit = 2000000);

// Breadth-first ball around the identity, built once: every product of at
// most max_depth gates (parametric gates at 0), deduplicated. Answers
// minimum-length queries without regrowing the graph.
class LengthOracle {
 public:
  // Throws std::length_error if the ball would exceed node_limit nodes.
  LengthOracle(std::span<const GateInstance> gate_set, int n_qubits, std::size_t max_depth,
               double epsilon = 1e-6, std::size_t node_limit = 2000000);

  std::size_t max_depth() const { return max_depth_; }
  std::size_t size() const { return graph_.node_count(); }
  // Minimum length, or empty when no product of <= max_depth gates matches.
  std::optional<std::size_t> min_length(const Matrix& target) const;

 private:
  std::size_t max_depth_;
  CircuitGraph graph_;
};

}  // namespace qmcgs
