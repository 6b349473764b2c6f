#include <deque>
#include <stdexcept>
#include <string>
#include <limits>

#include "qmcgs/graph.hpp"

namespace qmcgs {

namespace {

constexpr double kSlack = 1e-9;

// Frobenius distance with early exit once it exceeds bound.
bool within(const Matrix& a, const Matrix& b, double bound) {
  const auto x = a.entries();
  const auto y = b.entries();
  const double limit = bound * bound;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += std::norm(x[i] - y[i]);
    if (acc > limit) return false;
  }
  return true;
}

}  // namespace

GraphAudit audit_graph(const CircuitGraph& g, std::size_t max_pairwise_nodes,
                       std::size_t path_samples) {
  GraphAudit a;
  const auto& nodes = g.nodes();
  const auto& edges = g.edges();
  a.nodes = nodes.size();
  a.edges = edges.size();
  const double eps = g.epsilon();
  const bool phase = g.mode() == DistanceMode::PhaseInsensitive;
  auto fail = [&](bool& flag, const std::string& what) {
    if (flag && a.failure.empty()) a.failure = what;
    flag = false;
  };

  if (nodes.size() <= max_pairwise_nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        const bool close = phase ? g.distance(nodes[i].unitary, nodes[j].unitary) <= eps
                                 : within(nodes[i].unitary, nodes[j].unitary, eps);
        if (close) {
          fail(a.distinct, "nodes " + std::to_string(i) + " and " + std::to_string(j) +
                               " are within epsilon");
        }
      }
    }
  } else {
    a.exhaustive = false;
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& ed = edges[e];
    Matrix u = nodes[ed.from].unitary;
    apply_left(u, ed.gate.spec->matrix(ed.bound_params), ed.gate.wires, g.n_qubits());
    if (g.distance(u, nodes[ed.to].unitary) > eps + kSlack) {
      fail(a.edges_consistent, "edge " + std::to_string(e) + " is inconsistent");
    }
  }

  // Independent BFS over an adjacency list built from the edge table.
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (const auto& ed : edges) adj[ed.from].push_back(ed.to);
  std::vector<std::size_t> dist(nodes.size(), kInf);
  std::deque<std::size_t> queue{CircuitGraph::kRoot};
  dist[CircuitGraph::kRoot] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : adj[v]) {
      if (dist[w] == kInf) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (dist[i] == kInf || nodes[i].depth != dist[i]) {
      fail(a.depths_match, "node " + std::to_string(i) + " depth differs from BFS distance");
    }
    const Circuit w = g.witness(i);
    if (w.length() != nodes[i].depth) {
      fail(a.witnesses_match, "node " + std::to_string(i) + " witness length differs from depth");
    }
    const double tol = static_cast<double>(w.length()) * eps + kSlack;
    if (g.distance(evaluate(w), nodes[i].unitary) > tol) {
      fail(a.witnesses_match, "node " + std::to_string(i) + " witness does not reproduce it");
    }
  }

  const std::size_t stride = std::max<std::size_t>(1, nodes.size() / std::max<std::size_t>(1, path_samples));
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < nodes.size(); i += stride) picks.push_back(i);
  if (!nodes.empty()) picks.push_back(nodes.size() - 1);
  for (std::size_t i : picks) {
    if (dist[i] == kInf) continue;
    const Circuit c = g.shortest_path_circuit(i);
    if (c.length() != dist[i]) {
      fail(a.paths_match, "shortest path to node " + std::to_string(i) + " has wrong length");
    }
    const double tol = static_cast<double>(c.length()) * eps + kSlack;
    if (g.distance(evaluate(c), nodes[i].unitary) > tol) {
      fail(a.paths_match, "shortest path to node " + std::to_string(i) + " does not reproduce it");
    }
  }
  return a;
}

std::optional<std::size_t> bfs_min_length(const Matrix& target, std::span<const GateInstance> gate_set,
                                          int n_qubits, std::size_t max_depth, double epsilon,
                                          std::size_t node_limit) {
  CircuitGraph g(n_qubits, epsilon);
  if (g.distance(g.node(CircuitGraph::kRoot).unitary, target) <= epsilon) return 0;
  std::vector<std::size_t> frontier{CircuitGraph::kRoot};
  for (std::size_t depth = 1; depth <= max_depth; ++depth) {
    std::vector<std::size_t> next;
    for (std::size_t v : frontier) {
      for (const auto& gate : gate_set) {
        const std::vector<double> bound(gate.n_params(), 0.0);
        Matrix u = g.node(v).unitary;
        apply_left(u, gate.spec->matrix(bound), gate.wires, n_qubits);
        const bool hit = g.distance(u, target) <= epsilon;
        const auto ins = g.insert(v, gate, bound, std::move(u), 0.0, 1.0);
        if (hit) return depth;
        if (ins.was_new) next.push_back(ins.node);
        if (g.node_count() > node_limit) return std::nullopt;
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return std::nullopt;
}

LengthOracle::LengthOracle(std::span<const GateInstance> gate_set, int n_qubits,
                           std::size_t max_depth, double epsilon, std::size_t node_limit)
    : max_depth_(max_depth), graph_(n_qubits, epsilon) {
  std::vector<std::size_t> frontier{CircuitGraph::kRoot};
  for (std::size_t depth = 1; depth <= max_depth && !frontier.empty(); ++depth) {
    std::vector<std::size_t> next;
    for (std::size_t v : frontier) {
      for (const auto& gate : gate_set) {
        const std::vector<double> bound(gate.n_params(), 0.0);
        Matrix u = graph_.node(v).unitary;
        apply_left(u, gate.spec->matrix(bound), gate.wires, n_qubits);
        const auto ins = graph_.insert(v, gate, bound, std::move(u), 0.0, 1.0);
        if (ins.was_new) next.push_back(ins.node);
        if (graph_.node_count() > node_limit) {
          throw std::length_error("length oracle exceeds " + std::to_string(node_limit) + " nodes");
        }
      }
    }
    frontier = std::move(next);
  }
}

std::optional<std::size_t> LengthOracle::min_length(const Matrix& target) const {
  const auto id = graph_.find_equivalent(target);
  if (!id) return std::nullopt;
  return graph_.node(*id).depth;
}

}  // namespace qmcgs
