#include "qmcgs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <cstdio>
#include <string>

#include "qmcgs/random.hpp"
#include <stdexcept>

namespace qmcgs {

namespace {

constexpr double kConsistencyTol = 1e-9;
// Index cell width in units of epsilon. Wider cells mean fewer neighbour
// probes per lookup and larger buckets.
constexpr double kCellPerEpsilon = 64.0;
constexpr std::uint64_t kWeightSeed = 0x5eed'1234'abcdULL;

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::size_t CircuitGraph::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto v : k) {
    h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

CircuitGraph::CircuitGraph(int n_qubits, double epsilon, DistanceMode mode)
    : n_qubits_(n_qubits),
      epsilon_(epsilon),
      mode_(mode),
      cell_(std::max(kCellPerEpsilon * epsilon, 1e-12)) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DimensionError("bad register size");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  const std::size_t dim = std::size_t{1} << n_qubits;
  // Unit-norm complex functionals f_k(U) = sum conj(w) U; |f_k(U) - f_k(V)|
  // never exceeds ||U - V||_F, so equivalent unitaries land in the same or an
  // adjacent cell in every coordinate.
  Rng gen(kWeightSeed);
  weights_.assign(3, std::vector<cplx>(dim * dim));
  for (auto& w : weights_) {
    double s = 0.0;
    for (auto& z : w) {
      z = cplx(2.0 * uniform01(gen) - 1.0, 2.0 * uniform01(gen) - 1.0);
      s += std::norm(z);
    }
    for (auto& z : w) z /= std::sqrt(s);
  }
  GraphNode root;
  root.id = kRoot;
  root.unitary = Matrix::identity(dim);
  nodes_.push_back(root);
  out_.emplace_back();
  index_[home_key(nodes_[0].unitary)].push_back(kRoot);
}

void CircuitGraph::set_root_evaluation(double loss, double score) {
  nodes_[kRoot].loss = loss;
  nodes_[kRoot].score = score;
}

double CircuitGraph::distance(const Matrix& a, const Matrix& b) const {
  return mode_ == DistanceMode::PhaseSensitive ? frobenius_distance(a, b)
                                               : phase_insensitive_distance(a, b);
}

std::array<double, 4> CircuitGraph::projection(const Matrix& u) const {
  const auto e = u.entries();
  std::array<cplx, 3> f{};
  for (std::size_t k = 0; k < 3; ++k) {
    cplx acc{};
    for (std::size_t i = 0; i < e.size(); ++i) acc += std::conj(weights_[k][i]) * e[i];
    f[k] = acc;
  }
  if (mode_ == DistanceMode::PhaseSensitive) {
    return {f[0].real(), f[0].imag(), f[1].real(), f[1].imag()};
  }
  return {std::abs(f[0]), std::abs(f[1]), std::abs(f[2]), 0.0};
}

CircuitGraph::Key CircuitGraph::home_key(const Matrix& u) const {
  const auto p = projection(u);
  Key k{};
  for (std::size_t i = 0; i < 4; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_));
  return k;
}

std::vector<CircuitGraph::Key> CircuitGraph::candidate_keys(const Matrix& u) const {
  const auto p = projection(u);
  std::array<std::vector<std::int64_t>, 4> options;
  for (std::size_t i = 0; i < 4; ++i) {
    const double x = p[i] / cell_;
    const auto c = static_cast<std::int64_t>(std::floor(x));
    options[i].push_back(c);
    const double reach = epsilon_ / cell_;
    if (x - static_cast<double>(c) <= reach) options[i].push_back(c - 1);
    if (static_cast<double>(c + 1) - x <= reach) options[i].push_back(c + 1);
  }
  std::vector<Key> keys;
  for (auto a : options[0])
    for (auto b : options[1])
      for (auto c : options[2])
        for (auto d : options[3]) keys.push_back({a, b, c, d});
  return keys;
}

std::optional<std::size_t> CircuitGraph::find_equivalent(const Matrix& u) const {
  if (u.rows() != nodes_[0].unitary.rows() || u.cols() != nodes_[0].unitary.cols()) {
    throw DimensionError("lookup operator does not match register size");
  }
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& key : candidate_keys(u)) {
    auto it = index_.find(key);
    if (it == index_.end()) continue;
    for (std::size_t id : it->second) {
      const double d = distance(nodes_[id].unitary, u);
      if (d <= epsilon_ && (d < best_d || (d == best_d && id < *best))) {
        best = id;
        best_d = d;
      }
    }
  }
  return best;
}

std::optional<std::size_t> CircuitGraph::find_equivalent_linear(const Matrix& u) const {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes_) {
    const double d = distance(n.unitary, u);
    if (d <= epsilon_ && d < best_d) {
      best = n.id;
      best_d = d;
    }
  }
  return best;
}

std::size_t CircuitGraph::add_edge(std::size_t from, std::size_t to, const GateInstance& gate,
                                   std::span<const double> bound) {
  GraphEdge e{from, to, GateInstance{gate.spec, gate.wires, {}},
              std::vector<double>(bound.begin(), bound.end())};
  edges_.push_back(std::move(e));
  out_[from].push_back(edges_.size() - 1);
  return edges_.size() - 1;
}

InsertResult CircuitGraph::insert(std::size_t parent, const GateInstance& gate,
                                  std::span<const double> bound, Matrix u, double loss,
                                  double score) {
  if (parent >= nodes_.size()) throw std::out_of_range("insert: unknown parent node");
  Matrix expected = nodes_[parent].unitary;
  apply_left(expected, gate.spec->matrix(bound), gate.wires, n_qubits_);
  if (frobenius_distance(expected, u) > kConsistencyTol) {
    throw std::invalid_argument("insert: unitary does not equal gate " + gate.label() +
                                " applied to the parent node");
  }
  if (!(score >= 0.0)) throw std::invalid_argument("insert: score must be nonnegative");

  InsertResult result;
  if (auto existing = find_equivalent(u)) {
    result.node = *existing;
    for (std::size_t eid : out_[parent]) {
      const GraphEdge& e = edges_[eid];
      if (e.to == *existing && e.gate.same_placement(gate) &&
          std::equal(e.bound_params.begin(), e.bound_params.end(), bound.begin(), bound.end())) {
        return result;
      }
    }
    const std::size_t eid = add_edge(parent, *existing, gate, bound);
    result.edge_added = true;
    GraphNode& target = nodes_[*existing];
    if (*existing != kRoot && nodes_[parent].depth + 1 < target.depth) {
      target.depth = nodes_[parent].depth + 1;
      target.parent_edge = eid;
      relax_from(*existing);
    }
    return result;
  }

  GraphNode n;
  n.id = nodes_.size();
  n.unitary = std::move(u);
  n.loss = loss;
  n.score = score;
  n.depth = nodes_[parent].depth + 1;
  index_[home_key(n.unitary)].push_back(n.id);
  nodes_.push_back(std::move(n));
  out_.emplace_back();
  const std::size_t eid = add_edge(parent, nodes_.back().id, gate, bound);
  nodes_.back().parent_edge = eid;
  result.node = nodes_.back().id;
  result.was_new = true;
  result.edge_added = true;
  return result;
}

void CircuitGraph::relax_from(std::size_t id) {
  std::deque<std::size_t> queue{id};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t eid : out_[v]) {
      const GraphEdge& e = edges_[eid];
      GraphNode& w = nodes_[e.to];
      if (e.to != kRoot && nodes_[v].depth + 1 < w.depth) {
        w.depth = nodes_[v].depth + 1;
        w.parent_edge = eid;
        queue.push_back(e.to);
      }
    }
  }
}

Circuit CircuitGraph::witness(std::size_t id) const {
  std::vector<std::size_t> chain;
  for (std::size_t v = id; nodes_.at(v).parent_edge;) {
    const std::size_t eid = *nodes_[v].parent_edge;
    chain.push_back(eid);
    v = edges_[eid].from;
  }
  Circuit c(n_qubits_);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    c.append(edges_[*it].gate, edges_[*it].bound_params);
  }
  return c;
}

std::vector<std::size_t> CircuitGraph::bfs_depths() const {
  std::vector<std::size_t> depth(nodes_.size(), std::numeric_limits<std::size_t>::max());
  std::deque<std::size_t> queue{kRoot};
  depth[kRoot] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t eid : out_[v]) {
      const std::size_t w = edges_[eid].to;
      if (depth[w] == std::numeric_limits<std::size_t>::max()) {
        depth[w] = depth[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return depth;
}

Circuit CircuitGraph::shortest_path_circuit(std::size_t target) const {
  if (target >= nodes_.size()) throw std::out_of_range("shortest_path_circuit: unknown node");
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> via(nodes_.size(), kNone);
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<std::size_t> queue{kRoot};
  seen[kRoot] = true;
  while (!queue.empty() && !seen[target]) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t eid : out_[v]) {
      const std::size_t w = edges_[eid].to;
      if (!seen[w]) {
        seen[w] = true;
        via[w] = eid;
        queue.push_back(w);
      }
    }
  }
  if (!seen[target]) throw std::logic_error("shortest_path_circuit: node unreachable from root");
  std::vector<std::size_t> path;
  for (std::size_t v = target; v != kRoot; v = edges_[via[v]].from) path.push_back(via[v]);
  Circuit c(n_qubits_);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    c.append(edges_[*it].gate, edges_[*it].bound_params);
  }
  return c;
}

void CircuitGraph::write_nodes_csv(std::ostream& os) const {
  os << "#schema=qmcgs.graph_nodes.v1\n";
  os << "id,depth,loss,score,witness\n";
  char buf[64];
  for (const auto& n : nodes_) {
    os << n.id << "," << n.depth << ",";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", n.loss, n.score);
    os << buf << "," << csv_quote(to_inline(witness(n.id))) << "\n";
  }
}

void CircuitGraph::write_edges_csv(std::ostream& os) const {
  os << "#schema=qmcgs.graph_edges.v1\n";
  os << "from,to,gate\n";
  for (const auto& e : edges_) {
    Circuit one(n_qubits_);
    one.append(e.gate, e.bound_params);
    os << e.from << "," << e.to << "," << csv_quote(to_inline(one)) << "\n";
  }
}

}  // namespace qmcgs
