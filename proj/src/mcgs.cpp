#include "qmcgs/mcgs.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace qmcgs {

std::vector<double> inclusion_probabilities(std::span<const double> scores) {
  double total = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0)) throw std::invalid_argument("scores must be nonnegative");
    total += s;
  }
  if (!(total > 0.0)) throw std::invalid_argument("at least one score must be positive");
  std::vector<double> pi(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) pi[i] = scores[i] / total;
  return pi;
}

void ScoreSampler::push(double score) {
  if (!(score >= 0.0)) throw std::invalid_argument("scores must be nonnegative");
  value_.push_back(score);
  ++n_;
  tree_.resize(n_ + 1, 0.0);
  // New Fenwick slot n covers (n - lowbit(n), n]; rebuild it from its children.
  double v = score;
  const std::size_t low = n_ & (~n_ + 1);
  for (std::size_t step = 1; step < low; step <<= 1) v += tree_[n_ - step];
  tree_[n_] = v;
}

void ScoreSampler::remove(std::size_t i) {
  const double v = value_.at(i);
  if (v == 0.0) return;
  value_[i] = 0.0;
  for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] -= v;
}

void ScoreSampler::restore(std::size_t i, double score) {
  if (value_.at(i) != 0.0 || score <= 0.0) return;
  value_[i] = score;
  for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] += score;
}

double ScoreSampler::prefix(std::size_t count) const {
  double s = 0.0;
  for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
  return s;
}

double ScoreSampler::total() const { return prefix(n_); }

std::size_t ScoreSampler::draw(Rng& rng) const {
  if (n_ == 0) throw std::logic_error("draw from an empty sampler");
  const double t = total();
  if (!(t > 0.0)) throw std::invalid_argument("at least one score must be positive");
  double rem = uniform01(rng) * t;
  std::size_t pos = 0;
  for (std::size_t step = std::bit_floor(n_); step > 0; step >>= 1) {
    if (pos + step <= n_ && tree_[pos + step] <= rem) {
      pos += step;
      rem -= tree_[pos];
    }
  }
  // Round-off can walk past the last positive weight.
  if (pos >= n_) pos = n_ - 1;
  return pos;
}

McgsSearch::McgsSearch(const Task& task, McgsConfig cfg)
    : task_(task),
      cfg_(std::move(cfg)),
      graph_(task.n_qubits(), cfg_.epsilon, cfg_.distance),
      eval_(task, cfg_.max_samples),
      rng_(cfg_.seed) {
  if (cfg_.max_samples < 1) throw std::invalid_argument("max_samples must be at least 1");
  if (!(cfg_.beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  if (cfg_.gate_set.empty()) throw std::invalid_argument("empty gate set");
  for (const auto& g : cfg_.gate_set) {
    validate_wires(g.wires, task.n_qubits());
  }
  fresh_gates_left_ = cfg_.fresh_gates ? 0 : 1;
  const double root_loss = eval_.evaluate_aux(graph_.node(CircuitGraph::kRoot).unitary);
  graph_.set_root_evaluation(root_loss, score_of(root_loss));
  add_scores();
  note(CircuitGraph::kRoot, root_loss);
  eval_.note_graph(graph_.node_count(), graph_.edge_count());
}

double McgsSearch::score_of(double loss) const {
  return quality_score(loss / task_.loss_scale(), cfg_.beta);
}

void McgsSearch::add_scores() {
  while (sampler_.size() < graph_.node_count()) {
    sampler_.push(graph_.node(sampler_.size()).score);
    tried_.emplace_back();
    tried_count_.push_back(0);
    if (cfg_.fresh_gates) fresh_gates_left_ += cfg_.gate_set.size();
  }
}

// Removes a node from selection and from the fresh-gate pool.
void McgsSearch::retire(std::size_t node) {
  sampler_.remove(node);
  if (cfg_.fresh_gates && tried_count_[node] < cfg_.gate_set.size()) {
    fresh_gates_left_ -= cfg_.gate_set.size() - tried_count_[node];
    tried_count_[node] = cfg_.gate_set.size();
    tried_[node].assign(cfg_.gate_set.size(), 1);
  }
}

void McgsSearch::note(std::size_t node, double loss) {
  if (loss < graph_.node(best_node_).loss) best_node_ = node;
  if (!solved_ && loss <= cfg_.success_tol) solved_ = node;
}

void McgsSearch::reinstate_relaxed() {
  std::erase_if(capped_, [&](std::size_t id) {
    if (graph_.node(id).depth >= cfg_.max_depth) return false;
    if (cfg_.fresh_gates) {
      tried_[id].assign(cfg_.gate_set.size(), 0);
      fresh_gates_left_ += tried_count_[id];
      tried_count_[id] = 0;
    }
    sampler_.restore(id, graph_.node(id).score);
    return true;
  });
}

std::size_t McgsSearch::select_node() { return sampler_.draw(rng_); }

ExpandResult McgsSearch::expand(std::size_t node, std::optional<std::size_t> gate_index) {
  if (node >= graph_.node_count()) throw std::out_of_range("expand: unknown node");
  const std::size_t n_gates = cfg_.gate_set.size();
  std::size_t idx = 0;
  if (gate_index) {
    idx = *gate_index;
  } else if (cfg_.fresh_gates && tried_count_[node] > 0) {
    // k-th untried gate, k uniform.
    std::size_t k = uniform_index(rng_, n_gates - std::min(tried_count_[node], n_gates - 1));
    for (idx = 0; idx < n_gates; ++idx) {
      if (!tried_[node][idx] && k-- == 0) break;
    }
    if (idx == n_gates) idx = uniform_index(rng_, n_gates);
  } else {
    idx = uniform_index(rng_, n_gates);
  }
  if (cfg_.fresh_gates && idx < n_gates) {
    auto& t = tried_[node];
    if (t.empty()) t.assign(n_gates, 0);
    if (!t[idx]) {
      t[idx] = 1;
      --fresh_gates_left_;
      if (++tried_count_[node] == n_gates) sampler_.remove(node);
    }
  }
  const GateInstance& g = cfg_.gate_set.at(idx);
  const int n = task_.n_qubits();
  const Objective* objective = cfg_.optimize_params ? task_.objective() : nullptr;

  Circuit parent_w;
  bool reoptimize = false;
  if (objective) {
    parent_w = graph_.witness(node);
    reoptimize = parent_w.param_count() + static_cast<std::size_t>(g.n_params()) > 0;
  }

  ExpandResult out;
  if (!reoptimize) {
    const std::vector<double> bound(g.n_params(), 0.0);
    Matrix u = graph_.node(node).unitary;
    apply_left(u, g.spec->matrix(bound), g.wires, n);
    const double l = eval_.evaluate(u);
    const auto ins = graph_.insert(node, g, bound, std::move(u), l, score_of(l));
    out = {ins.node, ins.was_new, graph_.node(ins.node).loss};
  } else {
    Circuit cand = parent_w;
    cand.append(g);
    if (cfg_.warm_start) {
      std::vector<double> p = cand.params();
      std::fill(p.begin() + static_cast<std::ptrdiff_t>(parent_w.param_count()), p.end(), cfg_.param_init);
      cand.set_params(std::move(p));
    } else {
      cand.set_params(std::vector<double>(cand.param_count(), cfg_.param_init));
    }
    const DescentResult d = gradient_descent(cand, *objective, cfg_.descent);
    eval_.add_gradient_steps(d.iters + (d.rolled_back ? 1 : 0));
    const bool parent_moved =
        !std::equal(parent_w.params().begin(), parent_w.params().end(), d.params.begin());
    cand.set_params(d.params);

    // Re-optimised parent parameters describe a different path, so the whole
    // chain is re-anchored at the root; intermediate nodes are scored as
    // auxiliary evaluations.
    const std::size_t first = parent_moved ? 0 : cand.length() - 1;
    std::size_t prev = parent_moved ? CircuitGraph::kRoot : node;
    std::vector<std::size_t> intermediate;
    for (std::size_t k = first; k < cand.length(); ++k) {
      const auto bound = cand.gate_params(k);
      Matrix u = graph_.node(prev).unitary;
      apply_left(u, cand.gate(k).spec->matrix(bound), cand.gate(k).wires, n);
      const bool last = k + 1 == cand.length();
      const double l = last ? eval_.evaluate(u) : eval_.evaluate_aux(u);
      const auto ins = graph_.insert(prev, cand.gate(k), bound, std::move(u), l, score_of(l));
      if (ins.was_new) {
        note(ins.node, l);
        if (!last) intermediate.push_back(ins.node);
      }
      prev = ins.node;
      if (last) out = {ins.node, ins.was_new, graph_.node(ins.node).loss};
    }
    // Chain nodes only carry the path; they are not expanded themselves.
    add_scores();
    for (std::size_t id : intermediate) {
      if (id != out.node) retire(id);
    }
  }
  if (out.was_new) note(out.node, out.loss);
  add_scores();
  if (cfg_.max_depth > 0) {
    if (out.was_new && graph_.node(out.node).depth >= cfg_.max_depth) {
      retire(out.node);
      capped_.push_back(out.node);
    } else if (!out.was_new && !capped_.empty()) {
      reinstate_relaxed();
    }
  }
  eval_.note_graph(graph_.node_count(), graph_.edge_count());
  return out;
}

SearchReport McgsSearch::run() {
  while (!solved_ && !eval_.exhausted() && !saturated()) {
    if (cfg_.batch_size == 0) {
      expand(select_node());
      continue;
    }
    const std::size_t count = graph_.node_count();
    const double total = sampler_.total();
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < count; ++i) {
      const double p = static_cast<double>(cfg_.batch_size) * graph_.node(i).score / total;
      if (bernoulli(rng_, p)) chosen.push_back(i);
    }
    if (chosen.empty()) chosen.push_back(select_node());
    for (std::size_t i : chosen) {
      if (solved_ || eval_.exhausted() || saturated()) break;
      if (cfg_.fresh_gates && tried_count_[i] == cfg_.gate_set.size()) continue;
      expand(i);
    }
  }

  SearchReport r;
  r.method = "mcgs";
  r.seed = cfg_.seed;
  r.success = solved_.has_value();
  const std::size_t target = solved_ ? *solved_ : best_node_;
  r.result_circuit = graph_.shortest_path_circuit(target);
  r.result_length = r.result_circuit->length();
  r.nodes = graph_.node_count();
  r.edges = graph_.edge_count();
  eval_.finish(r);
  return r;
}

SearchReport run_search(const Task& task, const McgsConfig& cfg) {
  McgsSearch search(task, cfg);
  return search.run();
}

}  // namespace qmcgs
