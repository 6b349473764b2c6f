#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "qmcgs/graph.hpp"
#include "qmcgs/mcgs.hpp"
#include "qmcgs/random.hpp"
#include "qmcgs/report.hpp"

using namespace qmcgs;

namespace {
McgsConfig base_config(std::vector<GateInstance> gates, std::uint64_t seed = 0) {
  McgsConfig c;
  c.gate_set = std::move(gates);
  c.seed = seed;
  c.optimize_params = false;
  return c;
}

// chi-square statistic of counts against expected probabilities
double chi_square(const std::vector<double>& counts, const std::vector<double>& p, double n) {
  double chi = 0;
  for (std::size_t i = 0; i < p.size(); ++i) chi += std::pow(counts[i] - n * p[i], 2) / (n * p[i]);
  return chi;
}
}  // namespace

TEST_SUITE("mcgs") {
  TEST_CASE("quality score") {
    CHECK(quality_score(0.0, 3.0) == 1.0);
    CHECK(quality_score(2.5, 0.0) == 1.0);
    CHECK(quality_score(1.0, 2.0) == doctest::Approx(0.1353352832366127));
    CHECK(quality_score(2.0, 1.0) < quality_score(1.0, 1.0));
    CHECK_THROWS(quality_score(-1.0, 1.0));
  }

  TEST_CASE("inclusion probabilities") {
    const std::vector<double> four{1, 1, 1, 1};
    for (double p : inclusion_probabilities(four)) CHECK(p == 0.25);
    const std::vector<double> two{3, 1};
    CHECK(inclusion_probabilities(two) == std::vector<double>{0.75, 0.25});
    const std::vector<double> zeros{0, 0};
    CHECK_THROWS_AS(inclusion_probabilities(zeros), std::invalid_argument);
  }

  TEST_CASE("score sampler frequencies within 3 sigma") {
    const std::vector<double> scores{0.5, 2.0, 0.1, 1.4, 1.0};
    ScoreSampler s;
    for (double v : scores) s.push(v);
    const auto pi = inclusion_probabilities(scores);
    Rng rng(17);
    const int n = 100000;
    std::vector<double> counts(scores.size());
    for (int i = 0; i < n; ++i) counts[s.draw(rng)] += 1;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double sigma = std::sqrt(n * pi[i] * (1 - pi[i]));
      CHECK(std::abs(counts[i] - n * pi[i]) < 3 * sigma);
    }
    s.remove(1);
    for (int i = 0; i < 1000; ++i) CHECK(s.draw(rng) != 1);
    s.restore(1, 2.0);
    CHECK(s.total() == doctest::Approx(5.0));
  }

  TEST_CASE("a sharp score picks the root") {
    const Matrix target = Matrix::identity(2);
    const UnitarySynthesisTask task(Matrix{{0, 1}, {1, 0}});
    McgsSearch one(task, base_config({make_gate("H", {0}, 1)}));
    for (int i = 0; i < 10; ++i) CHECK(one.select_node() == CircuitGraph::kRoot);

    auto cfg = base_config({make_gate("H", {0}, 1), make_gate("Z", {0}, 1)});
    cfg.beta = 200.0;
    cfg.fresh_gates = false;
    // identity target: the root is exact, every child is far
    const UnitarySynthesisTask id_task(target);
    McgsSearch s(id_task, cfg);
    s.expand(CircuitGraph::kRoot, 0);
    int root = 0;
    for (int i = 0; i < 1000; ++i) root += s.select_node() == CircuitGraph::kRoot;
    CHECK(root == 1000);
  }

  TEST_CASE("forced expansions") {
    const UnitarySynthesisTask task(Matrix{{0, 1}, {1, 0}});
    auto cfg = base_config({make_gate("H", {0}, 1), make_gate("X", {0}, 1)});
    McgsSearch s(task, cfg);
    const auto h = s.expand(CircuitGraph::kRoot, 0);
    CHECK(h.was_new);
    CHECK(oracle::max_abs_diff(s.graph().node(h.node).unitary, gate_spec("H").matrix()) < 1e-15);
    const auto x = s.expand(CircuitGraph::kRoot, 1);
    const std::size_t nodes = s.graph().node_count();
    const auto back = s.expand(x.node, 1);
    CHECK(back.node == CircuitGraph::kRoot);
    CHECK_FALSE(back.was_new);
    CHECK(s.graph().node_count() == nodes);
    CHECK(s.evaluator().used() == 3);
  }

  TEST_CASE("gate draws are uniform") {
    // four distinct one-qubit gates from the root; the child id identifies the gate
    std::vector<GateInstance> gates{make_gate("X", {0}, 1), make_gate("Y", {0}, 1),
                                    make_gate("Z", {0}, 1), make_gate("H", {0}, 1)};
    const UnitarySynthesisTask task(gate_spec("S").matrix());
    auto cfg = base_config(gates, 5);
    cfg.fresh_gates = false;
    cfg.max_samples = 100000;
    McgsSearch s(task, cfg);
    std::map<std::size_t, double> by_node;
    const int n = 100000;
    for (int i = 0; i < n; ++i) by_node[s.expand(CircuitGraph::kRoot).node] += 1;
    REQUIRE(by_node.size() == 4);
    std::vector<double> counts;
    for (auto& [id, c] : by_node) counts.push_back(c);
    // 3 degrees of freedom, 99.9% quantile 16.27
    CHECK(chi_square(counts, {0.25, 0.25, 0.25, 0.25}, n) < 16.27);
  }

  TEST_CASE("trivial searches") {
    const GateInstance h = make_gate("H", {0}, 1);
    const UnitarySynthesisTask task(h.spec->matrix({}));
    const SearchReport r = run_search(task, base_config({h}));
    CHECK(r.success);
    CHECK(r.samples_used == 1);
    CHECK(r.result_length == std::optional<std::size_t>(1));

    const UnitarySynthesisTask id(Matrix::identity(2));
    const SearchReport z = run_search(id, base_config({h}));
    CHECK(z.success);
    CHECK(z.samples_used == 0);
    CHECK(z.result_circuit->empty());
  }

  TEST_CASE("planted depth-3 target over four gates") {
    const GateSet set = parse_gate_set("qubits 2\nH(0)\nT(1)\nCNOT(0,1)\nX(0)\n");
    const LengthOracle lo(set.gates, 2, 6);
    Rng rng(31);
    int planted = 0;
    for (int trial = 0; trial < 200 && planted < 10; ++trial) {
      Circuit c(2);
      for (int i = 0; i < 3; ++i) c.append(set.gates[uniform_index(rng, set.size())]);
      const Matrix u = evaluate(c);
      if (lo.min_length(u) != std::optional<std::size_t>(3)) continue;
      ++planted;
      const UnitarySynthesisTask task(u);
      auto cfg = base_config(set.gates, trial);
      cfg.max_depth = 3;
      const SearchReport r = run_search(task, cfg);
      CHECK(r.success);
      CHECK(r.result_length == std::optional<std::size_t>(3));
      CHECK(frobenius_distance(evaluate(*r.result_circuit), u) <= 1e-6);
    }
    CHECK(planted == 10);
  }

  TEST_CASE("a depth cap never hides a reachable target") {
    // Nodes first met at the cap must come back when a shorter route shows up,
    // otherwise the graph saturates early and the search gives up.
    const GateSet set = named_gate_set("bench8");
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
      Circuit c(3);
      for (int i = 0; i < 4; ++i) c.append(set.gates[uniform_index(rng, set.size())]);
      const UnitarySynthesisTask task(evaluate(c));
      auto cfg = base_config(set.gates, trial);
      cfg.max_depth = 4;
      cfg.beta = 24;
      const SearchReport r = run_search(task, cfg);
      CHECK(r.success);
    }
  }

  TEST_CASE("budget accounting and determinism") {
    const GateSet set = named_gate_set("bench8");
    const UnitarySynthesisTask task(dft_matrix(8));
    auto cfg = base_config(set.gates, 9);
    cfg.max_samples = 500;
    const SearchReport a = run_search(task, cfg);
    const SearchReport b = run_search(task, cfg);
    CHECK_FALSE(a.success);
    CHECK(a.samples_used == 500);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(a.trace.back().sample == a.samples_used);
  }

  TEST_CASE("graph soundness after a search") {
    const GateSet set = named_gate_set("bench8");
    const UnitarySynthesisTask task(dft_matrix(8));
    auto cfg = base_config(set.gates, 2);
    cfg.max_samples = 3000;
    McgsSearch s(task, cfg);
    s.run();
    const GraphAudit audit = audit_graph(s.graph());
    CHECK(audit.exhaustive);
    CHECK(audit.ok());
  }

  TEST_CASE("parametric search finds a phase") {
    const UnitarySynthesisTask task(Matrix{{1, 0}, {0, -1}});
    McgsConfig cfg;
    cfg.gate_set = {make_gate("P", {0}, 1)};
    cfg.max_samples = 10;
    cfg.descent.max_iters = 500;
    cfg.param_init = 2.0;
    const SearchReport r = run_search(task, cfg);
    CHECK(r.success);
    CHECK(r.result_length == std::optional<std::size_t>(1));
  }
}
