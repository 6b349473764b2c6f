#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "oracles.hpp"
#include "qmcgs/baselines.hpp"
#include "qmcgs/mcgs.hpp"

using namespace qmcgs;

namespace {
SearchLimits limits(std::size_t budget, std::uint64_t seed, double beta = 2.0) {
  SearchLimits l;
  l.budget = budget;
  l.seed = seed;
  l.beta = beta;
  return l;
}

std::vector<std::string> labels(const Circuit& c) {
  std::vector<std::string> out;
  for (const auto& g : c.gates()) out.push_back(g.label());
  return out;
}

Circuit word(int n, const std::vector<GateInstance>& gates, const std::vector<std::size_t>& idx) {
  Circuit c(n);
  for (auto i : idx) c.append(gates[i]);
  return c;
}
}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("random search trivial cases") {
    const GateInstance h = make_gate("H", {0}, 1);
    const UnitarySynthesisTask task(h.spec->matrix({}));
    const std::vector<GateInstance> gs{h};
    const SearchReport r = random_search(task, gs, 1, false, limits(10, 0));
    CHECK(r.success);
    CHECK(r.samples_used == 1);

    const UnitarySynthesisTask t_task(gate_spec("T").matrix());
    const SearchReport miss = random_search(t_task, gs, 3, true, limits(200, 0));
    CHECK_FALSE(miss.success);
    CHECK(miss.samples_used == 200);
  }

  TEST_CASE("per-draw success rate equals the enumeration ratio") {
    const GateSet set = parse_gate_set("qubits 2\nH(0)\nX(1)\nCNOT(0,1)\nZ(0)\n");
    const Matrix target = evaluate(word(2, set.gates, {0, 2}));
    int hits = 0;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        hits += frobenius_distance(evaluate(word(2, set.gates, {a, b})), target) <= 1e-6;
    const double p = hits / 16.0;
    const UnitarySynthesisTask task(target);
    const int n = 20000;
    int succ = 0;
    for (int s = 0; s < n; ++s) succ += random_search(task, set.gates, 2, false, limits(1, s)).success;
    const double sigma = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(succ - n * p) < 3 * sigma);
  }

  TEST_CASE("crossover") {
    const GateSet set = named_gate_set("bench8");
    Rng rng(1);
    const Circuit a = random_circuit(3, set.gates, 6, rng), b = random_circuit(3, set.gates, 6, rng);
    const auto [c, d] = crossover_at(a, b, 5);
    int diff = 0;
    for (std::size_t i = 0; i < 6; ++i) diff += c.gate(i).label() != a.gate(i).label();
    CHECK(labels(c.prefix(5)) == labels(a.prefix(5)));
    CHECK(c.gate(5).label() == b.gate(5).label());
    CHECK(diff <= 1);
    const auto [e, f] = crossover(a, a, rng);
    CHECK(labels(e) == labels(a));
    CHECK(labels(f) == labels(a));
    CHECK_THROWS(crossover_at(a, random_circuit(3, set.gates, 4, rng), 2));
    for (int trial = 0; trial < 200; ++trial) {
      const auto [x, y] = crossover(a, b, rng);
      std::vector<std::string> parents = labels(a), kids = labels(x);
      for (auto& s : labels(b)) parents.push_back(s);
      for (auto& s : labels(y)) kids.push_back(s);
      std::sort(parents.begin(), parents.end());
      std::sort(kids.begin(), kids.end());
      CHECK(parents == kids);
    }
  }

  TEST_CASE("crossover carries parameters") {
    Circuit a(1), b(1);
    a.append(make_gate("P", {0}, 1), std::vector<double>{0.1});
    a.append(make_gate("P", {0}, 1), std::vector<double>{0.2});
    b.append(make_gate("RX", {0}, 1), std::vector<double>{0.3});
    b.append(make_gate("RX", {0}, 1), std::vector<double>{0.4});
    const auto [c, d] = crossover_at(a, b, 1);
    CHECK(c.gate_params(0) == std::vector<double>{0.1});
    CHECK(c.gate_params(1) == std::vector<double>{0.4});
    CHECK(d.gate_params(0) == std::vector<double>{0.3});
    CHECK(d.gate_params(1) == std::vector<double>{0.2});
  }

  TEST_CASE("mutation") {
    const GateSet set = named_gate_set("bench8");
    Rng rng(2);
    const Circuit c = random_circuit(3, set.gates, 10, rng);
    CHECK(labels(mutate(c, 0.0, set.gates, rng)) == labels(c));
    const std::vector<GateInstance> single{make_gate("H", {1}, 3)};
    for (const auto& l : labels(mutate(c, 1.0, single, rng))) CHECK(l == "H(1)");
    // a replaced position keeps its gate with probability 1/|G|
    const double rate = 0.3, trials = 4000;
    double changed = 0;
    for (int t = 0; t < trials; ++t) {
      const Circuit m = mutate(c, rate, set.gates, rng);
      for (std::size_t i = 0; i < 10; ++i) changed += m.gate(i).label() != c.gate(i).label();
    }
    const double p = rate * (1 - 1.0 / set.size());
    const double n = trials * 10;
    CHECK(std::abs(changed - n * p) < 3 * std::sqrt(n * p * (1 - p)));
  }

  TEST_CASE("genetic algorithm") {
    const GateSet set = named_gate_set("bench8");
    Rng rng(3);
    const Circuit target = random_circuit(3, set.gates, 5, rng);
    const UnitarySynthesisTask task(evaluate(target));
    GaConfig g;
    g.circuit_length = 5;
    g.initial = {target};
    const SearchReport r = genetic_algorithm(task, g, set.gates, limits(10000, 1));
    CHECK(r.success);
    CHECK(r.samples_used <= g.population);

    const UnitarySynthesisTask hard(dft_matrix(8));
    GaConfig small;
    const SearchReport h = genetic_algorithm(hard, small, set.gates, limits(20, 1));
    CHECK_FALSE(h.success);
    CHECK(h.samples_used == 20);
  }

  TEST_CASE("particle filter") {
    const GateSet set = named_gate_set("bench8");
    Rng rng(4);
    const Circuit target = random_circuit(3, set.gates, 4, rng);
    const UnitarySynthesisTask task(evaluate(target));
    PfConfig p;
    p.circuit_length = 4;
    p.initial.assign(p.particles, target);
    const SearchReport r = particle_filter(task, p, set.gates, limits(1000, 2));
    CHECK(r.success);
    CHECK(r.samples_used == 1);

    PfConfig walker;
    walker.particles = 1;
    walker.circuit_length = 4;
    const UnitarySynthesisTask hard(dft_matrix(8));
    const SearchReport w = particle_filter(hard, walker, set.gates, limits(300, 2));
    CHECK(w.samples_used == 300);
    CHECK(w.result_circuit->length() == 4);
  }

  TEST_CASE("categorical draws follow the weights") {
    const std::vector<double> w{0.2, 1.0, 0.05, 3.0};
    const double total = 4.25;
    Rng rng(6);
    const int n = 100000;
    std::vector<double> counts(w.size());
    for (int i = 0; i < n; ++i) counts[categorical(rng, w)] += 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double p = w[i] / total;
      CHECK(std::abs(counts[i] - n * p) < 3 * std::sqrt(n * p * (1 - p)));
    }
  }

  TEST_CASE("annealing acceptance") {
    CHECK(sa_acceptance(-0.5, 1.0) == 1.0);
    CHECK(sa_acceptance(1.0, 1e-12) < 1e-300);
    CHECK(sa_acceptance(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
    Rng rng(7);
    const int n = 100000;
    int acc = 0;
    for (int i = 0; i < n; ++i) acc += bernoulli(rng, sa_acceptance(1.0, 1.0));
    const double p = std::exp(-1.0);
    CHECK(std::abs(acc - n * p) < 3 * std::sqrt(n * p * (1 - p)));
  }

  TEST_CASE("annealing respects the length range") {
    const GateSet set = named_gate_set("bench8");
    const UnitarySynthesisTask hard(dft_matrix(8));
    SaConfig s;
    s.min_length = 2;
    s.max_length = 4;
    const SearchReport r = simulated_annealing(hard, s, set.gates, limits(500, 3));
    CHECK(r.samples_used == 500);
    CHECK(r.result_circuit->length() >= 2);
    CHECK(r.result_circuit->length() <= 4);
  }

  TEST_CASE("uniform scoring on a one-gate task: all methods alike") {
    const GateSet set = parse_gate_set("qubits 1\nX(0)\nY(0)\nZ(0)\nH(0)\n");
    const UnitarySynthesisTask task(gate_spec("H").matrix());
    std::map<std::string, double> mean;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
      auto l = limits(1000, s, 0.0);
      McgsConfig m;
      m.gate_set = set.gates;
      m.beta = 0.0;
      m.seed = s;
      m.max_samples = 1000;
      mean["mcgs"] += run_search(task, m).samples_used;
      mean["random"] += random_search(task, set.gates, 1, false, l).samples_used;
      GaConfig g;
      g.circuit_length = 1;
      mean["ga"] += genetic_algorithm(task, g, set.gates, l).samples_used;
      PfConfig p;
      p.circuit_length = 1;
      mean["pf"] += particle_filter(task, p, set.gates, l).samples_used;
      SaConfig a;
      a.variable_length = false;
      a.min_length = a.max_length = 1;
      mean["sa"] += simulated_annealing(task, a, set.gates, l).samples_used;
    }
    double lo = 1e9, hi = 0;
    for (auto& [k, v] : mean) {
      v /= seeds;
      MESSAGE(k << " mean samples " << v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi <= 4 * lo);
  }

  TEST_CASE("every method is seed deterministic") {
    const GateSet set = named_gate_set("bench8");
    const UnitarySynthesisTask hard(dft_matrix(8));
    auto l = limits(300, 11);
    auto twice = [&](auto run) { return report_to_json(run()).dump() == report_to_json(run()).dump(); };
    CHECK(twice([&] { return random_search(hard, set.gates, 5, true, l); }));
    CHECK(twice([&] { return genetic_algorithm(hard, GaConfig{}, set.gates, l); }));
    CHECK(twice([&] { return particle_filter(hard, PfConfig{}, set.gates, l); }));
    CHECK(twice([&] { return simulated_annealing(hard, SaConfig{}, set.gates, l); }));
  }

  TEST_CASE("shared accounting: the trace ends at samples_used") {
    const GateSet set = named_gate_set("bench8");
    const UnitarySynthesisTask hard(dft_matrix(8));
    const auto l = limits(123, 4);
    for (const SearchReport& r :
         {random_search(hard, set.gates, 5, true, l), genetic_algorithm(hard, GaConfig{}, set.gates, l),
          particle_filter(hard, PfConfig{}, set.gates, l), simulated_annealing(hard, SaConfig{}, set.gates, l)}) {
      CHECK(r.samples_used == 123);
      CHECK(r.trace.back().sample == 123);
    }
  }
}
