#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qmcgs/circuit.hpp"
#include "qmcgs/random.hpp"

using namespace qmcgs;

TEST_SUITE("circuit") {
  TEST_CASE("evaluate small circuits") {
    CHECK(evaluate(Circuit(2)) == Matrix::identity(4));
    Circuit hh(1);
    hh.append(make_gate("H", {0}, 1));
    hh.append(make_gate("H", {0}, 1));
    CHECK(oracle::max_abs_diff(evaluate(hh), Matrix::identity(2)) < 1e-15);
  }

  TEST_CASE("Bell state") {
    Circuit c(2);
    c.append(make_gate("H", {0}, 2));
    c.append(make_gate("CNOT", {0, 1}, 2));
    const StateVector s = apply(evaluate(c), StateVector::basis(2, 0));
    const double r = 1 / std::sqrt(2.0);
    CHECK(std::abs(s[0] - r) < 1e-15);
    CHECK(std::abs(s[1]) < 1e-15);
    CHECK(std::abs(s[2]) < 1e-15);
    CHECK(std::abs(s[3] - r) < 1e-15);
  }

  TEST_CASE("later gates multiply from the left") {
    Circuit c(1);
    c.append(make_gate("X", {0}, 1));
    c.append(make_gate("Z", {0}, 1));
    // Z * X
    CHECK(evaluate(c) == Matrix{{0, 1}, {-1, 0}});
  }

  TEST_CASE("jacobian of a single phase gate") {
    Circuit c(1);
    c.append(make_gate("P", {0}, 1));
    const auto j = circuit_jacobian(c);
    REQUIRE(j.size() == 1);
    CHECK(std::abs(j[0](1, 1) - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(j[0](0, 0)) < 1e-15);
  }

  TEST_CASE("unused parameter slot has a zero jacobian") {
    std::vector<GateInstance> gates{make_gate("P", {0}, 1)};
    gates[0].param_slots = {0};
    Circuit d(1, gates, {0.3, 0.9});
    const auto j = circuit_jacobian(d);
    REQUIRE(j.size() == 2);
    CHECK(frobenius_norm(j[1]) == 0.0);
  }

  TEST_CASE("jacobian matches central differences on random circuits") {
    Rng rng(21);
    const std::vector<GateInstance> pool{make_gate("P", {0}, 2), make_gate("RX", {1}, 2),
                                         make_gate("CP", {0, 1}, 2), make_gate("H", {0}, 2),
                                         make_gate("CNOT", {1, 0}, 2)};
    for (int trial = 0; trial < 10; ++trial) {
      Circuit c(2);
      for (int k = 0; k < 4; ++k) c.append(pool[uniform_index(rng, pool.size())]);
      std::vector<double> p(c.param_count());
      for (auto& v : p) v = 2 * std::numbers::pi * uniform01(rng);
      c.set_params(p);
      const auto jac = circuit_jacobian(c);
      for (std::size_t s = 0; s < c.param_count(); ++s) {
        Circuit a = c, b = c;
        auto pa = c.params(), pb = c.params();
        pa[s] += 1e-6;
        pb[s] -= 1e-6;
        a.set_params(pa);
        b.set_params(pb);
        Matrix fd = evaluate(a) - evaluate(b);
        fd *= 1.0 / 2e-6;
        CHECK(oracle::max_abs_diff(fd, jac[s]) < 1e-6);
      }
    }
  }

  TEST_CASE("shared parameter slots sum their contributions") {
    std::vector<GateInstance> gates{make_gate("P", {0}, 1), make_gate("P", {0}, 1)};
    gates[0].param_slots = {0};
    gates[1].param_slots = {0};
    Circuit c(1, gates, {0.4});
    // P(a)P(a) = P(2a): derivative at (1,1) is 2i e^{2ia}
    const auto j = circuit_jacobian(c);
    CHECK(std::abs(j[0](1, 1) - 2.0 * cplx(0, 1) * std::polar(1.0, 0.8)) < 1e-14);
  }

  TEST_CASE("contract_jacobian equals explicit traces") {
    Rng rng(8);
    Circuit c(2);
    c.append(make_gate("RX", {0}, 2), std::vector<double>{0.4});
    c.append(make_gate("CP", {0, 1}, 2), std::vector<double>{1.1});
    c.append(make_gate("P", {1}, 2), std::vector<double>{-0.3});
    Matrix g(4, 4);
    for (auto& e : g.entries()) e = {uniform01(rng), uniform01(rng)};
    const auto fast = contract_jacobian(c, g);
    const auto jac = circuit_jacobian(c);
    for (std::size_t s = 0; s < jac.size(); ++s) {
      CHECK(fast[s] == doctest::Approx(trace_adjoint_product(g, jac[s]).real()).epsilon(1e-12));
    }
  }

  TEST_CASE("text round trip is exact") {
    Circuit c(3);
    c.append(make_gate("H", {0}, 3));
    c.append(make_gate("CP", {1, 0}, 3), std::vector<double>{std::numbers::pi / 3});
    c.append(make_gate("RX", {2}, 3), std::vector<double>{0.1234567890123});
    const Circuit back = circuit_from_text(to_text(c));
    CHECK(back == c);
    CHECK(evaluate(back) == evaluate(c));
    CHECK_THROWS(circuit_from_text("qubits 2\nH(4)\n"));
  }

  TEST_CASE("prefix compacts parameters") {
    Circuit c(1);
    c.append(make_gate("P", {0}, 1), std::vector<double>{0.5});
    c.append(make_gate("H", {0}, 1));
    c.append(make_gate("P", {0}, 1), std::vector<double>{0.7});
    const Circuit p = c.prefix(2);
    CHECK(p.length() == 2);
    CHECK(p.param_count() == 1);
    CHECK(p.params()[0] == 0.5);
  }
}

TEST_CASE("fixed-gate circuit text may omit the params line" * doctest::test_suite("circuit")) {
  const Circuit c = circuit_from_text("qubits 2\nH(0)\nCNOT(0,1)\n");
  CHECK(c.length() == 2);
  CHECK_THROWS(circuit_from_text("qubits 1\nP(0)@0\n"));
}
