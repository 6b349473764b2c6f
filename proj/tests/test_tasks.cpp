#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qmcgs/random.hpp"
#include "qmcgs/tasks.hpp"

using namespace qmcgs;

namespace {
std::vector<std::uint8_t> from_string(const std::string& s) {
  std::vector<std::uint8_t> v;
  for (char ch : s) v.push_back(ch == '1');
  return v;
}
std::string to_string(const std::vector<std::uint8_t>& v) {
  std::string s;
  for (auto b : v) s += b ? '1' : '0';
  return s;
}
}  // namespace

TEST_SUITE("tasks") {
  TEST_CASE("DFT matrix") {
    const double r = 1 / std::sqrt(2.0);
    CHECK(oracle::max_abs_diff(dft_matrix(2), Matrix{{r, r}, {r, -r}}) < 1e-15);
    CHECK(std::abs(dft_matrix(4)(1, 1) - cplx(0, -0.5)) < 1e-15);
    CHECK(unitarity_error(dft_matrix(8)) <= 1e-12);
    CHECK(oracle::max_abs_diff(dft_matrix(8), oracle::dft_by_definition(8)) < 1e-14);
  }

  TEST_CASE("Wolfram codes from the rule table") {
    using C = std::array<int, 8>;
    CHECK(wolfram_code(30) == C{0, 0, 0, 1, 1, 1, 1, 0});
    CHECK(wolfram_code(90) == C{0, 1, 0, 1, 1, 0, 1, 0});
    CHECK(wolfram_code(110) == C{0, 1, 1, 0, 1, 1, 1, 0});
    CHECK(wolfram_code(184) == C{1, 0, 1, 1, 1, 0, 0, 0});
    for (int rule = 0; rule < 256; ++rule) CHECK(rule_from_code(wolfram_code(rule)) == rule);
    CHECK_THROWS(wolfram_code(256));
  }

  TEST_CASE("single steps") {
    const auto next = ca_step(from_string("0001000"), 90);
    CHECK(to_string(next) == "0010100");
    CHECK(to_string(ca_step(from_string("1101101"), 0)) == "0000000");
    CHECK_THROWS(ca_step(from_string("01"), 90));
  }

  TEST_CASE("64-cell 32-step evolutions match the string oracle") {
    Rng rng(64);
    for (int rule : {30, 90, 110, 184}) {
      for (int init = 0; init < 2; ++init) {
        std::string first(64, '0');
        if (init == 0) first[32] = '1';
        else for (auto& ch : first) ch = bernoulli(rng, 0.5) ? '1' : '0';
        const auto expect = oracle::ca_rows(rule, first, 32);
        auto cells = from_string(first);
        for (std::size_t t = 1; t <= 32; ++t) {
          cells = ca_step(cells, rule);
          CHECK(to_string(cells) == expect[t]);
        }
      }
    }
  }

  TEST_CASE("CA readout loss") {
    // code 00000001: only pattern 000 maps to 1, which |000> already is
    CHECK(CaStatePrepTask(1).loss(Matrix::identity(8)) == 0.0);
    // rule 30: |000> puts weight on pattern 000 (code bit 0) and misses the
    // four set patterns: five of eight bits disagree
    CHECK(CaStatePrepTask(30).loss(Matrix::identity(8)) == doctest::Approx(5.0 / 8.0));
    Circuit hhh(3);
    for (int q = 0; q < 3; ++q) hhh.append(make_gate("H", {q}, 3));
    CHECK(CaStatePrepTask(255).loss(hhh) == 0.0);
    CHECK_THROWS_AS(CaStatePrepTask(0), std::invalid_argument);
  }

  TEST_CASE("classification loss fixed points") {
    LabeledSample e0{{1, 0, 0, 0}, 0};
    const ClassificationTask single({e0}, {}, 2, 2);
    CHECK(single.loss(Matrix::identity(4)) < 1e-15);

    // X on qubit 1 maps |00> -> |01>, i.e. class 1
    LabeledSample a{{1, 0, 0, 0}, 1}, b{{0, 1, 0, 0}, 0};
    const ClassificationTask task({a, b}, {a, b}, 2, 2);
    Circuit x(2);
    x.append(make_gate("X", {1}, 2));
    CHECK(task.loss(x) < 1e-15);
    CHECK(accuracy(x, task.train(), 2) == 1.0);
  }

  TEST_CASE("ties go to the lowest class") {
    // uniform outputs over 3 classes: everything predicts class 0
    LabeledSample s0{{1, 1, 1, 0}, 0}, s1{{1, 1, 1, 0}, 1}, s2{{1, 1, 1, 0}, 2}, s3{{1, 1, 1, 0}, 1};
    const std::vector<LabeledSample> data{s0, s1, s2, s3};
    CHECK(accuracy(Matrix::identity(4), data, 3) == doctest::Approx(0.25));
  }

  TEST_CASE("classification gradient matches finite differences") {
    Rng rng(9);
    std::vector<LabeledSample> train;
    for (int i = 0; i < 6; ++i) {
      LabeledSample s;
      for (int j = 0; j < 4; ++j) s.bits.push_back(static_cast<int>(uniform_index(rng, 2)));
      s.bits[i % 4] = 1;
      s.label = i % 2;
      train.push_back(s);
    }
    const ClassificationTask task(train, {}, 2, 2);
    Circuit c(2);
    c.append(make_gate("RX", {0}, 2), std::vector<double>{0.3});
    c.append(make_gate("CNOT", {0, 1}, 2));
    c.append(make_gate("RX", {1}, 2), std::vector<double>{-0.8});
    c.append(make_gate("P", {0}, 2), std::vector<double>{0.5});
    const Matrix u = evaluate(c);
    Matrix grad;
    task.value_and_gradient(u, grad);
    const auto g = contract_jacobian(c, grad);
    for (std::size_t j = 0; j < c.param_count(); ++j) {
      auto p = c.params(), m = c.params();
      p[j] += 1e-6;
      m[j] -= 1e-6;
      Circuit cp = c, cm = c;
      cp.set_params(p);
      cm.set_params(m);
      const double fd = (task.loss(cp) - task.loss(cm)) / 2e-6;
      CHECK(g[j] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}
