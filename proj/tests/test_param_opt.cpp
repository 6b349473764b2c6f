#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qmcgs/param_opt.hpp"
#include "qmcgs/random.hpp"
#include "qmcgs/tasks.hpp"

using namespace qmcgs;

namespace {
const double kPi = std::numbers::pi;
const Matrix kZ{{1, 0}, {0, -1}};

Circuit phase(double phi) {
  Circuit c(1);
  c.append(make_gate("P", {0}, 1), std::vector<double>{phi});
  return c;
}

std::vector<double> fd_gradient(const Circuit& c, const Matrix& target, double h = 1e-6) {
  std::vector<double> g(c.param_count());
  for (std::size_t j = 0; j < g.size(); ++j) {
    auto p = c.params(), m = c.params();
    p[j] += h;
    m[j] -= h;
    Circuit a = c, b = c;
    a.set_params(p);
    b.set_params(m);
    g[j] = (loss(a, target) - loss(b, target)) / (2 * h);
  }
  return g;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}
}  // namespace

TEST_SUITE("param-opt") {
  TEST_CASE("loss values") {
    Circuit h(1);
    h.append(make_gate("H", {0}, 1));
    CHECK(loss(h, evaluate(h)) == 0.0);
    CHECK(loss(Circuit(1), Matrix{{0, 1}, {1, 0}}) == doctest::Approx(2.0));
    CHECK(loss(phase(kPi), kZ) < 1e-15);
    CHECK_THROWS_AS(loss(Circuit(2), kZ), DimensionError);
  }

  TEST_CASE("gradient at the minimum and against finite differences") {
    for (double g : loss_gradient(phase(kPi), kZ)) CHECK(g == 0.0);
    const Circuit c = phase(kPi / 2);
    const auto g = loss_gradient(c, kZ);
    CHECK(rel_err(g, fd_gradient(c, kZ)) < 1e-6);
  }

  TEST_CASE("unused slot has zero gradient") {
    std::vector<GateInstance> gates{make_gate("P", {0}, 1)};
    gates[0].param_slots = {1};
    const Circuit c(1, gates, {0.2, 0.9});
    const auto g = loss_gradient(c, kZ);
    CHECK(g[0] == 0.0);
    CHECK(g[1] != 0.0);
  }

  TEST_CASE("gradient suite on random parametric circuits") {
    Rng rng(2024);
    const int n = 3;
    const Matrix target = dft_matrix(8);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t length = 1 + uniform_index(rng, 6);
      const std::size_t k = 1 + uniform_index(rng, 4);
      Circuit c(n);
      for (std::size_t i = 0; i < length; ++i) {
        const int kind = static_cast<int>(uniform_index(rng, 4));
        const int a = static_cast<int>(uniform_index(rng, n));
        const int b = (a + 1 + static_cast<int>(uniform_index(rng, n - 1))) % n;
        if (kind == 0) c.append(make_gate("H", {a}, n));
        else if (kind == 1) c.append(make_gate("RX", {a}, n));
        else if (kind == 2) c.append(make_gate("P", {a}, n));
        else c.append(make_gate("CP", {a, b}, n));
      }
      // Rebuild with at most k distinct parameters, shared round robin.
      std::vector<GateInstance> gates = c.gates();
      std::size_t next = 0;
      for (auto& g : gates) {
        if (g.parametric()) g.param_slots = {next++ % k};
        else g.param_slots.clear();
      }
      std::vector<double> params(k);
      for (auto& p : params) p = 2 * kPi * uniform01(rng);
      const Circuit shared(n, gates, params);
      CAPTURE(trial);
      const auto g = loss_gradient(shared, target);
      CHECK(rel_err(g, fd_gradient(shared, target)) <= 1e-6);
    }
  }

  TEST_CASE("descent follows the one-dimensional recurrence") {
    DescentConfig cfg;
    cfg.step = 0.2;
    cfg.max_iters = 100;
    const DescentResult r = gradient_descent(phase(2.0), kZ, cfg);
    CHECK(std::abs(r.params[0] - kPi) < 1e-4);
    // half-squared loss 1 + cos(phi): phi <- phi + step * sin(phi)
    double phi = 2.0;
    for (std::size_t i = 0; i < r.iters; ++i) phi += 0.2 * std::sin(phi);
    CHECK(r.params[0] == doctest::Approx(phi).epsilon(1e-12));
    CHECK(r.final_value <= r.initial_value);
  }

  TEST_CASE("already optimal start takes no steps") {
    const DescentResult r = gradient_descent(phase(kPi), kZ, DescentConfig{});
    CHECK(r.iters == 0);
    CHECK(r.params[0] == kPi);
  }

  TEST_CASE("three-qubit QFT skeleton recovers the radix-2 phases") {
    const int n = 3;
    Circuit c(n);
    c.append(make_gate("H", {0}, n));
    c.append(make_gate("SWAP", {0, 2}, n));
    c.append(make_gate("CP", {1, 2}, n), std::vector<double>{-1.2});
    c.append(make_gate("CP", {0, 2}, n), std::vector<double>{-0.5});
    c.append(make_gate("H", {1}, n));
    c.append(make_gate("CP", {0, 1}, n), std::vector<double>{-1.2});
    c.append(make_gate("H", {0}, n));
    DescentConfig cfg;
    cfg.max_iters = 2000;
    cfg.grad_tol = 1e-12;
    const DescentResult r = gradient_descent(c, dft_matrix(8), cfg);
    CHECK(r.final_value < 1e-6);
    // e^{-2 pi i/8} convention: controlled phases -pi/2, -pi/4, -pi/2
    CHECK(r.params[0] == doctest::Approx(-kPi / 2).epsilon(1e-5));
    CHECK(r.params[1] == doctest::Approx(-kPi / 4).epsilon(1e-5));
    CHECK(r.params[2] == doctest::Approx(-kPi / 2).epsilon(1e-5));
  }
}
