#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qmcgs/gates.hpp"
#include "qmcgs/random.hpp"
#include "qmcgs/tasks.hpp"
#include "qmcgs/tensor.hpp"

using namespace qmcgs;

namespace {
const cplx I{0, 1};
Matrix X() { return Matrix{{0, 1}, {1, 0}}; }
Matrix Z() { return Matrix{{1, 0}, {0, -1}}; }
Matrix H() {
  const double r = 1 / std::sqrt(2.0);
  return Matrix{{r, r}, {r, -r}};
}
Matrix cnot() { return Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}; }
Matrix swap2() { return Matrix{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}}; }

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& e : m.entries()) e = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
  return m;
}
}  // namespace

TEST_SUITE("tensor") {
  TEST_CASE("matmul small cases") {
    CHECK(matmul(Matrix::identity(2), Matrix::identity(2)) == Matrix::identity(2));
    CHECK(oracle::max_abs_diff(H() * H(), Matrix::identity(2)) < 1e-15);
    const Matrix xz = X() * Z();
    CHECK(xz == Matrix{{0, -1}, {1, 0}});
  }

  TEST_CASE("matmul agrees with the triple loop and rejects bad shapes") {
    Rng rng(3);
    const Matrix a = random_matrix(5, 7, rng), b = random_matrix(7, 3, rng);
    CHECK(oracle::max_abs_diff(a * b, oracle::naive_mul(a, b)) < 1e-13);
    CHECK_THROWS_AS(matmul(a, a), DimensionError);
  }

  TEST_CASE("kron") {
    CHECK(kron(Matrix::identity(2), Matrix::identity(2)) == Matrix::identity(4));
    const Matrix k = kron(X(), Matrix::identity(2));
    // block swap: rows 0,1 <-> 2,3
    const Matrix expect{{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
    CHECK(k == expect);
    const Matrix big = kron(Matrix::identity(2), Matrix::identity(4));
    CHECK(big.rows() == 8);
    CHECK(big.cols() == 8);
  }

  TEST_CASE("frobenius distance") {
    CHECK(frobenius_distance(H(), H()) == 0.0);
    CHECK(frobenius_distance(Matrix::identity(2), X()) == doctest::Approx(2.0));
    const Matrix f = dft_matrix(8);
    CHECK(frobenius_distance(Matrix::identity(8), f) ==
          doctest::Approx(oracle::entrywise_distance(Matrix::identity(8), f)).epsilon(1e-14));
    CHECK_THROWS_AS(frobenius_distance(Matrix::identity(2), Matrix::identity(4)), DimensionError);
  }

  TEST_CASE("phase-insensitive distance ignores a global phase") {
    const Matrix u = H();
    Matrix v = u;
    v *= std::polar(1.0, 0.7);
    CHECK(frobenius_distance(u, v) > 0.5);
    CHECK(phase_insensitive_distance(u, v) < 1e-7);
  }

  TEST_CASE("apply to states") {
    const StateVector s = StateVector::basis(3, 0);
    const StateVector same = apply(Matrix::identity(8), s);
    CHECK(same[0] == cplx(1, 0));
    const StateVector plus = apply(H(), StateVector::basis(1, 0));
    CHECK(std::abs(plus[0] - 1 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(plus[1] - 1 / std::sqrt(2.0)) < 1e-15);
    // X on qubit 0 (the high bit) of |000> gives |100> = index 4
    const StateVector flipped = apply(embed(X(), std::vector<int>{0}, 3), s);
    CHECK(flipped[4] == cplx(1, 0));
  }

  TEST_CASE("embed matches the basis-mapping oracle") {
    CHECK(embed(X(), std::vector<int>{0}, 1) == X());
    CHECK(embed(X(), std::vector<int>{0}, 2) == kron(X(), Matrix::identity(2)));
    const Matrix rev = embed(cnot(), std::vector<int>{1, 0}, 2);
    CHECK(oracle::max_abs_diff(rev, swap2() * cnot() * swap2()) < 1e-15);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(uniform_index(rng, 3));
      const int arity = 1 + static_cast<int>(uniform_index(rng, 2));
      std::vector<int> wires;
      while (static_cast<int>(wires.size()) < arity) {
        const int w = static_cast<int>(uniform_index(rng, n));
        if (std::find(wires.begin(), wires.end(), w) == wires.end()) wires.push_back(w);
      }
      const Matrix g = random_matrix(std::size_t{1} << arity, std::size_t{1} << arity, rng);
      CHECK(oracle::max_abs_diff(embed(g, wires, n), oracle::embed_by_basis(g, wires, n)) < 1e-15);
    }
  }

  TEST_CASE("apply_left and apply_right equal explicit products") {
    Rng rng(5);
    const Matrix m = random_matrix(8, 8, rng);
    const Matrix g = random_matrix(4, 4, rng);
    const std::vector<int> w{2, 0};
    Matrix l = m;
    apply_left(l, g, w, 3);
    CHECK(oracle::max_abs_diff(l, oracle::naive_mul(oracle::embed_by_basis(g, w, 3), m)) < 1e-13);
    Matrix r = m;
    apply_right(r, g, w, 3);
    CHECK(oracle::max_abs_diff(r, oracle::naive_mul(m, oracle::embed_by_basis(g, w, 3))) < 1e-13);
  }

  TEST_CASE("wire validation") {
    CHECK_THROWS(validate_wires(std::vector<int>{0, 0}, 2));
    CHECK_THROWS(validate_wires(std::vector<int>{2}, 2));
    CHECK_NOTHROW(validate_wires(std::vector<int>{1, 0}, 2));
  }

  TEST_CASE("unitarity and power-of-two helpers") {
    CHECK(is_unitary(H()));
    CHECK_FALSE(is_unitary(Matrix{{1, 1}, {0, 1}}));
    CHECK(is_power_of_two(8));
    CHECK_FALSE(is_power_of_two(6));
    CHECK(log2_exact(16) == 4);
  }
}
