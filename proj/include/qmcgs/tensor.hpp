#pragma once

// Dense complex linear algebra for small quantum registers.
//
// Qubit ordering: qubit 0 is the leftmost (most significant) tensor factor.
// Basis index b of a 2^N register enumerates |x0 x1 ... x(N-1)> with x0 the
// high bit, so embed(X, {0}, 2) == kron(X, I2).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef QMCGS_MAX_QUBITS
#define QMCGS_MAX_QUBITS 8
#endif

namespace qmcgs {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = QMCGS_MAX_QUBITS;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  Matrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> entries() { return data_; }
  std::span<const cplx> entries() const { return data_; }

  Matrix adjoint() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(cplx s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(cplx s, Matrix a);

// Standard product; throws DimensionError when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);
inline Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

// (a (x) b)[i*bR + k, j*bC + l] = a[i,j] * b[k,l]
Matrix kron(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);

// sqrt(tr[(a-b)^H (a-b)]); throws DimensionError on shape mismatch.
double frobenius_distance(const Matrix& a, const Matrix& b);

// min over theta of ||a - e^{i theta} b||_F = sqrt(||a||^2 + ||b||^2 - 2|tr(a^H b)|).
double phase_insensitive_distance(const Matrix& a, const Matrix& b);

// tr(a^H b)
cplx trace_adjoint_product(const Matrix& a, const Matrix& b);

// max entrywise |U^H U - I|
double unitarity_error(const Matrix& u);
bool is_unitary(const Matrix& u, double tol = 1e-10);

bool is_power_of_two(std::size_t n);
int log2_exact(std::size_t n);

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<cplx> amplitudes);

  static StateVector basis(int n_qubits, std::size_t index);

  std::size_t dim() const { return amps_.size(); }
  double norm() const;
  std::span<const cplx> amplitudes() const { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  std::vector<double> probabilities() const;

 private:
  std::vector<cplx> amps_;
};

// Matrix-vector product. Unitarity is a property of the caller's operator
// (checked where gates are built), only shapes are checked here.
StateVector apply(const Matrix& u, const StateVector& s);

// 2^n x 2^n operator acting as gate_matrix on `wires` (in order) and as the
// identity elsewhere. Built by basis-index permutation.
Matrix embed(const Matrix& gate_matrix, std::span<const int> wires, int n_qubits);

// m <- embed(gate_matrix, wires, n) * m without forming the embedding.
// gate_matrix need not be unitary (used for Jacobian terms as well).
void apply_left(Matrix& m, const Matrix& gate_matrix, std::span<const int> wires,
                int n_qubits);

// m <- m * embed(gate_matrix, wires, n)
void apply_right(Matrix& m, const Matrix& gate_matrix, std::span<const int> wires,
                 int n_qubits);

void validate_wires(std::span<const int> wires, int n_qubits);

std::string to_string(const Matrix& m, int precision = 4);

}  // namespace qmcgs
