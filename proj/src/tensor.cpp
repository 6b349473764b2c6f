#include "qmcgs/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace qmcgs {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << what << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows()
        << "x" << b.cols();
    throw DimensionError(msg.str());
  }
}

// Offsets of the 2^w sub-basis states relative to a base index whose wire
// bits are all zero. wires[0] is the most significant bit of the sub-index.
struct WireLayout {
  std::size_t mask = 0;
  std::size_t count = 0;
  std::array<std::size_t, 8> small{};
  std::vector<std::size_t> big;  // only for more than three wires
  const std::size_t* offsets() const { return big.empty() ? small.data() : big.data(); }
};

WireLayout layout_for(std::span<const int> wires, int n_qubits) {
  const std::size_t w = wires.size();
  WireLayout out;
  out.count = std::size_t{1} << w;
  if (out.count > out.small.size()) out.big.assign(out.count, 0);
  std::size_t* off_out = out.big.empty() ? out.small.data() : out.big.data();
  for (std::size_t i = 0; i < w; ++i) {
    out.mask |= std::size_t{1} << (n_qubits - 1 - wires[i]);
  }
  for (std::size_t s = 0; s < out.count; ++s) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < w; ++i) {
      if ((s >> (w - 1 - i)) & 1U) off |= std::size_t{1} << (n_qubits - 1 - wires[i]);
    }
    off_out[s] = off;
  }
  return out;
}

void check_gate_shape(const Matrix& g, std::span<const int> wires, int n_qubits) {
  validate_wires(wires, n_qubits);
  const std::size_t sub = std::size_t{1} << wires.size();
  if (g.rows() != sub || g.cols() != sub) {
    throw DimensionError("gate matrix is " + std::to_string(g.rows()) + "x" +
                         std::to_string(g.cols()) + " but acts on " +
                         std::to_string(wires.size()) + " wires");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw DimensionError("entry count does not match shape");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(cplx s, Matrix a) { return a *= s; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (const auto& z : a.entries()) s += std::norm(z);
  return std::sqrt(s);
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_distance");
  double s = 0.0;
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) s += std::norm(ea[i] - eb[i]);
  return std::sqrt(s);
}

cplx trace_adjoint_product(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "trace_adjoint_product");
  cplx s{};
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) s += std::conj(ea[i]) * eb[i];
  return s;
}

double phase_insensitive_distance(const Matrix& a, const Matrix& b) {
  const double na = frobenius_norm(a);
  const double nb = frobenius_norm(b);
  const double d2 = na * na + nb * nb - 2.0 * std::abs(trace_adjoint_product(a, b));
  return std::sqrt(std::max(0.0, d2));
}

double unitarity_error(const Matrix& u) {
  if (!u.square()) throw DimensionError("unitarity_error: matrix is not square");
  const Matrix p = matmul(u.adjoint(), u);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      worst = std::max(worst, std::abs(p(i, j) - (i == j ? cplx{1.0} : cplx{})));
  return worst;
}

bool is_unitary(const Matrix& u, double tol) {
  return u.square() && u.all_finite() && unitarity_error(u) <= tol;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) throw DimensionError(std::to_string(n) + " is not a power of two");
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

StateVector::StateVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (index >= dim) throw std::out_of_range("basis index out of range");
  std::vector<cplx> a(dim);
  a[index] = 1.0;
  return StateVector(std::move(a));
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& z : amps_) s += std::norm(z);
  return std::sqrt(s);
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
  return p;
}

StateVector apply(const Matrix& u, const StateVector& s) {
  if (!u.square() || u.cols() != s.dim()) {
    throw DimensionError("apply: operator " + std::to_string(u.rows()) + "x" +
                         std::to_string(u.cols()) + " on state of dim " +
                         std::to_string(s.dim()));
  }
  std::vector<cplx> out(s.dim());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    cplx acc{};
    for (std::size_t j = 0; j < u.cols(); ++j) acc += u(i, j) * s[j];
    out[i] = acc;
  }
  return StateVector(std::move(out));
}

void validate_wires(std::span<const int> wires, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DimensionError("register size " + std::to_string(n_qubits) + " outside 1.." +
                         std::to_string(kMaxQubits));
  }
  if (wires.empty()) throw std::invalid_argument("gate acts on no wires");
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (wires[i] < 0 || wires[i] >= n_qubits) {
      throw std::out_of_range("wire " + std::to_string(wires[i]) + " outside register of " +
                              std::to_string(n_qubits) + " qubits");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (wires[i] == wires[j]) {
        throw std::invalid_argument("duplicate wire " + std::to_string(wires[i]));
      }
    }
  }
}

Matrix embed(const Matrix& gate_matrix, std::span<const int> wires, int n_qubits) {
  check_gate_shape(gate_matrix, wires, n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  const WireLayout lay = layout_for(wires, n_qubits);
  const std::size_t sub = lay.count;
  const std::size_t* offsets = lay.offsets();
  Matrix out(dim, dim);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & lay.mask) continue;
    for (std::size_t r = 0; r < sub; ++r)
      for (std::size_t c = 0; c < sub; ++c)
        out(base | offsets[r], base | offsets[c]) = gate_matrix(r, c);
  }
  return out;
}

void apply_left(Matrix& m, const Matrix& gate_matrix, std::span<const int> wires,
                int n_qubits) {
  check_gate_shape(gate_matrix, wires, n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (m.rows() != dim) throw DimensionError("apply_left: operand has wrong row count");
  const WireLayout lay = layout_for(wires, n_qubits);
  const std::size_t sub = lay.count;
  const std::size_t* offsets = lay.offsets();
  const std::size_t cols = m.cols();
  const cplx* g = gate_matrix.entries().data();
  cplx* data = m.entries().data();
  std::array<cplx, 8> small{};
  std::vector<cplx> big(sub > small.size() ? sub : 0);
  cplx* in = sub > small.size() ? big.data() : small.data();
  // Row-major storage: rows base|offsets[s] are combined column by column.
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & lay.mask) continue;
    for (std::size_t col = 0; col < cols; ++col) {
      for (std::size_t s = 0; s < sub; ++s) in[s] = data[(base | offsets[s]) * cols + col];
      for (std::size_t r = 0; r < sub; ++r) {
        cplx acc{};
        const cplx* grow = g + r * sub;
        for (std::size_t s = 0; s < sub; ++s) acc += grow[s] * in[s];
        data[(base | offsets[r]) * cols + col] = acc;
      }
    }
  }
}

void apply_right(Matrix& m, const Matrix& gate_matrix, std::span<const int> wires,
                 int n_qubits) {
  check_gate_shape(gate_matrix, wires, n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (m.cols() != dim) throw DimensionError("apply_right: operand has wrong column count");
  const WireLayout lay = layout_for(wires, n_qubits);
  const std::size_t sub = lay.count;
  const std::size_t* offsets = lay.offsets();
  const cplx* g = gate_matrix.entries().data();
  cplx* data = m.entries().data();
  std::array<cplx, 8> small{};
  std::vector<cplx> big(sub > small.size() ? sub : 0);
  cplx* in = sub > small.size() ? big.data() : small.data();
  for (std::size_t row = 0; row < m.rows(); ++row) {
    cplx* r = data + row * dim;
    for (std::size_t base = 0; base < dim; ++base) {
      if (base & lay.mask) continue;
      for (std::size_t s = 0; s < sub; ++s) in[s] = r[base | offsets[s]];
      for (std::size_t c = 0; c < sub; ++c) {
        cplx acc{};
        for (std::size_t s = 0; s < sub; ++s) acc += in[s] * g[s * sub + c];
        r[base | offsets[c]] = acc;
      }
    }
  }
}

std::string to_string(const Matrix& m, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << "[";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const cplx z = m(r, c);
      os << (c ? ", " : "") << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
         << "i";
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace qmcgs
