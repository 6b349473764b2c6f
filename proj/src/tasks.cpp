#include "qmcgs/tasks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmcgs {

namespace {

constexpr double kMinClassMass = 1e-12;

// Shared by loss, gradient and accuracy: psi_c = sum_j U[c, j] x_j for c < C.
std::vector<cplx> class_amplitudes(const Matrix& u, std::span<const double> x, int n_classes) {
  std::vector<cplx> psi(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    cplx acc{};
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] != 0.0) acc += u(c, j) * x[j];
    }
    psi[c] = acc;
  }
  return psi;
}

}  // namespace

Matrix dft_matrix(std::size_t dim) {
  if (!is_power_of_two(dim)) throw DimensionError("DFT size " + std::to_string(dim) + " is not a power of two");
  Matrix m(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      // Reduce the exponent first so large products keep full precision.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * k) % dim) /
                           static_cast<double>(dim);
      m(j, k) = std::polar(norm, angle);
    }
  }
  return m;
}

UnitarySynthesisTask::UnitarySynthesisTask(Matrix target, double tol)
    : target_(std::move(target)),
      tol_(tol),
      n_qubits_(log2_exact(target_.rows())),
      objective_(target_, FrobeniusForm::HalfSquared) {
  if (!is_unitary(target_, 1e-9)) throw std::invalid_argument("synthesis target is not unitary");
}

double UnitarySynthesisTask::loss(const Matrix& u) const { return frobenius_distance(target_, u); }

double UnitarySynthesisTask::loss_scale() const {
  return std::sqrt(2.0 * static_cast<double>(target_.rows()));
}

std::array<int, 8> wolfram_code(int rule) {
  if (rule < 0 || rule > 255) throw std::out_of_range("rule " + std::to_string(rule) + " outside 0..255");
  std::array<int, 8> code{};
  for (int i = 0; i < 8; ++i) code[i] = (rule >> (7 - i)) & 1;
  return code;
}

int rule_from_code(const std::array<int, 8>& code) {
  int rule = 0;
  for (int i = 0; i < 8; ++i) rule = (rule << 1) | (code[i] & 1);
  return rule;
}

std::vector<std::uint8_t> ca_step(std::span<const std::uint8_t> cells, int rule) {
  if (cells.size() < 3) throw std::invalid_argument("ca_step needs at least 3 cells");
  if (rule < 0 || rule > 255) throw std::out_of_range("rule outside 0..255");
  const std::size_t n = cells.size();
  std::vector<std::uint8_t> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int left = cells[(i + n - 1) % n] & 1;
    const int self = cells[i] & 1;
    const int right = cells[(i + 1) % n] & 1;
    const int pattern = (left << 2) | (self << 1) | right;
    next[i] = static_cast<std::uint8_t>((rule >> pattern) & 1);
  }
  return next;
}

CaStatePrepTask::CaStatePrepTask(int rule, double tau) : rule_(rule), tau_(tau) {
  if (rule < 0 || rule > 255) throw std::out_of_range("rule " + std::to_string(rule) + " outside 0..255");
  if (rule == 0) {
    throw std::invalid_argument(
        "rule 0 cannot be prepared: its code has no set bit, but the readout of a normalised "
        "state always has at least one basis probability above the threshold");
  }
  if (!(tau > 0.0 && tau < 0.125)) throw std::invalid_argument("threshold must lie in (0, 1/8)");
}

std::array<int, 8> CaStatePrepTask::readout(const Matrix& u) const {
  if (u.rows() != 8 || u.cols() != 8) throw DimensionError("CA task expects a 3-qubit operator");
  std::array<int, 8> r{};
  for (std::size_t i = 0; i < 8; ++i) r[i] = std::norm(u(i, 0)) > tau_ ? 1 : 0;
  return r;
}

std::array<int, 8> CaStatePrepTask::target_bits() const {
  std::array<int, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = (rule_ >> i) & 1;
  return b;
}

double CaStatePrepTask::loss(const Matrix& u) const {
  const auto r = readout(u);
  int mismatches = 0;
  for (int i = 0; i < 8; ++i) mismatches += r[i] != ((rule_ >> i) & 1);
  return mismatches / 8.0;
}

double ca_loss(const Circuit& c, const CaStatePrepTask& task) {
  if (c.n_qubits() != 3) throw DimensionError("CA circuits act on 3 qubits");
  return task.loss(evaluate(c));
}

ClassificationTask::ClassificationTask(std::vector<LabeledSample> train,
                                       std::vector<LabeledSample> test, int n_qubits,
                                       int n_classes, int k_bins)
    : train_(std::move(train)),
      test_(std::move(test)),
      n_qubits_(n_qubits),
      n_classes_(n_classes),
      k_bins_(k_bins) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DimensionError("bad register size");
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (n_classes < 2 || static_cast<std::size_t>(n_classes) > dim) {
    throw std::invalid_argument("class count must lie in 2..2^n");
  }
  if (train_.empty()) throw std::invalid_argument("classification task needs training data");
  for (const auto* set : {&train_, &test_}) {
    for (const auto& s : *set) {
      if (s.bits.size() > dim) throw DimensionError("binary vector longer than the register");
      if (s.label < 0 || s.label >= n_classes) throw std::out_of_range("label out of range");
    }
  }
  encoded_train_.reserve(train_.size());
  for (const auto& s : train_) encoded_train_.push_back(encode(s));
}

std::vector<double> ClassificationTask::encode(const LabeledSample& s) const {
  const std::size_t dim = std::size_t{1} << n_qubits_;
  std::vector<double> x(dim, 0.0);
  double ones = 0.0;
  for (std::size_t j = 0; j < s.bits.size(); ++j) {
    if (s.bits[j]) {
      x[j] = 1.0;
      ones += 1.0;
    }
  }
  if (ones == 0.0) throw std::invalid_argument("cannot amplitude-encode an all-zero vector");
  const double inv = 1.0 / std::sqrt(ones);
  for (double& v : x) v *= inv;
  return x;
}

std::vector<double> ClassificationTask::class_probabilities(const Matrix& u,
                                                            const LabeledSample& s) const {
  const auto x = encode(s);
  const auto psi = class_amplitudes(u, x, n_classes_);
  std::vector<double> q(n_classes_);
  double mass = 0.0;
  for (int c = 0; c < n_classes_; ++c) mass += (q[c] = std::norm(psi[c]));
  if (mass < kMinClassMass) return std::vector<double>(n_classes_, 1.0 / n_classes_);
  for (double& v : q) v /= mass;
  return q;
}

double ClassificationTask::value(const Matrix& u) const {
  double total = 0.0;
  for (std::size_t s = 0; s < train_.size(); ++s) {
    const auto psi = class_amplitudes(u, encoded_train_[s], n_classes_);
    double mass = 0.0;
    for (const auto& z : psi) mass += std::norm(z);
    for (int c = 0; c < n_classes_; ++c) {
      const double q = mass < kMinClassMass ? 1.0 / n_classes_ : std::norm(psi[c]) / mass;
      const double y = c == train_[s].label ? 1.0 : 0.0;
      total += (q - y) * (q - y);
    }
  }
  return total / static_cast<double>(train_.size());
}

double ClassificationTask::value_and_gradient(const Matrix& u, Matrix& grad) const {
  grad = Matrix(u.rows(), u.cols());
  const double inv_n = 1.0 / static_cast<double>(train_.size());
  double total = 0.0;
  std::vector<double> p(n_classes_), q(n_classes_);
  for (std::size_t s = 0; s < train_.size(); ++s) {
    const auto& x = encoded_train_[s];
    const auto psi = class_amplitudes(u, x, n_classes_);
    double mass = 0.0;
    for (int c = 0; c < n_classes_; ++c) mass += (p[c] = std::norm(psi[c]));
    const int label = train_[s].label;
    if (mass < kMinClassMass) {
      for (int c = 0; c < n_classes_; ++c) {
        const double e = 1.0 / n_classes_ - (c == label ? 1.0 : 0.0);
        total += e * e;
      }
      continue;
    }
    double cross = 0.0;
    for (int c = 0; c < n_classes_; ++c) {
      q[c] = p[c] / mass;
      const double e = q[c] - (c == label ? 1.0 : 0.0);
      total += e * e;
      cross += e * q[c];
    }
    // d f / d p_k = 2 [(q_k - y_k) - sum_c (q_c - y_c) q_c] / mass
    // d p_k = Re(conj(2 psi_k) dpsi_k), dpsi_k = sum_j dU[k, j] x_j
    for (int k = 0; k < n_classes_; ++k) {
      const double e = q[k] - (k == label ? 1.0 : 0.0);
      const double dfdp = 2.0 * (e - cross) / mass;
      const cplx coeff = inv_n * dfdp * 2.0 * psi[k];
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] != 0.0) grad(k, j) += coeff * x[j];
      }
    }
  }
  return total * inv_n;
}

double classification_loss(const Circuit& c, const ClassificationTask& task) {
  if (c.n_qubits() != task.n_qubits()) throw DimensionError("circuit register does not match task");
  return task.loss(evaluate(c));
}

double accuracy(const Matrix& u, std::span<const LabeledSample> data, int n_classes) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  std::vector<double> x(u.cols());
  for (const auto& s : data) {
    std::fill(x.begin(), x.end(), 0.0);
    double ones = 0.0;
    for (std::size_t j = 0; j < s.bits.size(); ++j) {
      if (s.bits[j]) {
        x[j] = 1.0;
        ones += 1.0;
      }
    }
    if (ones == 0.0) throw std::invalid_argument("cannot amplitude-encode an all-zero vector");
    for (double& v : x) v /= std::sqrt(ones);
    const auto psi = class_amplitudes(u, x, n_classes);
    int best = 0;
    double best_p = -1.0;
    for (int c = 0; c < n_classes; ++c) {
      const double pc = std::norm(psi[c]);
      if (pc > best_p) {
        best_p = pc;
        best = c;
      }
    }
    correct += best == s.label;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double accuracy(const Circuit& c, std::span<const LabeledSample> data, int n_classes) {
  return accuracy(evaluate(c), data, n_classes);
}

}  // namespace qmcgs
