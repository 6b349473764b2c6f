#pragma once

// Search tasks: each supplies a loss over circuit unitaries, the loss at which
// a search succeeds, and optionally a differentiable objective for parameter
// optimisation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qmcgs/circuit.hpp"
#include "qmcgs/param_opt.hpp"
#include "qmcgs/tensor.hpp"

namespace qmcgs {

class Task {
 public:
  virtual ~Task() = default;
  virtual std::string kind() const = 0;
  virtual int n_qubits() const = 0;
  virtual double loss(const Matrix& u) const = 0;
  virtual double default_success_tol() const = 0;
  // Losses are divided by this before scoring.
  virtual double loss_scale() const { return 1.0; }
  // Differentiable objective for continuous parameters, or nullptr.
  virtual const Objective* objective() const { return nullptr; }

  double loss(const Circuit& c) const { return loss(evaluate(c)); }
};

// Unitary DFT with entries w^{jk} / sqrt(dim), w = exp(-2 pi i / dim).
Matrix dft_matrix(std::size_t dim);

class UnitarySynthesisTask final : public Task {
 public:
  explicit UnitarySynthesisTask(Matrix target, double tol = 1e-6);

  std::string kind() const override { return "unitary"; }
  int n_qubits() const override { return n_qubits_; }
  double loss(const Matrix& u) const override;
  double default_success_tol() const override { return tol_; }
  // sqrt(2 * dim): the typical Frobenius distance between unrelated unitaries.
  double loss_scale() const override;
  const Objective* objective() const override { return &objective_; }

  const Matrix& target() const { return target_; }
  using Task::loss;

 private:
  Matrix target_;
  double tol_;
  int n_qubits_;
  FrobeniusObjective objective_;
};

// Bits of the Wolfram code in table order: element i is the successor of the
// neighbourhood pattern 7 - i (111, 110, ..., 000). Throws for rule > 255.
std::array<int, 8> wolfram_code(int rule);
int rule_from_code(const std::array<int, 8>& code);

// One synchronous update with periodic boundary. Throws for fewer than 3 cells.
std::vector<std::uint8_t> ca_step(std::span<const std::uint8_t> cells, int rule);

// Prepares |000> -> psi such that basis state |p> carries probability above tau
// exactly when the rule maps pattern p to 1.
class CaStatePrepTask final : public Task {
 public:
  // Rule 0 is rejected: probabilities sum to one, so the readout always has at
  // least one set bit and the all-zero code cannot be produced.
  explicit CaStatePrepTask(int rule, double tau = 1e-4);

  std::string kind() const override { return "ca"; }
  int n_qubits() const override { return 3; }
  // Fraction of the 8 readout bits that disagree with the code.
  double loss(const Matrix& u) const override;
  double default_success_tol() const override { return 0.0; }

  int rule() const { return rule_; }
  double tau() const { return tau_; }
  // Readout bit per basis state index (index p = pattern p).
  std::array<int, 8> readout(const Matrix& u) const;
  std::array<int, 8> target_bits() const;
  using Task::loss;

 private:
  int rule_;
  double tau_;
};

double ca_loss(const Circuit& c, const CaStatePrepTask& task);

struct LabeledSample {
  std::vector<int> bits;
  int label = 0;
};

// Amplitude-encodes each binary vector (normalised, zero padded to 2^n), applies
// U and reads the probabilities of the first C basis states, renormalised over
// those C. The loss is the mean squared error against one-hot labels.
class ClassificationTask final : public Task, public Objective {
 public:
  ClassificationTask(std::vector<LabeledSample> train, std::vector<LabeledSample> test,
                     int n_qubits, int n_classes, int k_bins = 3);

  std::string kind() const override { return "classification"; }
  int n_qubits() const override { return n_qubits_; }
  double loss(const Matrix& u) const override { return value(u); }
  // Classification runs are budget bound: success is never declared early.
  double default_success_tol() const override { return -1.0; }
  const Objective* objective() const override { return this; }

  double value(const Matrix& u) const override;
  double value_and_gradient(const Matrix& u, Matrix& grad) const override;

  int n_classes() const { return n_classes_; }
  int k_bins() const { return k_bins_; }
  const std::vector<LabeledSample>& train() const { return train_; }
  const std::vector<LabeledSample>& test() const { return test_; }

  // Renormalised class probabilities for one encoded sample.
  std::vector<double> class_probabilities(const Matrix& u, const LabeledSample& s) const;
  using Task::loss;

 private:
  std::vector<double> encode(const LabeledSample& s) const;

  std::vector<LabeledSample> train_;
  std::vector<LabeledSample> test_;
  std::vector<std::vector<double>> encoded_train_;
  int n_qubits_;
  int n_classes_;
  int k_bins_;
};

double classification_loss(const Circuit& c, const ClassificationTask& task);

// Fraction of samples whose most probable class (ties to the lowest index)
// equals the label.
double accuracy(const Circuit& c, std::span<const LabeledSample> data, int n_classes);
double accuracy(const Matrix& u, std::span<const LabeledSample> data, int n_classes);

}  // namespace qmcgs
