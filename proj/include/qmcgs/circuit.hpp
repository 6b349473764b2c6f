#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmcgs/gates.hpp"
#include "qmcgs/tensor.hpp"

namespace qmcgs {

// Ordered gate tuple (O(1), ..., O(L)) with a shared parameter vector.
// The implemented unitary is O(L) ... O(1): later gates multiply from the left.
class Circuit {
 public:
  explicit Circuit(int n_qubits = 1);
  // Validates slot references: every slot < params.size(), referenced at most
  // once per gate, and slot counts match each gate's n_params.
  Circuit(int n_qubits, std::vector<GateInstance> gates, std::vector<double> params);

  int n_qubits() const { return n_qubits_; }
  std::size_t length() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  const std::vector<GateInstance>& gates() const { return gates_; }
  const GateInstance& gate(std::size_t i) const { return gates_.at(i); }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  void set_params(std::vector<double> params);

  // Appends a gate giving it fresh parameter slots initialised to `initial`
  // (zeros when empty). Returns the index of the appended gate.
  std::size_t append(const GateInstance& gate, std::span<const double> initial = {});
  // Appends a gate that reuses existing slots.
  std::size_t append_shared(const GateInstance& gate, std::vector<std::size_t> slots);

  // Parameter values bound to gate i, in slot order.
  std::vector<double> gate_params(std::size_t i) const;
  Matrix gate_matrix(std::size_t i) const;

  // First m gates, parameters compacted onto fresh slots.
  Circuit prefix(std::size_t m) const;

  friend bool operator==(const Circuit& a, const Circuit& b);

 private:
  int n_qubits_;
  std::vector<GateInstance> gates_;
  std::vector<double> params_;
};

// O(L) ... O(1); the empty circuit evaluates to the identity.
Matrix evaluate(const Circuit& c);

// Embedded unitary of a single gate at given parameters.
Matrix gate_unitary(const GateInstance& g, std::span<const double> params, int n_qubits);

// dU/dphi_j for every slot j, summed over all gate occurrences that reference
// slot j. Uses cached prefix and suffix products.
std::vector<Matrix> circuit_jacobian(const Circuit& c);

// Re tr(G^H dU/dphi_j) for every slot j, i.e. the directional derivative of a
// real function f(U) whose gradient with respect to U is G. Avoids forming
// the Jacobian matrices.
std::vector<double> contract_jacobian(const Circuit& c, const Matrix& grad_u);
// Same, reusing an already evaluated U = evaluate(c).
std::vector<double> contract_jacobian(const Circuit& c, const Matrix& grad_u, Matrix u);

// Line-oriented text form:
//
//   qubits 3
//   H(0)
//   CP(1,0)@0
//   params 1.5707963267948966
//
// Parameters are printed with 17 significant digits, so round trips are exact.
std::string to_text(const Circuit& c);
Circuit circuit_from_text(std::string_view text);

// Compact single-line form "H(0) CP(1,0)@0=1.5708 ..." for logs and CSV cells.
std::string to_inline(const Circuit& c);

}  // namespace qmcgs
