#pragma once

// Elementary gate set: fixed and parametric gates with analytic Jacobians.
//
// The same matrix acting on different wires is a different elementary gate,
// so a gate set is a list of GateInstances (spec + wires), not of specs.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmcgs/tensor.hpp"

namespace qmcgs {

struct GateSpec {
  std::string name;
  int arity = 1;
  int n_params = 0;
  std::function<Matrix(std::span<const double>)> matrix_fn;
  // One derivative matrix per parameter. Empty for fixed gates.
  std::function<std::vector<Matrix>(std::span<const double>)> jacobian_fn;
  // Gates whose matrix is invariant under any permutation of their wires
  // (SWAP, CP). Used by the gate-set grammar's unordered form.
  bool symmetric = false;

  bool parametric() const { return n_params > 0; }
  Matrix matrix(std::span<const double> params = {}) const;
  std::vector<Matrix> jacobian(std::span<const double> params) const;
};

// Registry of the built-in specs, immutable after first use. Every spec is
// checked for unitarity and Jacobian consistency when the registry is built.
std::span<const GateSpec> gate_specs();
const GateSpec& gate_spec(std::string_view name);  // throws std::invalid_argument

struct GateInstance {
  const GateSpec* spec = nullptr;
  std::vector<int> wires;
  // Indices into the owning circuit's parameter vector (size n_params).
  // Empty for gate-set entries that are not yet placed in a circuit.
  std::vector<std::size_t> param_slots;

  const std::string& name() const { return spec->name; }
  bool parametric() const { return spec->parametric(); }
  int n_params() const { return spec->n_params; }
  // "NAME(w0,w1,...)"
  std::string label() const;
  // Same spec and wires; slot assignment ignored.
  bool same_placement(const GateInstance& other) const {
    return spec == other.spec && wires == other.wires;
  }
};

// Builds an instance and validates the wire count and register bounds.
GateInstance make_gate(std::string_view name, std::vector<int> wires, int n_qubits);

// All single-qubit placements of X, Y, Z, H (then P and RX when parametric),
// ordered pairs for CNOT, unordered pairs for SWAP, ordered pairs for CP
// (parametric), ordered triples for TOFFOLI when n_qubits >= 3.
std::vector<GateInstance> standard_gate_set(int n_qubits, bool include_parametric);

Matrix phase_gate_matrix(double phi);
Matrix phase_gate_jacobian(double phi);

struct GateSet {
  std::string name;
  int n_qubits = 1;
  std::vector<GateInstance> gates;

  std::size_t size() const { return gates.size(); }
  bool has_parametric() const;
};

// Parses the plain-text gate-set grammar:
//
//   # comment
//   qubits N                 register size (required, first directive)
//   NAME(w, w, ...)          one placement
//   NAME(*)                  every placement of a 1-qubit gate
//   NAME(*, *)               every ordered tuple of distinct wires
//   NAME{*, *}               every unordered tuple (ascending wires)
//
// Explicit wires and '*' may be mixed, e.g. CNOT(0, *).
GateSet parse_gate_set(std::string_view text, std::string name = "custom");
GateSet load_gate_set_file(const std::string& path);

// Built-in named sets: "standard:N", "standard-discrete:N", "qft3", "qft3-full", "ca3",
// "bench8", "bench8-lc", "wide32", "qml4", "qml5".
GateSet named_gate_set(std::string_view name);
std::vector<std::string> builtin_gate_set_names();

// Resolves a builtin name, or a path when the name ends with ".gates".
GateSet resolve_gate_set(std::string_view name_or_path);

}  // namespace qmcgs
