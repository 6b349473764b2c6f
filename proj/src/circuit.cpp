#include "qmcgs/circuit.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qmcgs {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view tok) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("bad number '" + std::string(tok) + "'");
  }
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DimensionError("register size " + std::to_string(n_qubits) + " outside 1.." +
                         std::to_string(kMaxQubits));
  }
}

Circuit::Circuit(int n_qubits, std::vector<GateInstance> gates, std::vector<double> params)
    : Circuit(n_qubits) {
  params_ = std::move(params);
  for (auto& g : gates) {
    if (static_cast<int>(g.param_slots.size()) != g.n_params()) {
      throw std::invalid_argument("gate " + g.label() + " has " +
                                  std::to_string(g.param_slots.size()) + " slots, needs " +
                                  std::to_string(g.n_params()));
    }
    append_shared(g, g.param_slots);
  }
}

void Circuit::set_params(std::vector<double> params) {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("parameter vector has " + std::to_string(params.size()) +
                                " entries, circuit has " + std::to_string(params_.size()));
  }
  params_ = std::move(params);
}

std::size_t Circuit::append(const GateInstance& gate, std::span<const double> initial) {
  if (!initial.empty() && static_cast<int>(initial.size()) != gate.n_params()) {
    throw std::invalid_argument("gate " + gate.label() + " expects " +
                                std::to_string(gate.n_params()) + " initial values");
  }
  std::vector<std::size_t> slots;
  for (int k = 0; k < gate.n_params(); ++k) {
    slots.push_back(params_.size());
    params_.push_back(initial.empty() ? 0.0 : initial[k]);
  }
  return append_shared(gate, std::move(slots));
}

std::size_t Circuit::append_shared(const GateInstance& gate, std::vector<std::size_t> slots) {
  if (gate.spec == nullptr) throw std::invalid_argument("gate has no spec");
  if (static_cast<int>(gate.wires.size()) != gate.spec->arity) {
    throw std::invalid_argument("gate " + gate.label() + " has wrong wire count");
  }
  validate_wires(gate.wires, n_qubits_);
  if (static_cast<int>(slots.size()) != gate.n_params()) {
    throw std::invalid_argument("gate " + gate.label() + " needs " +
                                std::to_string(gate.n_params()) + " slots");
  }
  for (std::size_t s : slots) {
    if (s >= params_.size()) {
      throw std::out_of_range("parameter slot " + std::to_string(s) + " out of range");
    }
  }
  GateInstance g{gate.spec, gate.wires, std::move(slots)};
  gates_.push_back(std::move(g));
  return gates_.size() - 1;
}

std::vector<double> Circuit::gate_params(std::size_t i) const {
  const auto& g = gates_.at(i);
  std::vector<double> out;
  out.reserve(g.param_slots.size());
  for (std::size_t s : g.param_slots) out.push_back(params_[s]);
  return out;
}

Matrix Circuit::gate_matrix(std::size_t i) const { return gates_.at(i).spec->matrix(gate_params(i)); }

Circuit Circuit::prefix(std::size_t m) const {
  if (m > gates_.size()) throw std::out_of_range("prefix longer than circuit");
  Circuit out(n_qubits_);
  for (std::size_t i = 0; i < m; ++i) {
    const auto p = gate_params(i);
    out.append(gates_[i], p);
  }
  return out;
}

bool operator==(const Circuit& a, const Circuit& b) {
  if (a.n_qubits_ != b.n_qubits_ || a.params_ != b.params_ || a.gates_.size() != b.gates_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.gates_.size(); ++i) {
    if (!a.gates_[i].same_placement(b.gates_[i]) ||
        a.gates_[i].param_slots != b.gates_[i].param_slots)
      return false;
  }
  return true;
}

Matrix gate_unitary(const GateInstance& g, std::span<const double> params, int n_qubits) {
  return embed(g.spec->matrix(params), g.wires, n_qubits);
}

Matrix evaluate(const Circuit& c) {
  Matrix u = Matrix::identity(std::size_t{1} << c.n_qubits());
  for (std::size_t i = 0; i < c.length(); ++i) {
    apply_left(u, c.gate_matrix(i), c.gate(i).wires, c.n_qubits());
  }
  return u;
}

std::vector<Matrix> circuit_jacobian(const Circuit& c) {
  const std::size_t dim = std::size_t{1} << c.n_qubits();
  const std::size_t L = c.length();
  std::vector<Matrix> jac(c.param_count(), Matrix(dim, dim));
  if (c.param_count() == 0) return jac;

  // prefix[m] = O(m-1)...O(0); suffix[m] = O(L-1)...O(m+1) for gate m.
  std::vector<Matrix> prefix(L + 1);
  prefix[0] = Matrix::identity(dim);
  for (std::size_t m = 0; m < L; ++m) {
    prefix[m + 1] = prefix[m];
    apply_left(prefix[m + 1], c.gate_matrix(m), c.gate(m).wires, c.n_qubits());
  }
  std::vector<Matrix> suffix(L + 1);
  suffix[L] = Matrix::identity(dim);
  for (std::size_t m = L; m-- > 0;) {
    suffix[m] = suffix[m + 1];
    apply_right(suffix[m], c.gate_matrix(m), c.gate(m).wires, c.n_qubits());
  }
  for (std::size_t m = 0; m < L; ++m) {
    const auto& g = c.gate(m);
    if (!g.parametric()) continue;
    const auto dgates = g.spec->jacobian(c.gate_params(m));
    for (std::size_t k = 0; k < dgates.size(); ++k) {
      Matrix term = prefix[m];
      apply_left(term, dgates[k], g.wires, c.n_qubits());
      jac[g.param_slots[k]] += matmul(suffix[m + 1], term);
    }
  }
  return jac;
}

std::vector<double> contract_jacobian(const Circuit& c, const Matrix& grad_u) {
  if (c.param_count() == 0) return {};
  return contract_jacobian(c, grad_u, evaluate(c));
}

std::vector<double> contract_jacobian(const Circuit& c, const Matrix& grad_u, Matrix u) {
  std::vector<double> out(c.param_count(), 0.0);
  if (c.param_count() == 0) return out;
  const int n = c.n_qubits();
  // Walk backwards: P = O(m-1)...O(0) recovered from U by undoing gates
  // (exact for unitary gates), W = S_m^H G.
  Matrix p = std::move(u);
  Matrix w = grad_u;
  for (std::size_t m = c.length(); m-- > 0;) {
    const auto& g = c.gate(m);
    const auto params = c.gate_params(m);
    const Matrix gm_adj = g.spec->matrix(params).adjoint();
    apply_left(p, gm_adj, g.wires, n);
    if (g.parametric()) {
      const auto dgates = g.spec->jacobian(params);
      for (std::size_t k = 0; k < dgates.size(); ++k) {
        Matrix term = p;
        apply_left(term, dgates[k], g.wires, n);
        out[g.param_slots[k]] += trace_adjoint_product(w, term).real();
      }
    }
    apply_left(w, gm_adj, g.wires, n);
  }
  return out;
}

std::string to_text(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.n_qubits() << "\n";
  for (const auto& g : c.gates()) {
    os << g.label();
    if (!g.param_slots.empty()) {
      os << "@";
      for (std::size_t k = 0; k < g.param_slots.size(); ++k) {
        os << (k ? "," : "") << g.param_slots[k];
      }
    }
    os << "\n";
  }
  os << "params";
  for (double p : c.params()) os << " " << format_double(p);
  os << "\n";
  return os.str();
}

Circuit circuit_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int n_qubits = 0;
  bool have_params = false;
  std::vector<GateInstance> gates;
  std::vector<double> params;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw std::invalid_argument("circuit line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("qubits", 0) == 0) {
      try {
        n_qubits = std::stoi(line.substr(6));
      } catch (const std::exception&) {
        fail("bad qubit count");
      }
      continue;
    }
    if (line.rfind("params", 0) == 0) {
      std::istringstream toks(line.substr(6));
      std::string tok;
      while (toks >> tok) params.push_back(parse_double(tok));
      have_params = true;
      continue;
    }
    if (n_qubits == 0) fail("'qubits N' must come first");
    const auto open = line.find('(');
    const auto close = line.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      fail("expected NAME(wires)");
    }
    std::vector<int> wires;
    std::istringstream ws(line.substr(open + 1, close - open - 1));
    std::string tok;
    while (std::getline(ws, tok, ',')) {
      try {
        wires.push_back(std::stoi(trim(tok)));
      } catch (const std::exception&) {
        fail("bad wire '" + tok + "'");
      }
    }
    GateInstance g = make_gate(line.substr(0, open), std::move(wires), n_qubits);
    std::string rest = trim(std::string_view(line).substr(close + 1));
    if (!rest.empty()) {
      if (rest[0] != '@') fail("unexpected text after gate");
      std::istringstream ss(rest.substr(1));
      while (std::getline(ss, tok, ',')) {
        try {
          g.param_slots.push_back(static_cast<std::size_t>(std::stoul(trim(tok))));
        } catch (const std::exception&) {
          fail("bad slot '" + tok + "'");
        }
      }
    }
    gates.push_back(std::move(g));
  }
  if (n_qubits == 0) throw std::invalid_argument("circuit text has no 'qubits N' line");
  // Fixed-gate circuits may leave the params line out.
  bool uses_slots = false;
  for (const auto& g : gates) uses_slots = uses_slots || !g.param_slots.empty();
  if (!have_params && uses_slots) throw std::invalid_argument("circuit text has no 'params' line");
  return Circuit(n_qubits, std::move(gates), std::move(params));
}

std::string to_inline(const Circuit& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.length(); ++i) {
    if (i) os << " ";
    os << c.gate(i).label();
    const auto p = c.gate_params(i);
    for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "=") << format_double(p[k]);
  }
  return os.str();
}

}  // namespace qmcgs
