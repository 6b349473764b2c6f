#include "qmcgs/gates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qmcgs {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;
const cplx kI{0.0, 1.0};

GateSpec fixed(std::string name, int arity, Matrix m, bool symmetric = false) {
  GateSpec spec;
  spec.name = std::move(name);
  spec.arity = arity;
  spec.symmetric = symmetric;
  spec.matrix_fn = [m = std::move(m)](std::span<const double>) { return m; };
  return spec;
}

Matrix permutation_matrix(const std::vector<std::size_t>& image) {
  Matrix m(image.size(), image.size());
  for (std::size_t c = 0; c < image.size(); ++c) m(image[c], c) = 1.0;
  return m;
}

Matrix controlled(const Matrix& u) {
  Matrix m = Matrix::identity(2 * u.rows());
  for (std::size_t r = 0; r < u.rows(); ++r)
    for (std::size_t c = 0; c < u.cols(); ++c) m(u.rows() + r, u.cols() + c) = u(r, c);
  return m;
}

Matrix rx_matrix(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return Matrix{{c, -kI * s}, {-kI * s, c}};
}

Matrix rx_jacobian(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return Matrix{{-0.5 * s, -0.5 * kI * c}, {-0.5 * kI * c, -0.5 * s}};
}

Matrix cp_matrix(double phi) {
  Matrix m = Matrix::identity(4);
  m(3, 3) = std::exp(kI * phi);
  return m;
}

Matrix cp_jacobian(double phi) {
  Matrix m(4, 4);
  m(3, 3) = kI * std::exp(kI * phi);
  return m;
}

GateSpec parametric1(std::string name, int arity, Matrix (*mat)(double),
                     Matrix (*jac)(double), bool symmetric = false) {
  GateSpec spec;
  spec.name = std::move(name);
  spec.arity = arity;
  spec.n_params = 1;
  spec.symmetric = symmetric;
  spec.matrix_fn = [mat](std::span<const double> p) { return mat(p[0]); };
  spec.jacobian_fn = [jac](std::span<const double> p) { return std::vector<Matrix>{jac(p[0])}; };
  return spec;
}

// Unitarity at sampled angles and Jacobian vs central differences.
void check_spec(const GateSpec& spec) {
  const std::vector<double> samples = {0.0, 0.37, -1.3, 2.9};
  const std::size_t dim = std::size_t{1} << spec.arity;
  for (double theta : samples) {
    std::vector<double> p(spec.n_params, theta);
    const Matrix m = spec.matrix(p);
    if (m.rows() != dim || !is_unitary(m, 1e-10)) {
      throw std::logic_error("gate " + spec.name + " is not unitary");
    }
    if (!spec.parametric()) break;
    const auto jac = spec.jacobian(p);
    constexpr double h = 1e-5;
    for (int k = 0; k < spec.n_params; ++k) {
      auto plus = p;
      auto minus = p;
      plus[k] += h;
      minus[k] -= h;
      Matrix fd = spec.matrix(plus) - spec.matrix(minus);
      fd *= 1.0 / (2.0 * h);
      if (frobenius_distance(fd, jac[k]) > 1e-6 * std::max(1.0, frobenius_norm(jac[k]))) {
        throw std::logic_error("gate " + spec.name + " Jacobian disagrees with differences");
      }
    }
  }
}

std::vector<GateSpec> build_registry() {
  const double r = kSqrtHalf;
  const Matrix h{{r, r}, {r, -r}};
  std::vector<GateSpec> specs;
  specs.push_back(fixed("X", 1, Matrix{{0, 1}, {1, 0}}));
  specs.push_back(fixed("Y", 1, Matrix{{0, -kI}, {kI, 0}}));
  specs.push_back(fixed("Z", 1, Matrix{{1, 0}, {0, -1}}));
  specs.push_back(fixed("H", 1, h));
  specs.push_back(fixed("S", 1, phase_gate_matrix(std::numbers::pi / 2)));
  specs.push_back(fixed("T", 1, phase_gate_matrix(std::numbers::pi / 4)));
  specs.push_back(fixed("CNOT", 2, permutation_matrix({0, 1, 3, 2})));
  specs.push_back(fixed("CZ", 2, controlled(Matrix{{1, 0}, {0, -1}}), true));
  specs.push_back(fixed("CH", 2, controlled(h)));
  specs.push_back(fixed("SWAP", 2, permutation_matrix({0, 2, 1, 3}), true));
  specs.push_back(fixed("TOFFOLI", 3, permutation_matrix({0, 1, 2, 3, 4, 5, 7, 6})));
  specs.push_back(parametric1("P", 1, phase_gate_matrix, phase_gate_jacobian));
  specs.push_back(parametric1("RX", 1, rx_matrix, rx_jacobian));
  specs.push_back(parametric1("CP", 2, cp_matrix, cp_jacobian, true));
  for (const auto& s : specs) check_spec(s);
  return specs;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void grammar_error(std::size_t line_no, const std::string& what) {
  throw std::invalid_argument("gate set line " + std::to_string(line_no) + ": " + what);
}

// Expands a wire pattern where -1 stands for '*'.
void expand_pattern(const GateSpec& spec, const std::vector<int>& pattern, bool unordered,
                    int n_qubits, std::vector<GateInstance>& out) {
  std::vector<int> current(pattern.size());
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == pattern.size()) {
      if (unordered && !std::is_sorted(current.begin(), current.end())) return;
      GateInstance g{&spec, current, {}};
      validate_wires(g.wires, n_qubits);
      out.push_back(std::move(g));
      return;
    }
    if (pattern[pos] >= 0) {
      current[pos] = pattern[pos];
      if (std::find(current.begin(), current.begin() + pos, current[pos]) !=
          current.begin() + pos)
        return;
      self(self, pos + 1);
      return;
    }
    for (int q = 0; q < n_qubits; ++q) {
      if (std::find(current.begin(), current.begin() + pos, q) != current.begin() + pos) {
        continue;
      }
      current[pos] = q;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
}

const char* builtin_text(std::string_view name) {
  // Three qubits need only the outer swap for the bit reversal.
  if (name == "qft3") {
    return "qubits 3\nH(*)\nCP{*,*}\nSWAP(0,2)\n";
  }
  if (name == "qft3-full") {
    return "qubits 3\nH(*)\nCP{*,*}\nSWAP{*,*}\n";
  }
  if (name == "ca3") {
    return "qubits 3\nX(*)\nH(*)\nCNOT(*,*)\nCH(*,*)\n"
           "TOFFOLI(1,2,0)\nTOFFOLI(0,2,1)\nTOFFOLI(0,1,2)\n";
  }
  // Gates close to the identity keep the Frobenius loss informative along a
  // correct prefix; a Hadamard sits at the maximum distance.
  if (name == "bench8") {
    return "qubits 3\nT(*)\nCNOT(0,1)\nCNOT(1,0)\nCNOT(1,2)\nCNOT(2,1)\nCZ(0,2)\n";
  }
  // Few commuting pairs, hence few short words equal to a shorter product.
  if (name == "bench8-lc") {
    return "qubits 3\nCH(0,1)\nCH(1,2)\nCH(2,0)\nCNOT(0,1)\nCNOT(1,2)\nCNOT(2,0)\nT(1)\nT(2)\n";
  }
  if (name == "wide32") {
    return "qubits 4\nX(*)\nY(*)\nZ(*)\nH(*)\nS(*)\nT(*)\n"
           "CNOT(0,1)\nCNOT(1,2)\nCNOT(2,3)\nCNOT(3,0)\n"
           "SWAP(0,1)\nSWAP(1,2)\nSWAP(2,3)\nSWAP(0,3)\n";
  }
  if (name == "qml4") {
    return "qubits 4\nX(*)\nCNOT(*,*)\nSWAP{*,*}\nRX(*)\n";
  }
  if (name == "qml5") {
    return "qubits 5\nX(*)\nCNOT(*,*)\nSWAP{*,*}\nRX(*)\n";
  }
  return nullptr;
}

}  // namespace

Matrix GateSpec::matrix(std::span<const double> params) const {
  if (static_cast<int>(params.size()) != n_params) {
    throw std::invalid_argument("gate " + name + " expects " + std::to_string(n_params) +
                                " parameters, got " + std::to_string(params.size()));
  }
  return matrix_fn(params);
}

std::vector<Matrix> GateSpec::jacobian(std::span<const double> params) const {
  if (!parametric()) return {};
  if (static_cast<int>(params.size()) != n_params) {
    throw std::invalid_argument("gate " + name + " expects " + std::to_string(n_params) +
                                " parameters");
  }
  return jacobian_fn(params);
}

std::span<const GateSpec> gate_specs() {
  static const std::vector<GateSpec> registry = build_registry();
  return registry;
}

const GateSpec& gate_spec(std::string_view name) {
  for (const auto& s : gate_specs()) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

std::string GateInstance::label() const {
  std::string out = spec->name + "(";
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(wires[i]);
  }
  return out + ")";
}

GateInstance make_gate(std::string_view name, std::vector<int> wires, int n_qubits) {
  const GateSpec& spec = gate_spec(name);
  if (static_cast<int>(wires.size()) != spec.arity) {
    throw std::invalid_argument("gate " + spec.name + " acts on " + std::to_string(spec.arity) +
                                " wires, got " + std::to_string(wires.size()));
  }
  validate_wires(wires, n_qubits);
  return GateInstance{&spec, std::move(wires), {}};
}

Matrix phase_gate_matrix(double phi) {
  return Matrix{{1.0, 0.0}, {0.0, std::exp(kI * phi)}};
}

Matrix phase_gate_jacobian(double phi) {
  return Matrix{{0.0, 0.0}, {0.0, kI * std::exp(kI * phi)}};
}

std::vector<GateInstance> standard_gate_set(int n_qubits, bool include_parametric) {
  if (n_qubits < 1) throw std::invalid_argument("standard_gate_set needs n_qubits >= 1");
  std::vector<GateInstance> out;
  auto add = [&](std::string_view name, std::vector<int> wires) {
    out.push_back(make_gate(name, std::move(wires), n_qubits));
  };
  for (const char* name : {"X", "Y", "Z", "H"})
    for (int q = 0; q < n_qubits; ++q) add(name, {q});
  for (int a = 0; a < n_qubits; ++a)
    for (int b = 0; b < n_qubits; ++b)
      if (a != b) add("CNOT", {a, b});
  for (int a = 0; a < n_qubits; ++a)
    for (int b = a + 1; b < n_qubits; ++b) add("SWAP", {a, b});
  if (n_qubits >= 3) {
    for (int a = 0; a < n_qubits; ++a)
      for (int b = 0; b < n_qubits; ++b)
        for (int c = 0; c < n_qubits; ++c)
          if (a != b && b != c && a != c) add("TOFFOLI", {a, b, c});
  }
  if (include_parametric) {
    for (const char* name : {"P", "RX"})
      for (int q = 0; q < n_qubits; ++q) add(name, {q});
    for (int a = 0; a < n_qubits; ++a)
      for (int b = 0; b < n_qubits; ++b)
        if (a != b) add("CP", {a, b});
  }
  return out;
}

bool GateSet::has_parametric() const {
  return std::any_of(gates.begin(), gates.end(), [](const auto& g) { return g.parametric(); });
}

GateSet parse_gate_set(std::string_view text, std::string name) {
  GateSet set;
  set.name = std::move(name);
  bool have_qubits = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.rfind("qubits", 0) == 0) {
      try {
        set.n_qubits = std::stoi(line.substr(6));
      } catch (const std::exception&) {
        grammar_error(line_no, "bad qubit count");
      }
      if (set.n_qubits < 1 || set.n_qubits > kMaxQubits) grammar_error(line_no, "qubits out of range");
      have_qubits = true;
      continue;
    }
    if (!have_qubits) grammar_error(line_no, "'qubits N' must precede gate entries");
    const auto open = line.find_first_of("({");
    if (open == std::string::npos) grammar_error(line_no, "expected NAME(wires)");
    const bool unordered = line[open] == '{';
    const char close = unordered ? '}' : ')';
    if (line.back() != close) grammar_error(line_no, std::string("missing '") + close + "'");
    const std::string gate_name = trim(std::string_view(line).substr(0, open));
    const GateSpec* spec = nullptr;
    try {
      spec = &gate_spec(gate_name);
    } catch (const std::invalid_argument& e) {
      grammar_error(line_no, e.what());
    }
    std::vector<int> pattern;
    std::istringstream wires(line.substr(open + 1, line.size() - open - 2));
    std::string tok;
    while (std::getline(wires, tok, ',')) {
      tok = trim(tok);
      if (tok == "*") {
        pattern.push_back(-1);
      } else {
        try {
          std::size_t used = 0;
          pattern.push_back(std::stoi(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          grammar_error(line_no, "bad wire '" + tok + "'");
        }
      }
    }
    if (static_cast<int>(pattern.size()) != spec->arity) {
      grammar_error(line_no, gate_name + " takes " + std::to_string(spec->arity) + " wires");
    }
    try {
      expand_pattern(*spec, pattern, unordered, set.n_qubits, set.gates);
    } catch (const std::exception& e) {
      grammar_error(line_no, e.what());
    }
  }
  if (!have_qubits) throw std::invalid_argument("gate set has no 'qubits N' directive");
  if (set.gates.empty()) throw std::invalid_argument("gate set is empty");
  return set;
}

GateSet load_gate_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open gate set file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem.erase(0, slash + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem.erase(dot);
  return parse_gate_set(buf.str(), stem);
}

GateSet named_gate_set(std::string_view name) {
  for (std::string_view prefix : {"standard:", "standard-discrete:"}) {
    if (name.substr(0, prefix.size()) == prefix) {
      int n = 0;
      try {
        n = std::stoi(std::string(name.substr(prefix.size())));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad gate set name '" + std::string(name) + "'");
      }
      if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("bad gate set name '" + std::string(name) + "'");
      }
      return GateSet{std::string(name), n, standard_gate_set(n, prefix == "standard:")};
    }
  }
  if (const char* text = builtin_text(name)) return parse_gate_set(text, std::string(name));
  throw std::invalid_argument("unknown gate set '" + std::string(name) + "'");
}

std::vector<std::string> builtin_gate_set_names() {
  return {"standard:N", "standard-discrete:N", "qft3", "qft3-full", "ca3", "bench8", "bench8-lc",
          "wide32", "qml4", "qml5"};
}

GateSet resolve_gate_set(std::string_view name_or_path) {
  const std::string_view ext = ".gates";
  if (name_or_path.size() > ext.size() &&
      name_or_path.substr(name_or_path.size() - ext.size()) == ext) {
    return load_gate_set_file(std::string(name_or_path));
  }
  return named_gate_set(name_or_path);
}

}  // namespace qmcgs
