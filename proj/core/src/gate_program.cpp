#include "elastoq/gate_program.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace elastoq {

std::vector<int> gate_qubits(const Gate& gate) {
  struct Visitor {
    std::vector<int> operator()(const Hadamard& g) const { return {g.target}; }
    std::vector<int> operator()(const PhaseS& g) const { return {g.target}; }
    std::vector<int> operator()(const Cnot& g) const {
      return {g.control, g.target};
    }
    std::vector<int> operator()(const MultiControlledRz& g) const {
      std::vector<int> q = g.controls;
      q.push_back(g.target);
      return q;
    }
    std::vector<int> operator()(const PatternControlledRz& g) const {
      std::vector<int> q{1, 2, 3, 4};
      q.insert(q.end(), g.extra_controls.begin(), g.extra_controls.end());
      q.push_back(g.target);
      return q;
    }
    std::vector<int> operator()(const FourQubitUnitary&) const {
      return {1, 2, 3, 4};
    }
  };
  return std::visit(Visitor{}, gate);
}

void GateProgram::append(const GateProgram& other) {
  const int shift = static_cast<int>(unitaries.size());
  unitaries.insert(unitaries.end(), other.unitaries.begin(),
                   other.unitaries.end());
  for (Gate g : other.gates) {
    if (auto* u = std::get_if<FourQubitUnitary>(&g)) u->unitary_ref += shift;
    gates.push_back(std::move(g));
  }
}

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

struct Writer {
  std::ostream& os;
  void operator()(const Hadamard& g) const { os << "H " << g.target; }
  void operator()(const PhaseS& g) const {
    os << (g.adjoint ? "SDG " : "S ") << g.target;
  }
  void operator()(const Cnot& g) const {
    os << "CX " << g.target << " c=" << g.control;
  }
  void operator()(const MultiControlledRz& g) const {
    os << "MCRZ " << g.target << " c=" << join(g.controls)
       << " angle=" << g.angle;
  }
  void operator()(const PatternControlledRz& g) const {
    os << "PCRZ " << g.target << " pattern=" << g.pattern
       << " c=" << join(g.extra_controls) << " angle=" << g.angle;
  }
  void operator()(const FourQubitUnitary& g) const {
    os << "U4 1 ref=" << g.unitary_ref << " adj=" << (g.adjoint ? 1 : 0);
  }
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw ParameterError("gate program line " + std::to_string(line) + ": " +
                       msg);
}

}  // namespace

void write_program(std::ostream& os, const GateProgram& p) {
  const auto old = os.precision(17);
  os << "elastoq-gates 1\n"
     << "qubits " << p.qubits << '\n'
     << "n " << p.n << '\n'
     << "scheme " << (p.scheme.empty() ? "-" : p.scheme) << '\n'
     << "tau " << p.tau << '\n'
     << "cnot_account " << p.cnot_account << '\n'
     << "unitaries " << p.unitaries.size() << '\n';
  for (const Matrix16c& u : p.unitaries) {
    for (int r = 0; r < kStateComponents; ++r) {
      for (int c = 0; c < kStateComponents; ++c) {
        os << (c ? " " : "") << u(r, c).real() << ' ' << u(r, c).imag();
      }
      os << '\n';
    }
  }
  os << "gates " << p.gates.size() << '\n';
  for (const Gate& g : p.gates) {
    std::visit(Writer{os}, g);
    os << '\n';
  }
  os.precision(old);
}

static GateProgram parse_program(std::istream& is, int& lineno) {
  GateProgram p;
  std::string line;
  auto next = [&]() -> std::istringstream {
    if (!std::getline(is, line)) parse_fail(lineno + 1, "unexpected end of input");
    ++lineno;
    return std::istringstream(line);
  };
  auto header = [&](const char* key) {
    std::istringstream ss = next();
    std::string k, v;
    ss >> k >> v;
    if (k != key) parse_fail(lineno, std::string("expected '") + key + "'");
    return v;
  };

  if (header("elastoq-gates") != "1") parse_fail(lineno, "unsupported version");
  p.qubits = std::stoi(header("qubits"));
  p.n = std::stoi(header("n"));
  p.scheme = header("scheme");
  if (p.scheme == "-") p.scheme.clear();
  p.tau = std::stod(header("tau"));
  p.cnot_account = std::stoll(header("cnot_account"));
  const int nu = std::stoi(header("unitaries"));
  for (int i = 0; i < nu; ++i) {
    Matrix16c u;
    for (int r = 0; r < kStateComponents; ++r) {
      std::istringstream ss = next();
      for (int c = 0; c < kStateComponents; ++c) {
        double re = 0.0, im = 0.0;
        if (!(ss >> re >> im)) parse_fail(lineno, "short unitary row");
        u(r, c) = cplx(re, im);
      }
    }
    p.unitaries.push_back(u);
  }
  const long ng = std::stol(header("gates"));
  p.gates.reserve(static_cast<std::size_t>(ng));
  for (long i = 0; i < ng; ++i) {
    std::istringstream ss = next();
    std::string op;
    int target = 0;
    ss >> op >> target;
    std::string kv;
    int control = 0, pattern = 0, ref = 0;
    bool adj = false;
    double angle = 0.0;
    std::vector<int> controls;
    while (ss >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) parse_fail(lineno, "bad field '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      if (key == "c") {
        controls = split_ints(val);
        if (!controls.empty()) control = controls.front();
      } else if (key == "angle") {
        angle = std::stod(val);
      } else if (key == "pattern") {
        pattern = std::stoi(val);
      } else if (key == "ref") {
        ref = std::stoi(val);
      } else if (key == "adj") {
        adj = val == "1";
      } else {
        parse_fail(lineno, "unknown field '" + key + "'");
      }
    }
    if (op == "H") {
      p.gates.emplace_back(Hadamard{target});
    } else if (op == "S" || op == "SDG") {
      p.gates.emplace_back(PhaseS{target, op == "SDG"});
    } else if (op == "CX") {
      p.gates.emplace_back(Cnot{control, target});
    } else if (op == "MCRZ") {
      p.gates.emplace_back(MultiControlledRz{angle, controls, target});
    } else if (op == "PCRZ") {
      p.gates.emplace_back(PatternControlledRz{angle, pattern, controls, target});
    } else if (op == "U4") {
      p.gates.emplace_back(FourQubitUnitary{ref, adj});
    } else {
      parse_fail(lineno, "unknown gate '" + op + "'");
    }
  }
  return p;
}

GateProgram read_program(std::istream& is) {
  int lineno = 0;
  try {
    return parse_program(is, lineno);
  } catch (const std::invalid_argument&) {
    parse_fail(lineno, "malformed number");
  } catch (const std::out_of_range&) {
    parse_fail(lineno, "number out of range");
  }
}

std::string to_text(const GateProgram& program) {
  std::ostringstream os;
  write_program(os, program);
  return os.str();
}

GateProgram from_text(const std::string& text) {
  std::istringstream is(text);
  return read_program(is);
}

}  // namespace elastoq
