#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "elastoq/common.hpp"

namespace elastoq {

// Qubits are numbered 1..3n+4 from the most significant end: 1..4 are the
// state register, then the x, y and z blocks. Qubit q is bit (Q - q) of an
// amplitude index.

struct Hadamard {
  int target = 1;
};

/// S = diag(1, i), or S^dagger when `adjoint`.
struct PhaseS {
  int target = 1;
  bool adjoint = false;
};

struct Cnot {
  int control = 1;
  int target = 2;
};

/// RZ(angle) = diag(e^{-i angle/2}, e^{i angle/2}) on `target`, applied when
/// every control is |1>.
struct MultiControlledRz {
  double angle = 0.0;
  std::vector<int> controls;
  int target = 1;
};

/// RZ(angle) on `target`, applied when the state register holds `pattern`
/// (qubit 1 carries the most significant bit) and every extra control is |1>.
struct PatternControlledRz {
  double angle = 0.0;
  int pattern = 0;
  std::vector<int> extra_controls;
  int target = 1;
};

/// 16x16 unitary on the state register, stored by reference into the
/// program's unitary table.
struct FourQubitUnitary {
  int unitary_ref = 0;
  bool adjoint = false;
};

using Gate = std::variant<Hadamard, PhaseS, Cnot, MultiControlledRz,
                          PatternControlledRz, FourQubitUnitary>;

/// Every qubit touched by a gate, controls first.
std::vector<int> gate_qubits(const Gate& gate);

struct GateProgram {
  int qubits = kStateQubits;
  int n = 0;
  std::string scheme;
  double tau = 0.0;
  /// CNOT count from the closed-form accounting, not from the gate list.
  std::int64_t cnot_account = 0;
  std::vector<Gate> gates;
  std::vector<Matrix16c> unitaries;

  void append(const GateProgram& other);
};

/// Line-oriented text form; see docs/gate_format.md.
void write_program(std::ostream& os, const GateProgram& program);
GateProgram read_program(std::istream& is);
std::string to_text(const GateProgram& program);
GateProgram from_text(const std::string& text);

}  // namespace elastoq
