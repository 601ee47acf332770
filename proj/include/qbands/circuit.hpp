#pragma once

#include <string>
#include <vector>

#include "qbands/linalg.hpp"
#include "qbands/pauli.hpp"

namespace qbands {

enum class GateKind { X, H, S, Sdg, Rx, Ry, Rz, Phase, CNOT, GlobalPhase, Unitary1, Unitary2 };

const char* to_string(GateKind k);

/// One gate record: a 0-, 1- or 2-qubit base unitary on `targets`, applied only
/// where every qubit in `controls` is |1⟩. CNOT is X with one control;
/// GlobalPhase has no targets and multiplies by e^{i angle}.
///
/// Rotation convention: Rx/Ry/Rz(a) = exp(−i a σ/2), Phase(a) = diag(1, e^{ia}).
struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> targets;
  std::vector<int> controls;
  double angle = 0.0;
  CMatrix unitary;       // Unitary1 / Unitary2 only
  int param_index = -1;  // variational parameter feeding `angle`, if any

  static Gate x(int q) { return {GateKind::X, {q}}; }
  static Gate h(int q) { return {GateKind::H, {q}}; }
  static Gate s(int q) { return {GateKind::S, {q}}; }
  static Gate sdg(int q) { return {GateKind::Sdg, {q}}; }
  static Gate rx(int q, double a) { return {GateKind::Rx, {q}, {}, a}; }
  static Gate ry(int q, double a) { return {GateKind::Ry, {q}, {}, a}; }
  static Gate rz(int q, double a) { return {GateKind::Rz, {q}, {}, a}; }
  static Gate phase(int q, double a) { return {GateKind::Phase, {q}, {}, a}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, {target}, {control}}; }
  static Gate global_phase(double a) { return {GateKind::GlobalPhase, {}, {}, a}; }
  /// Explicit 2x2 (one target) or 4x4 (two targets) matrix; must be unitary within 1e-10.
  static Gate unitary_gate(std::vector<int> targets, CMatrix u);

  /// Base matrix on the targets, ignoring controls (1x1 for GlobalPhase).
  CMatrix base_matrix() const;
  Gate adjoint() const;
  std::vector<int> touched() const;  // controls then targets
  std::string to_string() const;
};

class Circuit {
 public:
  explicit Circuit(int n_qubits = 0);

  int n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  /// Validates targets/controls against the register.
  Circuit& append(Gate g);
  Circuit& append(const Circuit& other);

  /// Number of gates with at least one control (CNOT and controlled variants).
  std::size_t entangling_count() const;

  /// One gate per line.
  std::string dump() const;

  /// Dense unitary, n ≤ 10 (test support).
  CMatrix unitary() const;

 private:
  int n_;
  std::vector<Gate> gates_;
};

/// Reversed order with each gate inverted.
Circuit adjoint(const Circuit& c);

/// c1 followed by c2 on the same register.
Circuit compose(const Circuit& c1, const Circuit& c2);

/// Two-qubit particle-number-preserving gate A(θ, φ), seven elementary gates:
/// CNOT(a→b), Rz(−(φ+π)), Ry(−(θ+π/2)), CNOT(b→a), Ry(θ+π/2), Rz(φ+π), CNOT(a→b).
/// Rotations act on qubit a.
Circuit a_gate(double theta, double phi, int n_qubits = 2, int a = 0, int b = 1);

/// Parameters (θ_1, φ_1, …, θ_{M−1}, φ_{M−1}) for an M-qubit chain.
class AnsatzSpec {
 public:
  AnsatzSpec(std::size_t num_qubits, std::vector<double> params);
  static std::size_t num_params(std::size_t num_qubits) { return num_qubits == 0 ? 0 : 2 * (num_qubits - 1); }

  std::size_t num_qubits() const { return m_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::size_t m_;
  std::vector<double> params_;
};

/// X on qubit 0, then A(θ_j, φ_j) on (j−1, j) for j = 1…M−1.
Circuit build_ansatz(const AnsatzSpec& spec);

/// Rotation taking each letter's eigenbasis to Z: X → H, Y → S†·H, I/Z → nothing.
Circuit basis_rotation(const PauliWord& word);

/// exp(i θ P) via basis rotation, CNOT parity ladder and Rz; identity words
/// become a global phase.
Circuit pauli_exponential(const PauliWord& word, double theta);

/// First-order product formula (Π_i exp(i a_i P_i τ/n))^n.
Circuit trotter_evolution(const PauliSum& h, double tau, int slices);

/// n+1-qubit circuit applying `c` when qubit 0 (the new control) is |1⟩.
/// Original qubit q moves to q + 1.
Circuit controlled(const Circuit& c);

/// Places `c` on qubits [offset, offset + c.n_qubits()) of an n_qubits register.
Circuit embed(const Circuit& c, int n_qubits, int offset);

}  // namespace qbands
