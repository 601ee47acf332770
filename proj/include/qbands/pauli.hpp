#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qbands/linalg.hpp"

namespace qbands {

/// Tensor product of I/X/Y/Z letters, qubit 0 leftmost. Qubit q maps to bit
/// (n - 1 - q) of a basis-state index, so bitstrings read left to right.
class PauliWord {
 public:
  PauliWord() = default;
  explicit PauliWord(std::string letters);
  static PauliWord identity(std::size_t n) { return PauliWord(std::string(n, 'I')); }

  std::size_t size() const { return letters_.size(); }
  char operator[](std::size_t q) const { return letters_[q]; }
  const std::string& str() const { return letters_; }
  bool is_identity() const;
  bool is_diagonal() const;  // only I and Z

  /// Basis-index masks: bits flipped by the word (X, Y) and bits carrying a
  /// sign (Z, Y).
  std::uint64_t x_mask() const;
  std::uint64_t z_mask() const;
  int num_y() const;

  /// Same word with a letter replaced.
  PauliWord with(std::size_t q, char letter) const;

  friend bool operator==(const PauliWord&, const PauliWord&) = default;
  friend auto operator<=>(const PauliWord&, const PauliWord&) = default;

 private:
  std::string letters_;
};

/// Letters agree or at least one is I at every index.
bool qubitwise_commutes(const PauliWord& a, const PauliWord& b);

struct PauliTerm {
  double coeff = 0.0;
  PauliWord word;
};

/// Real-weighted sum of Pauli words. Duplicate words are merged (first
/// occurrence keeps its position) and |coeff| < 1e-14 is dropped.
class PauliSum {
 public:
  static constexpr double kPruneThreshold = 1e-14;

  explicit PauliSum(std::size_t n_qubits, const std::vector<PauliTerm>& terms = {});

  std::size_t n_qubits() const { return n_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  const PauliTerm& operator[](std::size_t i) const { return terms_[i]; }

  /// Coefficient of the identity word (0 when absent).
  double identity_coeff() const;

  PauliSum scaled(double s) const;
  PauliSum plus_identity(double shift) const;

  std::string to_string() const;

 private:
  std::size_t n_;
  std::vector<PauliTerm> terms_;
};

/// Ordered groups of term indices; words within a group commute qubit-wise.
struct CommutingPartition {
  std::vector<std::vector<std::size_t>> groups;
  std::size_t size() const { return groups.size(); }
};

/// Single-excitation image of an M×M Hermitian matrix on M qubits:
/// (H_αα/2)(I − Z_α), (Re H_αβ/2)(X_αX_β + Y_αY_β), (Im H_αβ/2)(Y_αX_β − X_αY_β).
/// Terms are emitted as identity, Z's, then the XX, YY, YX, XY families.
PauliSum map_hamiltonian(const HermitianMatrix& h);

/// Greedy first-fit grouping in term order.
CommutingPartition partition(const PauliSum& sum);

/// Letter each qubit must be measured in for a qubit-wise commuting set of
/// words ('I' where no word acts). Throws if the words do not commute qubit-wise.
PauliWord measurement_basis(const std::vector<PauliWord>& words);

/// All 2^n I/Z words with weight 2^-n: the projector onto |0…0⟩.
PauliSum omega0(std::size_t n_qubits);

/// Restriction of the sum to the Hamming-weight-1 states |e_0⟩…|e_{n−1}⟩,
/// where |e_a⟩ has only qubit a set. Inverse of map_hamiltonian.
HermitianMatrix excitation_block(const PauliSum& sum);

/// Dense 2^n × 2^n matrix of the sum (n ≤ 12).
CMatrix matrix_of(const PauliSum& sum);
CMatrix matrix_of(const PauliWord& word);

}  // namespace qbands
