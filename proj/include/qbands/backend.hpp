#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbands/circuit.hpp"
#include "qbands/pauli.hpp"
#include "qbands/rng.hpp"

namespace qbands {

enum class Tier { statevector, sampling, noisy, calibrated };
const char* to_string(Tier t);
Tier parse_tier(const std::string& s);

/// 2^n amplitudes; qubit 0 is the most significant index bit.
class StateVector {
 public:
  explicit StateVector(int n_qubits);  // |0…0⟩
  StateVector(int n_qubits, std::vector<cplx> amplitudes);

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amp_.size(); }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }

  void apply(const Gate& g);
  void apply(const Circuit& c);
  void flip(int qubit);  // X without bookkeeping, used for noise

  double norm() const;
  std::vector<double> probabilities() const;
  /// ⟨ψ|P|ψ⟩ (real part; the imaginary part vanishes for Hermitian words).
  double expectation(const PauliWord& w) const;

 private:
  int n_;
  std::vector<cplx> amp_;
};

struct NoiseDescriptor {
  double gate_flip_prob = 0.001;     // X flip per touched qubit after every gate
  double readout_flip_prob = 0.02;   // classical bit flip per measured bit
  std::uint64_t seed = 0;

  void validate() const;
};

/// Measurement histogram keyed by basis-state index (bitstring read with
/// qubit 0 leftmost).
struct Counts {
  int n_qubits = 0;
  std::uint64_t shots = 0;
  std::map<std::uint64_t, std::uint64_t> histogram;

  std::uint64_t operator[](std::uint64_t index) const;
  std::string bitstring(std::uint64_t index) const;
  std::vector<double> frequencies() const;  // dense, length 2^n
  std::string to_json() const;
};

/// Evaluation context for circuits under one of the simulation tiers. Holds no
/// RNG: every stochastic call takes the caller's stream.
class Backend {
 public:
  explicit Backend(Tier tier = Tier::statevector, std::optional<NoiseDescriptor> noise = std::nullopt,
                   int max_qubits = 20);

  Tier tier() const { return tier_; }
  const std::optional<NoiseDescriptor>& noise() const { return noise_; }
  bool is_noisy() const { return tier_ == Tier::noisy || tier_ == Tier::calibrated; }

  StateVector run_statevector(const Circuit& c) const;

  /// Noiseless i.i.d. draws from |amplitude|².
  Counts sample(const Circuit& c, std::uint64_t shots, Rng& rng) const;
  Counts sample(const Circuit& c, std::uint64_t shots, std::uint64_t seed) const;

  /// Stochastic X-flip trajectories after each gate plus readout flips.
  Counts sample_noisy(const Circuit& c, std::uint64_t shots, const NoiseDescriptor& noise, Rng& rng) const;
  Counts sample_noisy(const Circuit& c, std::uint64_t shots, const NoiseDescriptor& noise, std::uint64_t seed) const;

  /// Counts under this backend's tier (noiseless for statevector/sampling).
  Counts measure(const Circuit& c, std::uint64_t shots, Rng& rng) const;

  /// Expectations of a qubit-wise commuting group from one basis-rotated
  /// ensemble (exact on the statevector tier). Throws if the group does not
  /// commute qubit-wise. The calibrated tier is handled by the estimator layer
  /// and behaves like the noisy tier here.
  std::vector<double> estimate_group(const Circuit& prep, const std::vector<PauliWord>& group, std::uint64_t shots,
                                     Rng& rng) const;

 private:
  Tier tier_;
  std::optional<NoiseDescriptor> noise_;
  int max_qubits_;
};

/// Σ a_i ⟨ψ|P_i|ψ⟩ without sampling.
double expval_exact(const StateVector& state, const PauliSum& sum);

/// ±1 eigenvalue of a diagonal (I/Z) word on a basis state: (−1)^{|index & mask|}.
double diagonal_eigenvalue(const PauliWord& diagonal_word, std::uint64_t index);

/// Expectation of I/Z words given a (quasi-)probability vector over outcomes.
double diagonal_expectation(const PauliWord& diagonal_word, std::span<const double> distribution);

/// The I/Z word a qubit-wise-rotated measurement reads for `word`.
PauliWord rotated_word(const PauliWord& word);

/// Multinomial draw of `shots` outcomes from `probs` via conditional binomials.
std::vector<std::uint64_t> multinomial(std::span<const double> probs, std::uint64_t shots, Rng& rng);

/// Apply independent per-bit flip probability p to a distribution in place.
void apply_readout_channel(std::vector<double>& probs, int n_qubits, double p);

}  // namespace qbands
