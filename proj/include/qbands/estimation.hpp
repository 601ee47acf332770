#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qbands/backend.hpp"
#include "qbands/mitigation.hpp"
#include "qbands/pauli.hpp"

namespace qbands {

struct MitigationConfig {
  bool readout = true;
  std::uint64_t calibration_shots = 8096;
  bool zne = true;
  ZneSchedule schedule;

  void validate() const;
};

/// Measurement bookkeeping: commuting groups read and circuits executed.
struct MeasurementTally {
  std::size_t groups = 0;
  std::size_t circuits = 0;
};

/// Turns circuits plus observables into numbers under one backend tier. On the
/// calibrated tier every group distribution goes through readout inversion and
/// every energy through zero-noise extrapolation of the folded circuit.
/// Immutable after construction; the RNG is always the caller's.
class Estimator {
 public:
  Estimator(Backend backend, int n_qubits, std::uint64_t shots, MitigationConfig mitigation = {},
            std::uint64_t calibration_seed = 0);

  const Backend& backend() const { return backend_; }
  Tier tier() const { return backend_.tier(); }
  int n_qubits() const { return n_; }
  std::uint64_t shots() const { return shots_; }
  const MitigationConfig& mitigation() const { return mitigation_; }
  const std::optional<CalibrationMatrix>& calibration() const { return calibration_; }

  /// Σ a_i ⟨P_i⟩ after `prep`, one measurement ensemble per group.
  double energy(const Circuit& prep, const PauliSum& h, const CommutingPartition& groups, Rng& rng,
                MeasurementTally* tally = nullptr) const;
  double energy(const Circuit& prep, const PauliSum& h, Rng& rng, MeasurementTally* tally = nullptr) const;

  /// ⟨Ω₀⟩ after `c`: the probability of reading 0…0, one diagonal group.
  double overlap(const Circuit& c, Rng& rng, MeasurementTally* tally = nullptr) const;

  /// Outcome distribution of a measurement circuit at one noise scale: exact
  /// on the statevector tier, frequencies otherwise, readout-mitigated on the
  /// calibrated tier.
  std::vector<double> distribution(const Circuit& c, Rng& rng) const;

  /// Standard error of energy() from the sample variance of the per-shot
  /// group values, one fresh ensemble per group. Raw counts, no mitigation;
  /// zero on the statevector tier.
  double measured_sigma(const Circuit& prep, const PauliSum& h, const CommutingPartition& groups, Rng& rng) const;

 private:
  std::vector<int> scales() const;

  Backend backend_;
  int n_;
  std::uint64_t shots_;
  MitigationConfig mitigation_;
  std::optional<CalibrationMatrix> calibration_;
};

/// Standard deviation of the sampled energy estimator with `shots` per group,
/// from the exact per-group outcome distributions of `prep`.
double shot_noise_sigma(const Circuit& prep, const PauliSum& h, const CommutingPartition& groups,
                        std::uint64_t shots);

}  // namespace qbands
