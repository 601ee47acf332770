#include "qbands/estimation.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qbands {

void MitigationConfig::validate() const {
  if (readout && calibration_shots == 0) throw std::invalid_argument("calibration_shots must be positive");
  if (zne) schedule.validate();
}

Estimator::Estimator(Backend backend, int n_qubits, std::uint64_t shots, MitigationConfig mitigation,
                     std::uint64_t calibration_seed)
    : backend_(std::move(backend)), n_(n_qubits), shots_(shots), mitigation_(std::move(mitigation)) {
  if (n_qubits < 1) throw std::invalid_argument("estimator needs at least one qubit");
  if (tier() != Tier::statevector && shots == 0) throw std::invalid_argument("shots must be positive");
  if (tier() == Tier::calibrated) {
    mitigation_.validate();
    if (mitigation_.readout) {
      Rng rng(calibration_seed);
      calibration_ = measure_calibration(backend_, n_qubits, mitigation_.calibration_shots, rng);
    }
  }
}

std::vector<int> Estimator::scales() const {
  if (tier() == Tier::calibrated && mitigation_.zne) return mitigation_.schedule.scales;
  return {1};
}

std::vector<double> Estimator::distribution(const Circuit& c, Rng& rng) const {
  if (tier() == Tier::statevector) return backend_.run_statevector(c).probabilities();
  const Counts counts = backend_.measure(c, shots_, rng);
  if (calibration_) return mitigate_counts(counts, *calibration_);
  return counts.frequencies();
}

double Estimator::energy(const Circuit& prep, const PauliSum& h, Rng& rng, MeasurementTally* tally) const {
  return energy(prep, h, partition(h), rng, tally);
}

double Estimator::energy(const Circuit& prep, const PauliSum& h, const CommutingPartition& groups, Rng& rng,
                         MeasurementTally* tally) const {
  if (prep.n_qubits() != static_cast<int>(h.n_qubits()))
    throw std::invalid_argument("circuit width does not match Hamiltonian");
  if (tally) tally->groups += groups.size();

  if (tier() == Tier::statevector) {
    const StateVector psi = backend_.run_statevector(prep);
    if (tally) ++tally->circuits;
    double e = 0.0;
    for (const auto& g : groups.groups)
      for (std::size_t i : g) e += h[i].coeff * psi.expectation(h[i].word);
    return e;
  }

  std::map<int, double> at_scale;
  for (int scale : scales()) {
    double e = 0.0;
    for (const auto& g : groups.groups) {
      std::vector<PauliWord> words;
      bool trivial = true;
      for (std::size_t i : g) {
        words.push_back(h[i].word);
        trivial = trivial && h[i].word.is_identity();
      }
      if (trivial) {
        for (std::size_t i : g) e += h[i].coeff;
        continue;
      }
      const PauliWord basis = measurement_basis(words);
      const Circuit circuit = fold_circuit(compose(prep, basis_rotation(basis)), scale);
      const auto dist = distribution(circuit, rng);
      if (tally) ++tally->circuits;
      for (std::size_t i : g) e += h[i].coeff * diagonal_expectation(rotated_word(h[i].word), dist);
    }
    at_scale[scale] = e;
  }
  return at_scale.size() == 1 ? at_scale.begin()->second : zne_expectation(at_scale);
}

double Estimator::overlap(const Circuit& c, Rng& rng, MeasurementTally* tally) const {
  if (tally) ++tally->groups;
  if (tier() == Tier::statevector) {
    if (tally) ++tally->circuits;
    return std::norm(backend_.run_statevector(c)[0]);
  }
  std::map<int, double> at_scale;
  for (int scale : scales()) {
    at_scale[scale] = distribution(fold_circuit(c, scale), rng)[0];
    if (tally) ++tally->circuits;
  }
  return at_scale.size() == 1 ? at_scale.begin()->second : zne_expectation(at_scale);
}

double Estimator::measured_sigma(const Circuit& prep, const PauliSum& h, const CommutingPartition& groups,
                                 Rng& rng) const {
  if (tier() == Tier::statevector) return 0.0;
  double variance = 0.0;
  for (const auto& g : groups.groups) {
    std::vector<PauliWord> words;
    for (std::size_t i : g) words.push_back(h[i].word);
    const Counts counts = backend_.measure(compose(prep, basis_rotation(measurement_basis(words))), shots_, rng);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& [b, n] : counts.histogram) {
      double x = 0.0;
      for (std::size_t i : g) x += h[i].coeff * diagonal_eigenvalue(rotated_word(h[i].word), b);
      sum += static_cast<double>(n) * x;
      sum2 += static_cast<double>(n) * x * x;
    }
    const double s = static_cast<double>(counts.shots);
    if (s < 2) continue;
    const double mean = sum / s;
    variance += std::max(sum2 - s * mean * mean, 0.0) / (s - 1.0) / s;
  }
  return std::sqrt(variance);
}

double shot_noise_sigma(const Circuit& prep, const PauliSum& h, const CommutingPartition& groups,
                        std::uint64_t shots) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  const Backend exact;
  double variance = 0.0;
  for (const auto& g : groups.groups) {
    std::vector<PauliWord> words;
    for (std::size_t i : g) words.push_back(h[i].word);
    const Circuit circuit = compose(prep, basis_rotation(measurement_basis(words)));
    const auto dist = exact.run_statevector(circuit).probabilities();
    // Per-shot group value X(b) = Σ a_i λ_i(b).
    double mean = 0.0, second = 0.0;
    for (std::size_t b = 0; b < dist.size(); ++b) {
      if (dist[b] == 0.0) continue;
      double x = 0.0;
      for (std::size_t i : g) x += h[i].coeff * diagonal_eigenvalue(rotated_word(h[i].word), b);
      mean += dist[b] * x;
      second += dist[b] * x * x;
    }
    variance += std::max(second - mean * mean, 0.0) / static_cast<double>(shots);
  }
  return std::sqrt(variance);
}

}  // namespace qbands
