#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbands/estimation.hpp"
#include "qbands/optimize.hpp"
#include "qbands/qpe.hpp"
#include "qbands/tightbinding.hpp"

namespace qbands {

struct RunConfig {
  Tier tier = Tier::statevector;
  std::uint64_t shots = 8096;  // per commuting group
  OptimizerConfig optimizer;
  std::size_t trials = 1;       // optimizations per level
  std::size_t beta_trials = 1;  // optimizations per extreme in calibrate_beta
  double beta_factor = 2.0;
  std::optional<NoiseDescriptor> noise;
  MitigationConfig mitigation;
  std::optional<QpeConfig> qpe;  // bits, tau, slices, shots; bounds come from calibrate_beta
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  /// Throws std::invalid_argument on inconsistent settings (for example a
  /// noisy tier without a noise block).
  void validate() const;
};

Backend make_backend(const RunConfig& config);

/// Estimator for an n-qubit problem under the run's tier; the calibration
/// stream derives from the master seed and `job`.
Estimator make_estimator(const RunConfig& config, int n_qubits, std::uint64_t job = 0);

struct FoundLevel {
  std::vector<double> theta;
  double energy = 0.0;
  Circuit inverse_prep;  // adjoint(V(θ)), appended after the ansatz for the overlap
};

/// Hamiltonian plus the β-weighted overlap penalties accumulated so far.
class DeflationState {
 public:
  DeflationState(PauliSum h, double beta);

  const PauliSum& hamiltonian() const { return h_; }
  const CommutingPartition& groups() const { return groups_; }
  double beta() const { return beta_; }
  const std::vector<FoundLevel>& levels() const { return levels_; }
  std::size_t num_qubits() const { return h_.n_qubits(); }

  void push(std::vector<double> theta, double energy);
  void push(const Circuit& prep, std::vector<double> theta, double energy);

 private:
  PauliSum h_;
  CommutingPartition groups_;
  double beta_;
  std::vector<FoundLevel> levels_;
};

/// ⟨H⟩ on the ansatz state plus β·⟨Ω₀⟩ after ansatz then adjoint(V_l) for each
/// found level.
double cost(std::span<const double> theta, const DeflationState& state, const Estimator& est, Rng& rng,
            MeasurementTally* tally = nullptr);
/// Same penalty sum, for an arbitrary preparation circuit.
double cost(const Circuit& prep, const DeflationState& state, const Estimator& est, Rng& rng,
            MeasurementTally* tally = nullptr);

struct BetaCalibration {
  double e_max = 0.0;
  double e_min = 0.0;
  double beta = 0.0;
  std::vector<double> theta_max;
  std::vector<double> theta_min;
  bool fallback = false;  // Δ ≤ 0 and β was set to 1 eV
};

/// Maximize then minimize the energy; β = beta_factor·(E_max − E_min), or 1 eV
/// for a flat spectrum. Extremes are re-evaluated at the optimizers' points.
BetaCalibration calibrate_beta(const PauliSum& h, const Estimator& est, const RunConfig& config, std::uint64_t seed);

struct TrialRecord {
  std::vector<double> theta;
  double cost = 0.0;    // optimizer's recorded best
  double energy = 0.0;  // base Hamiltonian at theta, penalties excluded
  std::size_t evaluations = 0;
  bool converged = false;
  std::optional<PhaseEstimate> refined;
};

struct LevelResult {
  std::vector<double> theta;  // best trial by recorded cost
  double energy = 0.0;        // base energy of the best trial
  std::vector<TrialRecord> trials;
  TrialStats stats;  // over trial energies
  std::optional<TrialStats> refined_stats;  // over refined trial energies
  std::size_t non_converged = 0;
};

struct KSolution {
  BetaCalibration beta;
  std::vector<LevelResult> levels;  // discovery order
  std::vector<std::string> warnings;
};

/// Sequential deflation: for each level, `trials` optimizations from random
/// starts, keep the lowest recorded cost and push it as a penalty.
KSolution solve_k(const PauliSum& h, const BetaCalibration& beta, const Estimator& est, const RunConfig& config,
                  std::uint64_t seed);

/// calibrate_beta followed by solve_k.
KSolution solve_k(const PauliSum& h, const Estimator& est, const RunConfig& config, std::uint64_t seed);

/// Runs phase estimation on every trial of every level of `sol`. Energy bounds
/// are the β-calibration extremes padded by the larger of 5% of their spread
/// and 0.5 eV on each side;
/// a k-point whose bounds fail to bracket the spectrum keeps its optimized
/// energies and gains a warning.
void refine_levels(KSolution& sol, const PauliSum& h, const QpeConfig& qpe, const Backend& backend,
                   std::uint64_t seed);

struct BandRun {
  BandTable table;
  std::vector<std::optional<KSolution>> solutions;  // empty where the k-point failed
};

/// Full pipeline along the path: Bloch matrix, mapping, β calibration,
/// deflation and optional QPE per k-point, run on `config.workers` threads.
/// Failures at a k-point become error rows.
BandRun band_structure(const TightBindingModel& model, const KPath& path, const RunConfig& config);

/// Per-k seed of the run: independent of the path length.
std::uint64_t kpoint_seed(std::uint64_t master, std::size_t k_index);

/// Turns per-k solutions into table rows (energies ascending, medians when
/// trials > 1, refined values when present).
BandPoint band_point(const KPoint& kp, std::size_t k_index, const KSolution& sol);

}  // namespace qbands
