#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qbands/backend.hpp"
#include "qbands/circuit.hpp"
#include "qbands/pauli.hpp"

namespace qbands {

struct QpeConfig {
  int bits = 8;
  double tau = 0.0;  // 1/eV; 0 selects 2π·0.9/(E_hi − E_lo)
  double slices_per_unit_time = 8.0;
  double e_lo = 0.0;  // eV
  double e_hi = 0.0;
  std::uint64_t shots_per_bit = 1024;

  void validate() const;  // bounds are checked separately, see rescale
  double evolution_time() const;
};

/// Phase-space image E' = scale·E + offset of the energy axis.
struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;

  double encode(double e) const { return scale * e + offset; }
  double decode(double e_mapped) const { return (e_mapped - offset) / scale; }
};

struct Rescaled {
  PauliSum h;
  AffineMap map;
  double tau = 0.0;
};

/// Maps [e_lo, e_hi] affinely onto [0.05, 0.95]·(2π/τ). Throws
/// std::invalid_argument when bounds are inverted or the single-excitation
/// spectrum of `h` falls outside [0, 2π/τ) after mapping.
Rescaled rescale(const PauliSum& h, double e_lo, double e_hi, double tau = 0.0);

struct PhaseEstimate {
  std::vector<int> bits;  // bits[j] is the coefficient of 2^-(j+1)
  double phase = 0.0;     // Σ bits[j] 2^-(j+1)
  double energy = 0.0;    // decoded, eV
  std::vector<double> confidence;  // majority fraction per bit, same order as bits
};

/// Iterative phase estimation of exp(i h τ) on the state prepared by `prep`,
/// least-significant bit first, with one ancilla (qubit 0) and a phase
/// correction from the bits already decided. Bits are majority votes over
/// shots_per_bit draws of the ancilla. `h` must already be rescaled; `map`
/// decodes the phase back to energy.
PhaseEstimate iterative_qpe(const Circuit& prep, const PauliSum& h, const AffineMap& map, double tau,
                            const QpeConfig& config, const Backend& backend, Rng& rng);

/// Convenience wrapper: rescale with the configured bounds, then estimate.
PhaseEstimate estimate_energy(const Circuit& prep, const PauliSum& h, const QpeConfig& config, const Backend& backend,
                              Rng& rng);

/// Runs phase estimation on the ansatz state build_ansatz(theta).
PhaseEstimate refine_level(std::span<const double> theta, const PauliSum& h, const QpeConfig& config,
                           const Backend& backend, Rng& rng);

/// Energy resolution of the decode grid: (e_hi − e_lo) / (0.9 · 2^bits) for the
/// default τ.
double grid_spacing(const QpeConfig& config);

/// Trotter slices used for evolution time t.
int trotter_slices(const QpeConfig& config, double t);

/// ‖U_trotter(t)|ψ⟩ − e^{iEt}|ψ⟩‖ for an eigenpair (ψ, E) of h.
double trotter_deviation(const PauliSum& h, const StateVector& eigenstate, double energy, double t, int slices);

/// Largest energy error the product formula can add to any bit's phase, from
/// the deviation of each controlled power: max_k deviation(t_k) / t_k.
double trotter_energy_bound(const PauliSum& h, const StateVector& eigenstate, double energy,
                            const QpeConfig& config);

}  // namespace qbands
