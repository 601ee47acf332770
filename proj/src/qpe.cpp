#include "qbands/qpe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qbands {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLowGuard = 0.05;
constexpr double kSpan = 0.9;
}  // namespace

void QpeConfig::validate() const {
  if (bits < 1 || bits > 30) throw std::invalid_argument("qpe bits must lie in [1, 30]");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("qpe tau must be positive (or 0 for automatic)");
  if (!(slices_per_unit_time > 0.0)) throw std::invalid_argument("qpe slices_per_unit_time must be positive");
  if (shots_per_bit == 0) throw std::invalid_argument("qpe shots_per_bit must be positive");
}

double QpeConfig::evolution_time() const {
  if (tau > 0.0) return tau;
  if (!(e_hi > e_lo)) throw std::invalid_argument("qpe energy bounds need e_hi > e_lo");
  return kTwoPi * kSpan / (e_hi - e_lo);
}

Rescaled rescale(const PauliSum& h, double e_lo, double e_hi, double tau) {
  if (!(e_hi > e_lo) || !std::isfinite(e_lo) || !std::isfinite(e_hi))
    throw std::invalid_argument("rescale bounds need e_hi > e_lo");
  if (tau == 0.0) tau = kTwoPi * kSpan / (e_hi - e_lo);
  if (!(tau > 0.0)) throw std::invalid_argument("rescale needs tau > 0");
  const double period = kTwoPi / tau;
  AffineMap map;
  map.scale = kSpan * period / (e_hi - e_lo);
  map.offset = kLowGuard * period - map.scale * e_lo;

  for (double e : eigvalsh(excitation_block(h))) {
    const double mapped = map.encode(e);
    if (mapped < 0.0 || mapped >= period) {
      std::ostringstream os;
      os << "energy bounds [" << e_lo << ", " << e_hi << "] do not bracket the spectrum (eigenvalue " << e << ")";
      throw std::invalid_argument(os.str());
    }
  }
  return {h.scaled(map.scale).plus_identity(map.offset), map, tau};
}

int trotter_slices(const QpeConfig& config, double t) {
  return std::max(1, static_cast<int>(std::ceil(config.slices_per_unit_time * t - 1e-9)));
}

PhaseEstimate iterative_qpe(const Circuit& prep, const PauliSum& h, const AffineMap& map, double tau,
                            const QpeConfig& config, const Backend& backend, Rng& rng) {
  config.validate();
  const int m = prep.n_qubits();
  if (m != static_cast<int>(h.n_qubits())) throw std::invalid_argument("prep width does not match Hamiltonian");
  const int t = config.bits;
  const Circuit prep_on_system = embed(prep, m + 1, 1);

  PhaseEstimate est;
  est.bits.assign(static_cast<std::size_t>(t), 0);
  est.confidence.assign(static_cast<std::size_t>(t), 0.0);

  for (int k = t; k >= 1; --k) {
    // Feedback from the bits already fixed: ω = −2π Σ_{j>k} x_j 2^{−(j−k+1)}.
    double omega = 0.0;
    for (int j = k + 1; j <= t; ++j)
      if (est.bits[static_cast<std::size_t>(j - 1)]) omega -= kTwoPi * std::ldexp(1.0, -(j - k + 1));

    const double evolve = tau * std::ldexp(1.0, k - 1);
    Circuit c = prep_on_system;
    c.append(Gate::h(0));
    c.append(controlled(trotter_evolution(h, evolve, trotter_slices(config, evolve))));
    if (omega != 0.0) c.append(Gate::phase(0, omega));
    c.append(Gate::h(0));

    std::uint64_t ones = 0;
    const std::uint64_t shots = config.shots_per_bit;
    if (backend.tier() == Tier::statevector) {
      const auto probs = backend.run_statevector(c).probabilities();
      double p1 = 0.0;
      for (std::size_t b = probs.size() / 2; b < probs.size(); ++b) p1 += probs[b];
      std::binomial_distribution<std::uint64_t> draw(shots, std::clamp(p1, 0.0, 1.0));
      ones = draw(rng);
    } else {
      const Counts counts = backend.measure(c, shots, rng);
      const std::uint64_t ancilla = std::uint64_t{1} << m;
      for (const auto& [index, n] : counts.histogram)
        if (index & ancilla) ones += n;
    }
    const int bit = 2 * ones > shots ? 1 : 0;
    est.bits[static_cast<std::size_t>(k - 1)] = bit;
    const double frac = static_cast<double>(ones) / static_cast<double>(shots);
    est.confidence[static_cast<std::size_t>(k - 1)] = bit ? frac : 1.0 - frac;
  }

  for (int j = 0; j < t; ++j)
    if (est.bits[static_cast<std::size_t>(j)]) est.phase += std::ldexp(1.0, -(j + 1));
  est.energy = map.decode(kTwoPi * est.phase / tau);
  return est;
}

PhaseEstimate estimate_energy(const Circuit& prep, const PauliSum& h, const QpeConfig& config, const Backend& backend,
                              Rng& rng) {
  config.validate();
  const Rescaled r = rescale(h, config.e_lo, config.e_hi, config.tau);
  return iterative_qpe(prep, r.h, r.map, r.tau, config, backend, rng);
}

PhaseEstimate refine_level(std::span<const double> theta, const PauliSum& h, const QpeConfig& config,
                           const Backend& backend, Rng& rng) {
  const AnsatzSpec spec(h.n_qubits(), std::vector<double>(theta.begin(), theta.end()));
  return estimate_energy(build_ansatz(spec), h, config, backend, rng);
}

double grid_spacing(const QpeConfig& config) {
  const double tau = config.evolution_time();
  const double scale = kSpan * (kTwoPi / tau) / (config.e_hi - config.e_lo);
  return kTwoPi / (tau * scale) * std::ldexp(1.0, -config.bits);
}

double trotter_deviation(const PauliSum& h, const StateVector& eigenstate, double energy, double t, int slices) {
  StateVector evolved = eigenstate;
  evolved.apply(trotter_evolution(h, t, slices));
  const cplx phase = std::polar(1.0, energy * t);
  double d2 = 0.0;
  for (std::size_t i = 0; i < evolved.dim(); ++i) d2 += std::norm(evolved[i] - phase * eigenstate[i]);
  return std::sqrt(d2);
}

double trotter_energy_bound(const PauliSum& h, const StateVector& eigenstate, double energy,
                            const QpeConfig& config) {
  const Rescaled r = rescale(h, config.e_lo, config.e_hi, config.tau);
  const double e_mapped = r.map.encode(energy);
  double bound = 0.0;
  for (int k = 1; k <= config.bits; ++k) {
    const double t = r.tau * std::ldexp(1.0, k - 1);
    const double dev = trotter_deviation(r.h, eigenstate, e_mapped, t, trotter_slices(config, t));
    // Chord length to phase angle, then to energy in original units.
    const double angle = 2.0 * std::asin(std::min(1.0, dev / 2.0));
    bound = std::max(bound, angle / t / r.map.scale);
  }
  return bound;
}

}  // namespace qbands
