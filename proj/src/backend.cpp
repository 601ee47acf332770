#include "qbands/backend.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qbands {

const char* to_string(Tier t) {
  switch (t) {
    case Tier::statevector: return "statevector";
    case Tier::sampling: return "sampling";
    case Tier::noisy: return "noisy";
    case Tier::calibrated: return "calibrated";
  }
  return "?";
}

Tier parse_tier(const std::string& s) {
  if (s == "statevector") return Tier::statevector;
  if (s == "sampling") return Tier::sampling;
  if (s == "noisy") return Tier::noisy;
  if (s == "calibrated") return Tier::calibrated;
  throw std::invalid_argument("unknown backend tier '" + s + "' (expected statevector, sampling, noisy, calibrated)");
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) throw std::invalid_argument("statevector qubit count out of range");
  amp_.assign(std::size_t{1} << n_qubits, cplx{});
  amp_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes) : n_(n_qubits), amp_(std::move(amplitudes)) {
  if (n_qubits < 0 || n_qubits > 30 || amp_.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("amplitude count does not match 2^n");
  if (std::abs(norm() - 1.0) > 1e-10) throw std::invalid_argument("statevector is not normalized");
}

void StateVector::apply(const Gate& g) {
  const std::size_t dim = amp_.size();
  auto bit = [this](int q) { return std::size_t{1} << (n_ - 1 - q); };
  std::size_t cmask = 0;
  for (int c : g.controls) cmask |= bit(c);

  if (g.targets.empty()) {
    const cplx ph = std::polar(1.0, g.angle);
    for (std::size_t i = 0; i < dim; ++i)
      if ((i & cmask) == cmask) amp_[i] *= ph;
    return;
  }

  const CMatrix u = g.base_matrix();
  if (g.targets.size() == 1) {
    const std::size_t tb = bit(g.targets[0]);
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & tb) || (i & cmask) != cmask) continue;
      const std::size_t j = i | tb;
      const cplx a = amp_[i], b = amp_[j];
      amp_[i] = u00 * a + u01 * b;
      amp_[j] = u10 * a + u11 * b;
    }
    return;
  }

  const std::size_t b0 = bit(g.targets[0]);
  const std::size_t b1 = bit(g.targets[1]);
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & b0) || (i & b1) || (i & cmask) != cmask) continue;
    const std::size_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
    cplx in[4];
    for (int k = 0; k < 4; ++k) in[k] = amp_[idx[k]];
    for (int r = 0; r < 4; ++r) {
      cplx acc{};
      for (int k = 0; k < 4; ++k) acc += u(r, k) * in[k];
      amp_[idx[r]] = acc;
    }
  }
}

void StateVector::apply(const Circuit& c) {
  if (c.n_qubits() != n_) throw std::invalid_argument("circuit width does not match statevector");
  for (const auto& g : c.gates()) apply(g);
}

void StateVector::flip(int qubit) {
  const std::size_t b = std::size_t{1} << (n_ - 1 - qubit);
  for (std::size_t i = 0; i < amp_.size(); ++i)
    if (!(i & b)) std::swap(amp_[i], amp_[i | b]);
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amp_.size());
  for (std::size_t i = 0; i < amp_.size(); ++i) p[i] = std::norm(amp_[i]);
  return p;
}

double StateVector::expectation(const PauliWord& w) const {
  if (static_cast<int>(w.size()) != n_) throw std::invalid_argument("word length does not match statevector");
  const std::uint64_t xm = w.x_mask();
  const std::uint64_t zm = w.z_mask();
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx yphase = ipow[w.num_y() % 4];
  cplx acc{};
  for (std::uint64_t b = 0; b < amp_.size(); ++b) {
    const double sign = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
    acc += std::conj(amp_[b ^ xm]) * sign * amp_[b];
  }
  return (yphase * acc).real();
}

double expval_exact(const StateVector& state, const PauliSum& sum) {
  double e = 0.0;
  for (const auto& t : sum.terms()) e += t.coeff * (t.word.is_identity() ? 1.0 : state.expectation(t.word));
  return e;
}

// ---------------------------------------------------------------------------
// Noise and counts

void NoiseDescriptor::validate() const {
  auto ok = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (!ok(gate_flip_prob)) throw std::invalid_argument("gate_flip_prob must lie in [0, 1]");
  if (!ok(readout_flip_prob)) throw std::invalid_argument("readout_flip_prob must lie in [0, 1]");
}

std::uint64_t Counts::operator[](std::uint64_t index) const {
  auto it = histogram.find(index);
  return it == histogram.end() ? 0 : it->second;
}

std::string Counts::bitstring(std::uint64_t index) const {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if (index >> (n_qubits - 1 - q) & 1U) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

std::vector<double> Counts::frequencies() const {
  std::vector<double> f(std::size_t{1} << n_qubits, 0.0);
  if (shots == 0) return f;
  for (const auto& [idx, c] : histogram) f[idx] = static_cast<double>(c) / static_cast<double>(shots);
  return f;
}

std::string Counts::to_json() const {
  nlohmann::ordered_json j;
  j["n_qubits"] = n_qubits;
  j["shots"] = shots;
  nlohmann::ordered_json h = nlohmann::ordered_json::object();
  for (const auto& [idx, c] : histogram) h[bitstring(idx)] = c;
  j["counts"] = h;
  return j.dump(2);
}

std::vector<std::uint64_t> multinomial(std::span<const double> probs, std::uint64_t shots, Rng& rng) {
  std::vector<std::uint64_t> out(probs.size(), 0);
  double mass = 0.0;
  for (double p : probs) mass += std::max(p, 0.0);
  std::uint64_t remaining = shots;
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    const double p = std::max(probs[i], 0.0);
    if (p <= 0.0) continue;
    const double cond = mass > 0.0 ? std::min(p / mass, 1.0) : 1.0;
    std::uint64_t c;
    if (cond >= 1.0) {
      c = remaining;
    } else {
      std::binomial_distribution<long long> bin(static_cast<long long>(remaining), cond);
      c = static_cast<std::uint64_t>(bin(rng));
    }
    out[i] = c;
    remaining -= c;
    mass -= p;
  }
  // Any rounding leftovers go to the most probable outcome.
  if (remaining > 0 && !probs.empty()) {
    const auto it = std::max_element(probs.begin(), probs.end());
    out[static_cast<std::size_t>(it - probs.begin())] += remaining;
  }
  return out;
}

void apply_readout_channel(std::vector<double>& probs, int n_qubits, double p) {
  if (p <= 0.0) return;
  for (int q = 0; q < n_qubits; ++q) {
    const std::size_t b = std::size_t{1} << (n_qubits - 1 - q);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (i & b) continue;
      const double a0 = probs[i], a1 = probs[i | b];
      probs[i] = (1.0 - p) * a0 + p * a1;
      probs[i | b] = p * a0 + (1.0 - p) * a1;
    }
  }
}

double diagonal_eigenvalue(const PauliWord& w, std::uint64_t index) {
  return (std::popcount(index & w.z_mask()) & 1) ? -1.0 : 1.0;
}

double diagonal_expectation(const PauliWord& w, std::span<const double> distribution) {
  const std::uint64_t zm = w.z_mask();
  double e = 0.0;
  for (std::uint64_t i = 0; i < distribution.size(); ++i)
    e += ((std::popcount(i & zm) & 1) ? -1.0 : 1.0) * distribution[i];
  return e;
}

PauliWord rotated_word(const PauliWord& word) {
  std::string s = word.str();
  for (char& c : s)
    if (c != 'I') c = 'Z';
  return PauliWord(std::move(s));
}

namespace {
Counts to_counts(int n, std::uint64_t shots, const std::vector<std::uint64_t>& dense) {
  Counts c;
  c.n_qubits = n;
  c.shots = shots;
  for (std::uint64_t i = 0; i < dense.size(); ++i)
    if (dense[i] > 0) c.histogram[i] = dense[i];
  return c;
}
}  // namespace

// ---------------------------------------------------------------------------
// Backend

Backend::Backend(Tier tier, std::optional<NoiseDescriptor> noise, int max_qubits)
    : tier_(tier), noise_(noise), max_qubits_(max_qubits) {
  if ((tier == Tier::noisy || tier == Tier::calibrated) && !noise_)
    throw std::invalid_argument(std::string("tier '") + to_string(tier) + "' requires a noise descriptor");
  if (noise_) noise_->validate();
}

StateVector Backend::run_statevector(const Circuit& c) const {
  if (c.n_qubits() > max_qubits_)
    throw std::invalid_argument("circuit has " + std::to_string(c.n_qubits()) + " qubits, backend cap is " +
                                std::to_string(max_qubits_));
  StateVector s(c.n_qubits());
  s.apply(c);
  return s;
}

Counts Backend::sample(const Circuit& c, std::uint64_t shots, Rng& rng) const {
  if (shots < 1) throw std::invalid_argument("sample needs at least one shot");
  const auto probs = run_statevector(c).probabilities();
  return to_counts(c.n_qubits(), shots, multinomial(probs, shots, rng));
}

Counts Backend::sample(const Circuit& c, std::uint64_t shots, std::uint64_t seed) const {
  Rng rng(seed);
  return sample(c, shots, rng);
}

Counts Backend::sample_noisy(const Circuit& c, std::uint64_t shots, const NoiseDescriptor& noise, Rng& rng) const {
  if (shots < 1) throw std::invalid_argument("sample needs at least one shot");
  noise.validate();
  if (c.n_qubits() > max_qubits_) throw std::invalid_argument("circuit exceeds backend qubit cap");

  // Flip locations: (gate index, qubit) for every qubit each gate touches.
  std::vector<std::pair<std::uint32_t, int>> locations;
  for (std::uint32_t g = 0; g < c.gates().size(); ++g)
    for (int q : c.gates()[g].touched()) locations.emplace_back(g, q);

  // Draw flipped cells of the shots × locations Bernoulli grid by geometric
  // skipping; shots sharing an error pattern share one trajectory.
  std::map<std::uint64_t, std::vector<std::uint32_t>> shot_errors;
  const double pg = noise.gate_flip_prob;
  const std::uint64_t cells = shots * locations.size();
  if (pg > 0.0 && cells > 0) {
    if (pg >= 1.0) {
      for (std::uint64_t s = 0; s < shots; ++s)
        for (std::uint32_t l = 0; l < locations.size(); ++l) shot_errors[s].push_back(l);
    } else {
      std::geometric_distribution<long long> skip(pg);
      std::uint64_t pos = static_cast<std::uint64_t>(skip(rng));
      while (pos < cells) {
        shot_errors[pos / locations.size()].push_back(static_cast<std::uint32_t>(pos % locations.size()));
        pos += 1 + static_cast<std::uint64_t>(skip(rng));
      }
    }
  }
  std::map<std::vector<std::uint32_t>, std::uint64_t> patterns;
  patterns[{}] = shots - shot_errors.size();
  for (auto& [shot, locs] : shot_errors) ++patterns[locs];

  const int n = c.n_qubits();
  std::vector<std::uint64_t> dense(std::size_t{1} << n, 0);
  for (const auto& [locs, count] : patterns) {
    if (count == 0) continue;
    StateVector s(n);
    std::size_t next = 0;
    for (std::uint32_t g = 0; g < c.gates().size(); ++g) {
      s.apply(c.gates()[g]);
      while (next < locs.size() && locations[locs[next]].first == g) s.flip(locations[locs[next++]].second);
    }
    auto probs = s.probabilities();
    apply_readout_channel(probs, n, noise.readout_flip_prob);
    const auto drawn = multinomial(probs, count, rng);
    for (std::size_t i = 0; i < dense.size(); ++i) dense[i] += drawn[i];
  }
  return to_counts(n, shots, dense);
}

Counts Backend::sample_noisy(const Circuit& c, std::uint64_t shots, const NoiseDescriptor& noise,
                             std::uint64_t seed) const {
  Rng rng(seed);
  return sample_noisy(c, shots, noise, rng);
}

Counts Backend::measure(const Circuit& c, std::uint64_t shots, Rng& rng) const {
  if (is_noisy()) return sample_noisy(c, shots, *noise_, rng);
  return sample(c, shots, rng);
}

std::vector<double> Backend::estimate_group(const Circuit& prep, const std::vector<PauliWord>& group,
                                            std::uint64_t shots, Rng& rng) const {
  const PauliWord basis = measurement_basis(group);
  if (static_cast<int>(basis.size()) != prep.n_qubits())
    throw std::invalid_argument("group word length does not match circuit width");
  const Circuit circuit = compose(prep, basis_rotation(basis));
  std::vector<double> dist;
  if (tier_ == Tier::statevector)
    dist = run_statevector(circuit).probabilities();
  else
    dist = measure(circuit, shots, rng).frequencies();
  std::vector<double> out;
  out.reserve(group.size());
  for (const auto& w : group) out.push_back(diagonal_expectation(rotated_word(w), dist));
  return out;
}

}  // namespace qbands
