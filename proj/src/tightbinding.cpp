#include "qbands/tightbinding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace qbands {

namespace {

constexpr double kDeltaQuantum = 1e-9;  // Å; displacements closer than this are the same
constexpr double kAmplitudeTol = 1e-12;

using HopKey = std::tuple<std::size_t, std::size_t, long long, long long, long long>;

HopKey key_of(std::size_t a, std::size_t b, const Vec3& d) {
  auto q = [](double x) { return static_cast<long long>(std::llround(x / kDeltaQuantum)); };
  return {a, b, q(d[0]), q(d[1]), q(d[2])};
}

bool is_onsite(const Hopping& h) { return h.alpha == h.beta && norm(h.delta) < kDeltaQuantum; }

std::string describe(const TightBindingModel& m, const Hopping& h) {
  std::ostringstream os;
  os << "orbital pair (" << m.orbitals()[h.alpha].label << ", " << m.orbitals()[h.beta].label << ") at delta ("
     << h.delta[0] << ", " << h.delta[1] << ", " << h.delta[2] << ")";
  return os.str();
}

bool self_adjoint(const std::vector<Hopping>& hops) {
  std::map<HopKey, cplx> index;
  for (const auto& h : hops) index.emplace(key_of(h.alpha, h.beta, h.delta), h.t);
  for (const auto& h : hops) {
    auto it = index.find(key_of(h.beta, h.alpha, -h.delta));
    if (it == index.end() || std::abs(it->second - std::conj(h.t)) > kAmplitudeTol) return false;
  }
  return true;
}

}  // namespace

TightBindingModel::TightBindingModel(std::array<Vec3, 3> lattice_vectors, std::vector<Orbital> orbitals,
                                     std::vector<Hopping> hoppings, std::string name)
    : lattice_(lattice_vectors), orbitals_(std::move(orbitals)), hoppings_(std::move(hoppings)), name_(std::move(name)) {
  if (orbitals_.empty()) throw std::invalid_argument("tight-binding model needs at least one orbital");
  for (const auto& h : hoppings_) {
    if (h.alpha >= orbitals_.size() || h.beta >= orbitals_.size())
      throw std::invalid_argument("hopping references orbital index out of range");
    if (!std::isfinite(h.t.real()) || !std::isfinite(h.t.imag()))
      throw std::invalid_argument("hopping amplitude is not finite");
  }
  closed_ = self_adjoint(hoppings_);
}

std::array<Vec3, 3> TightBindingModel::reciprocal_vectors() const {
  const auto& [a1, a2, a3] = lattice_;
  auto cross = [](const Vec3& x, const Vec3& y) -> Vec3 {
    return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
  };
  const double volume = dot(a1, cross(a2, a3));
  if (std::abs(volume) < 1e-12) throw std::invalid_argument("lattice vectors are linearly dependent");
  const double f = 2.0 * std::numbers::pi / volume;
  return {f * cross(a2, a3), f * cross(a3, a1), f * cross(a1, a2)};
}

bool TightBindingModel::is_closed() const { return closed_; }

TightBindingModel close_hermitian(const TightBindingModel& model) {
  std::vector<Hopping> out;
  std::map<HopKey, std::size_t> index;

  auto insert = [&](const Hopping& h) {
    auto [it, fresh] = index.emplace(key_of(h.alpha, h.beta, h.delta), out.size());
    if (fresh) {
      out.push_back(h);
      return;
    }
    if (std::abs(out[it->second].t - h.t) > kAmplitudeTol)
      throw std::invalid_argument("conflicting hopping amplitudes for " + describe(model, h));
  };

  for (const auto& h : model.hoppings()) {
    if (is_onsite(h) && std::abs(h.t.imag()) > kAmplitudeTol)
      throw std::invalid_argument("onsite energy must be real for " + describe(model, h));
    insert(h);
  }
  const std::size_t given = out.size();
  for (std::size_t i = 0; i < given; ++i) {
    const Hopping partner{out[i].beta, out[i].alpha, -out[i].delta, std::conj(out[i].t)};
    insert(partner);
  }
  return TightBindingModel(model.lattice_vectors(), model.orbitals(), std::move(out), model.name());
}

HermitianMatrix bloch_matrix(const TightBindingModel& model, const Vec3& k) {
  if (!model.is_closed()) throw std::invalid_argument("bloch_matrix: model is not Hermitian-closed");
  const std::size_t m = model.num_orbitals();
  CMatrix h(m, m);
  for (const auto& hop : model.hoppings()) h(hop.alpha, hop.beta) += hop.t * std::polar(1.0, dot(k, hop.delta));
  return HermitianMatrix(std::move(h));
}

KPath resolve_kpath(const std::vector<KAnchor>& anchors, std::size_t points_per_segment) {
  if (anchors.size() < 2) throw std::invalid_argument("k-path needs at least two anchors");
  if (points_per_segment < 1) throw std::invalid_argument("points_per_segment must be positive");
  KPath path{anchors, points_per_segment, {}};
  double distance = 0.0;
  path.points.push_back({anchors.front().k, 0.0, anchors.front().label});
  for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
    const Vec3 a = anchors[s].k;
    const Vec3 b = anchors[s + 1].k;
    const double length = norm(b - a);
    if (length < 1e-12)
      throw std::invalid_argument("coincident consecutive k-path anchors " + anchors[s].label + " and " +
                                  anchors[s + 1].label);
    const double step = length / static_cast<double>(points_per_segment);
    for (std::size_t j = 1; j <= points_per_segment; ++j) {
      const double f = static_cast<double>(j) / static_cast<double>(points_per_segment);
      distance += step;
      KPoint p{a + f * (b - a), distance, std::nullopt};
      if (j == points_per_segment) {
        p.k = b;
        p.label = anchors[s + 1].label;
      }
      path.points.push_back(std::move(p));
    }
  }
  return path;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::exact:
      return "exact";
    case Provenance::optimized:
      return "optimized";
    case Provenance::qpe_refined:
      return "qpe-refined";
  }
  return "unknown";
}

namespace {
// Linear interpolation between order statistics (numpy's default).
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}
}  // namespace

TrialStats summarize(std::vector<double> samples) {
  TrialStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  double total = 0.0;
  for (double x : samples) total += x;
  s.mean = total / static_cast<double>(samples.size());
  s.median = quantile(samples, 0.5);
  s.q1 = quantile(samples, 0.25);
  s.q3 = quantile(samples, 0.75);
  return s;
}

BandTable exact_bands(const TightBindingModel& model, const KPath& path) {
  BandTable table;
  table.num_bands = model.num_orbitals();
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const auto& p = path.points[i];
    BandPoint bp;
    bp.k_index = i;
    bp.path_distance = p.distance;
    bp.k = p.k;
    bp.energies = eigvalsh(bloch_matrix(model, p.k));
    bp.provenance.assign(bp.energies.size(), Provenance::exact);
    table.points.push_back(std::move(bp));
  }
  return table;
}

TightBindingModel polonium_model(double a) {
  constexpr double eps_s = -14.0;
  constexpr double v_sp_sigma = 2.0;
  constexpr double v_pp_sigma = 2.0;
  const std::array<Vec3, 3> lattice{Vec3{a, 0, 0}, Vec3{0, a, 0}, Vec3{0, 0, a}};
  std::vector<Orbital> orbitals{{"s", {0, 0, 0}}, {"px", {0, 0, 0}}, {"py", {0, 0, 0}}, {"pz", {0, 0, 0}}};
  std::vector<Hopping> hops;
  hops.push_back({0, 0, {0, 0, 0}, eps_s});
  for (std::size_t d = 0; d < 3; ++d) {
    const std::size_t p = 1 + d;
    for (double sign : {1.0, -1.0}) {
      Vec3 delta{0, 0, 0};
      delta[d] = sign * a;
      // <s|H|p> carries the direction cosine of the s -> p bond, which is -delta.
      hops.push_back({0, p, delta, -sign * v_sp_sigma});
    }
    Vec3 delta{0, 0, 0};
    delta[d] = a;
    hops.push_back({p, p, delta, v_pp_sigma});
  }
  return close_hermitian(TightBindingModel(lattice, std::move(orbitals), std::move(hops), "polonium-sc"));
}

std::vector<KAnchor> simple_cubic_xmg(double a) {
  const double g = std::numbers::pi / a;
  return {{"X", {g, 0, 0}}, {"M", {g, g, 0}}, {"G", {0, 0, 0}}};
}

}  // namespace qbands
