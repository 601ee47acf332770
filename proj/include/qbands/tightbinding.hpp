#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbands/linalg.hpp"

namespace qbands {

struct Orbital {
  std::string label;
  Vec3 position{};  // fractional coordinates in the unit cell
};

/// Hopping amplitude t_{αβ}^{(δ)} feeding Bloch-matrix entry (α, β).
/// delta = r_α − r_β, i.e. it points from the β site to the α site.
struct Hopping {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  Vec3 delta{};  // Cartesian displacement, Å
  cplx t{};      // eV
};

/// Periodic tight-binding model. Onsite energies are hoppings with
/// alpha == beta and delta == 0.
class TightBindingModel {
 public:
  TightBindingModel(std::array<Vec3, 3> lattice_vectors, std::vector<Orbital> orbitals, std::vector<Hopping> hoppings,
                    std::string name = {});

  const std::string& name() const { return name_; }
  std::size_t num_orbitals() const { return orbitals_.size(); }
  const std::array<Vec3, 3>& lattice_vectors() const { return lattice_; }
  const std::vector<Orbital>& orbitals() const { return orbitals_; }
  const std::vector<Hopping>& hoppings() const { return hoppings_; }

  /// Reciprocal lattice vectors b_i with a_i · b_j = 2π δ_ij.
  std::array<Vec3, 3> reciprocal_vectors() const;

  /// True iff every hopping has its adjoint partner in the set.
  bool is_closed() const;

 private:
  std::array<Vec3, 3> lattice_;
  std::vector<Orbital> orbitals_;
  std::vector<Hopping> hoppings_;
  std::string name_;
  bool closed_ = false;
};

/// Adds (β, α, −δ, t*) for every hopping lacking its partner and merges exact
/// duplicates. Throws std::invalid_argument naming the orbital pair when two
/// entries share (α, β, δ) but disagree on t, or when an onsite energy is complex.
TightBindingModel close_hermitian(const TightBindingModel& model);

/// H_{αβ}(k) = Σ_δ t_{αβ}^{(δ)} exp(i k·δ). Requires a closed model.
HermitianMatrix bloch_matrix(const TightBindingModel& model, const Vec3& k);

struct KAnchor {
  std::string label;
  Vec3 k{};  // Cartesian, 1/Å
};

struct KPoint {
  Vec3 k{};
  double distance = 0.0;           // cumulative path length
  std::optional<std::string> label;  // set on anchors
};

struct KPath {
  std::vector<KAnchor> anchors;
  std::size_t points_per_segment = 1;
  std::vector<KPoint> points;
};

/// Linear interpolation between consecutive anchors with `points_per_segment`
/// steps per segment (so points_per_segment - 1 interior points).
KPath resolve_kpath(const std::vector<KAnchor>& anchors, std::size_t points_per_segment);

enum class Provenance { exact, optimized, qpe_refined };
const char* to_string(Provenance p);

/// Summary over independent optimization trials of one band at one k.
struct TrialStats {
  std::size_t count = 0;
  double median = 0.0;
  double mean = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};
TrialStats summarize(std::vector<double> samples);

struct BandPoint {
  std::size_t k_index = 0;
  double path_distance = 0.0;
  Vec3 k{};
  std::vector<double> energies;        // ascending for exact tables
  std::vector<Provenance> provenance;  // one per energy
  std::vector<TrialStats> stats;       // empty unless trials were run
  std::optional<std::string> error;    // per-k failure; energies empty
};

struct BandTable {
  std::size_t num_bands = 0;
  std::vector<BandPoint> points;
};

/// Ascending eigenvalues of the Bloch matrix at every path point.
BandTable exact_bands(const TightBindingModel& model, const KPath& path);

/// Simple-cubic s + (px, py, pz) model: ε_s = -14 eV, ε_p = 0, 2 eV s–p
/// nearest-neighbour hopping with Slater-Koster sign, 2 eV σ hopping between
/// colinear p orbitals.
TightBindingModel polonium_model(double lattice_constant = 3.345);

/// X, M, Γ anchors of the simple-cubic Brillouin zone for lattice constant a.
std::vector<KAnchor> simple_cubic_xmg(double lattice_constant = 3.345);

}  // namespace qbands
