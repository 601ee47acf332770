#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qbands/qpe.hpp"
#include "qbands/tightbinding.hpp"

using namespace qbands;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Exact eigenvector of a Bloch image, embedded in the 2^M register.
StateVector embedded_eigenstate(const CMatrix& m, std::size_t band) {
  const auto vecs = oracle::eigenvectors(m);
  const std::size_t n = m.rows();
  std::vector<cplx> amps(std::size_t{1} << n, 0.0);
  for (std::size_t a = 0; a < n; ++a) amps[std::size_t{1} << (n - 1 - a)] = vecs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(band));
  return StateVector(static_cast<int>(n), amps);
}

QpeConfig bounded(double lo, double hi, int bits = 8) {
  QpeConfig c;
  c.bits = bits;
  c.e_lo = lo;
  c.e_hi = hi;
  return c;
}

}  // namespace

TEST(Rescale, BracketsSpectrumWithGuards) {
  CMatrix m(2, 2);
  m(0, 0) = -14;
  const auto r = rescale(map_hamiltonian(HermitianMatrix(m)), -14, 0);
  const double period = kTwoPi / r.tau;
  for (double e : eigvalsh(excitation_block(r.h))) {
    EXPECT_GE(e, 0.05 * period - 1e-12);
    EXPECT_LE(e, 0.95 * period + 1e-12);
  }
  EXPECT_NEAR(r.map.encode(-14), 0.05 * period, 1e-12);
  EXPECT_NEAR(r.map.encode(0), 0.95 * period, 1e-12);
}

TEST(Rescale, IdentityOnlySum) {
  const PauliSum h(1, {{1.5, PauliWord("I")}});
  const auto r = rescale(h, 1.0, 2.0);
  ASSERT_EQ(r.h.size(), 1u);
  EXPECT_NEAR(r.h[0].coeff, r.map.encode(1.5), 1e-12);
}

TEST(Rescale, DecodeInvertsEncode) {
  CMatrix m(1, 1);
  const auto r = rescale(map_hamiltonian(HermitianMatrix(m)), -3, 7);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 7);
  for (int i = 0; i < 100; ++i) {
    const double e = u(rng);
    EXPECT_NEAR(r.map.decode(r.map.encode(e)), e, 1e-12);
  }
}

TEST(Rescale, RejectsBoundsThatMissSpectrum) {
  CMatrix m(2, 2);
  m(0, 0) = -14;
  const auto h = map_hamiltonian(HermitianMatrix(m));
  EXPECT_THROW(rescale(h, 0, -14), std::invalid_argument);
  EXPECT_THROW(rescale(h, -5, 0), std::invalid_argument);
}

TEST(IterativeQpe, ZeroPhaseGivesZeroBits) {
  Rng rng(1);
  const auto est = iterative_qpe(Circuit(1), PauliSum(1, {}), AffineMap{}, 1.0, QpeConfig{}, Backend(), rng);
  for (int b : est.bits) EXPECT_EQ(b, 0);
  EXPECT_DOUBLE_EQ(est.phase, 0.0);
}

TEST(IterativeQpe, ExactThreeBitPhaseIsDeterministic) {
  // |0⟩ is an eigenstate of aI + bZ with eigenvalue a + b; choose it as 2π·0.101₂.
  const double target = 0.625;
  const PauliSum h(1, {{kTwoPi * target / 2, PauliWord("I")}, {kTwoPi * target / 2, PauliWord("Z")}});
  QpeConfig cfg;
  cfg.bits = 3;
  cfg.shots_per_bit = 64;
  for (Tier tier : {Tier::statevector, Tier::sampling}) {
    Rng rng(2);
    const auto est = iterative_qpe(Circuit(1), h, AffineMap{}, 1.0, cfg, Backend(tier), rng);
    EXPECT_EQ(est.bits, (std::vector<int>{1, 0, 1}));
    EXPECT_DOUBLE_EQ(est.phase, target);
    EXPECT_NEAR(est.energy, kTwoPi * target, 1e-12);
    for (double c : est.confidence) EXPECT_NEAR(c, 1.0, 1e-12);
  }
}

TEST(IterativeQpe, RandomExactPhasesOnTwoQubits) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> frac(0, 63);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = frac(rng);
    const double phi = k / 64.0;
    // Diagonal two-qubit operator with |01⟩ carrying phase φ; Trotter is exact for commuting terms.
    const double e = kTwoPi * phi;
    const PauliSum h(2, {{e / 2, PauliWord("II")}, {-e / 2, PauliWord("IZ")}});
    Circuit prep(2);
    prep.append(Gate::x(1));
    QpeConfig cfg;
    cfg.bits = 6;
    Rng r(static_cast<std::uint64_t>(trial));
    const auto est = iterative_qpe(prep, h, AffineMap{}, 1.0, cfg, Backend(), r);
    EXPECT_DOUBLE_EQ(est.phase, phi);
  }
}

TEST(IterativeQpe, OneBitResolvesHalfInterval) {
  const PauliSum h(1, {{kTwoPi * 0.3, PauliWord("I")}});
  QpeConfig cfg;
  cfg.bits = 1;
  Rng rng(4);
  const auto est = iterative_qpe(Circuit(1), h, AffineMap{}, 1.0, cfg, Backend(), rng);
  EXPECT_TRUE(est.phase == 0.0 || est.phase == 0.5);
  EXPECT_DOUBLE_EQ(est.phase, 0.5);
}

TEST(RefineLevel, PoloniumEigenstatesWithinGridAndTrotter) {
  const auto model = polonium_model();
  const auto path = resolve_kpath(simple_cubic_xmg(), 6);
  for (std::size_t ki : {0u, 6u, 12u}) {
    const CMatrix m = bloch_matrix(model, path.points[ki].k).matrix();
    const auto h = map_hamiltonian(HermitianMatrix(m));
    const auto exact = oracle::eigenvalues(m);
    const QpeConfig cfg = bounded(exact.front() - 1, exact.back() + 1);
    const double grid = grid_spacing(cfg);
    for (std::size_t band = 0; band < 4; ++band) {
      const auto theta = oracle::ansatz_angles(oracle::eigenvector(m, band));
      const StateVector psi = Backend().run_statevector(build_ansatz(AnsatzSpec(4, theta)));
      ASSERT_NEAR(expval_exact(psi, h), exact[band], 1e-10);
      Rng rng(band);
      const auto est = refine_level(theta, h, cfg, Backend(), rng);
      const double bound = trotter_energy_bound(h, psi, exact[band], cfg);
      EXPECT_LE(std::abs(est.energy - exact[band]), grid + bound + 1e-9) << "k " << ki << " band " << band;
    }
  }
}

TEST(RefineLevel, AnsatzEigenstatesOnTwoOrbitals) {
  CMatrix m(2, 2);
  m(0, 0) = -1.2;
  m(1, 1) = 0.9;
  m(0, 1) = cplx(0.6, 0.2);
  m(1, 0) = std::conj(m(0, 1));
  const auto h = map_hamiltonian(HermitianMatrix(m));
  const auto exact = oracle::eigenvalues(m);
  const QpeConfig cfg = bounded(-2, 2);
  const double grid = grid_spacing(cfg);
  EXPECT_NEAR(grid, 4 / (0.9 * 256), 1e-12);
  for (std::size_t band = 0; band < 2; ++band) {
    const auto theta = oracle::ansatz_angles(oracle::eigenvector(m, band));
    const StateVector psi = Backend().run_statevector(build_ansatz(AnsatzSpec(2, theta)));
    Rng rng(band);
    const auto est = refine_level(theta, h, cfg, Backend(), rng);
    const double bound = trotter_energy_bound(h, psi, exact[band], cfg);
    EXPECT_LE(std::abs(est.energy - exact[band]), grid + bound + 1e-12) << "band " << band;
  }
}

TEST(RefineLevel, DecodedEnergiesLieOnGrid) {
  CMatrix m(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  m(0, 1) = m(1, 0) = 0.4;
  const auto h = map_hamiltonian(HermitianMatrix(m));
  QpeConfig cfg = bounded(-2, 2);
  const auto r = rescale(h, cfg.e_lo, cfg.e_hi);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, kTwoPi);
  for (int i = 0; i < 10; ++i) {
    Rng rng(static_cast<std::uint64_t>(i));
    const auto est = refine_level(std::vector<double>{u(g), u(g)}, h, cfg, Backend(), rng);
    const double steps = est.phase * 256;
    EXPECT_DOUBLE_EQ(steps, std::round(steps));
    EXPECT_NEAR(est.energy, r.map.decode(kTwoPi * est.phase / r.tau), 1e-12);
  }
}

TEST(RefineLevel, DominantComponentWinsOften) {
  // 0.9 weight on the upper level of a two-orbital problem.
  CMatrix m(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  const auto h = map_hamiltonian(HermitianMatrix(m));
  QpeConfig cfg = bounded(-2, 2);
  const double grid = grid_spacing(cfg);
  const double theta = std::acos(std::sqrt(0.1));  // |10⟩ weight 0.1 → lower level (−1)
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto est = refine_level(std::vector<double>{theta, 0.3}, h, cfg, Backend(), rng);
    hits += std::abs(est.energy - 1.0) <= grid;
  }
  EXPECT_GE(hits, 40);
}

TEST(Trotter, RefinedErrorShrinksWithSlices) {
  const auto model = polonium_model();
  const auto path = resolve_kpath(simple_cubic_xmg(), 6);
  const CMatrix m = bloch_matrix(model, path.points[9].k).matrix();
  const auto h = map_hamiltonian(HermitianMatrix(m));
  const auto exact = oracle::eigenvalues(m);
  QpeConfig cfg = bounded(exact.front() - 1, exact.back() + 1);
  const StateVector psi = embedded_eigenstate(m, 0);
  double prev = 1e300;
  for (double spu : {2.0, 4.0, 8.0, 16.0}) {
    cfg.slices_per_unit_time = spu;
    const double b = trotter_energy_bound(h, psi, exact[0], cfg);
    EXPECT_GT(b, 1e-6);
    EXPECT_LE(b, prev * 1.05);
    prev = b;
  }
}

TEST(QpeConfig, Validation) {
  QpeConfig c;
  c.bits = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = QpeConfig{};
  c.shots_per_bit = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = QpeConfig{};
  EXPECT_THROW(c.evolution_time(), std::invalid_argument);
}
