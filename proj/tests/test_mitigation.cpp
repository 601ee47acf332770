#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qbands/estimation.hpp"
#include "qbands/mitigation.hpp"
#include "qbands/vqd.hpp"

using namespace qbands;

namespace {

NoiseDescriptor readout_only(double p) {
  NoiseDescriptor n;
  n.gate_flip_prob = 0;
  n.readout_flip_prob = p;
  return n;
}

// Forward channel applied by hand: f = C·x.
std::vector<double> forward(const CalibrationMatrix& c, const std::vector<double>& x) {
  std::vector<double> f(c.dim(), 0.0);
  for (std::size_t m = 0; m < c.dim(); ++m)
    for (std::size_t p = 0; p < c.dim(); ++p) f[m] += c(m, p) * x[p];
  return f;
}

}  // namespace

TEST(Calibration, NoiselessBackendGivesIdentity) {
  Rng rng(1);
  const auto c = measure_calibration(Backend(Tier::noisy, readout_only(0)), 2, 4096, rng);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(c(i, j), i == j ? 1.0 : 0.0);
}

TEST(Calibration, SingleQubitFlipChannel) {
  Rng rng(2);
  const std::uint64_t s = 100000;
  const auto c = measure_calibration(Backend(Tier::noisy, readout_only(0.1)), 1, s, rng);
  const double tol = 5 * std::sqrt(0.09 / s);
  EXPECT_NEAR(c(0, 0), 0.9, tol);
  EXPECT_NEAR(c(1, 0), 0.1, tol);
  EXPECT_NEAR(c(0, 1), 0.1, tol);
  EXPECT_NEAR(c(1, 1), 0.9, tol);
}

TEST(Calibration, TwoQubitsIsKroneckerProduct) {
  Rng rng(3);
  const std::uint64_t s = 100000;
  const double p = 0.07;
  const auto c = measure_calibration(Backend(Tier::noisy, readout_only(p)), 2, s, rng);
  const double one[2][2] = {{1 - p, p}, {p, 1 - p}};
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t q = 0; q < 4; ++q) {
      const double ref = one[m >> 1][q >> 1] * one[m & 1][q & 1];
      EXPECT_NEAR(c(m, q), ref, 5 * std::sqrt(ref * (1 - ref) / s) + 1e-12);
    }
  for (std::size_t q = 0; q < 4; ++q) {
    double col = 0;
    for (std::size_t m = 0; m < 4; ++m) col += c(m, q);
    EXPECT_NEAR(col, 1.0, 1e-12);
  }
}

TEST(Calibration, JsonRoundTrip) {
  const auto c = CalibrationMatrix::symmetric_flip(2, 0.03);
  const auto back = CalibrationMatrix::from_json(c.to_json());
  EXPECT_EQ(back.n_qubits(), 2);
  for (std::size_t i = 0; i < c.entries().size(); ++i) EXPECT_DOUBLE_EQ(back.entries()[i], c.entries()[i]);
}

TEST(MitigateDistribution, IdentityLeavesFrequencies) {
  const std::vector<double> f{0.1, 0.2, 0.3, 0.4};
  const auto x = mitigate_distribution(f, CalibrationMatrix::symmetric_flip(2, 0.0));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(x[i], f[i], 1e-14);
}

TEST(MitigateDistribution, InvertsExactChannel) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  for (int n = 1; n <= 4; ++n) {
    const auto c = CalibrationMatrix::symmetric_flip(n, 0.02 + 0.03 * n);
    std::vector<double> x(c.dim());
    double total = 0;
    for (double& v : x) total += v = u(rng);
    for (double& v : x) v /= total;
    const auto back = mitigate_distribution(forward(c, x), c);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(back[i], x[i], 1e-10);
  }
}

TEST(MitigateDistribution, ClipsNegativesAndRenormalizes) {
  // Observed frequencies no true distribution can produce under C.
  const auto c = CalibrationMatrix::symmetric_flip(1, 0.2);
  const auto x = mitigate_distribution(std::vector<double>{0.95, 0.05}, c);
  EXPECT_DOUBLE_EQ(x[1], 0.0);
  EXPECT_NEAR(x[0] + x[1], 1.0, 1e-14);
}

TEST(MitigateDistribution, RejectsSingularMatrix) {
  const auto c = CalibrationMatrix::symmetric_flip(1, 0.5);
  try {
    mitigate_distribution(std::vector<double>{0.5, 0.5}, c);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos) << e.what();
  }
}

TEST(MitigateCounts, DimensionMismatchRejected) {
  Counts counts;
  counts.n_qubits = 2;
  counts.shots = 1;
  counts.histogram[0] = 1;
  EXPECT_THROW(mitigate_counts(counts, CalibrationMatrix::symmetric_flip(1, 0.1)), std::invalid_argument);
}

TEST(Fold, ScaleOneIsIdentical) {
  const Circuit c = build_ansatz(AnsatzSpec(3, {0.3, 1.1, 2.0, 0.4}));
  const Circuit f = fold_circuit(c, 1);
  EXPECT_EQ(f.dump(), c.dump());
}

TEST(Fold, OddScalesPreserveUnitaryAndScaleGateCount) {
  const Circuit c = build_ansatz(AnsatzSpec(3, {0.3, 1.1, 2.0, 0.4}));
  const auto u = oracle::to_eigen(c.unitary());
  for (int s : {1, 3, 5, 7}) {
    const Circuit f = fold_circuit(c, s);
    EXPECT_EQ(f.size(), c.size() * static_cast<std::size_t>(s));
    EXPECT_LT((oracle::to_eigen(f.unitary()) - u).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_THROW(fold_circuit(c, 2), std::invalid_argument);
  EXPECT_THROW(fold_circuit(c, 0), std::invalid_argument);
}

TEST(Fold, MoreFoldingDegradesMoreUnderGateNoise) {
  NoiseDescriptor n;
  n.gate_flip_prob = 0.01;
  n.readout_flip_prob = 0;
  const Backend b(Tier::noisy, n);
  const Circuit c = build_ansatz(AnsatzSpec(4, {0.3, 1.1, 2.0, 0.4, 0.8, 2.5}));
  const PauliWord w("ZZZZ");
  const double ideal = Backend().run_statevector(c).expectation(w);
  int larger = 0;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    Rng r1(seed), r3(seed + 1000);
    const double d1 = std::abs(b.estimate_group(fold_circuit(c, 1), {w}, 4096, r1)[0] - ideal);
    const double d3 = std::abs(b.estimate_group(fold_circuit(c, 3), {w}, 4096, r3)[0] - ideal);
    larger += d3 > d1;
  }
  EXPECT_GE(larger, 28);
}

TEST(Zne, ConstantLineAndQuadratic) {
  EXPECT_NEAR(zne_expectation({{1, 2.5}, {3, 2.5}}), 2.5, 1e-14);
  EXPECT_NEAR(zne_expectation({{1, 2.0}, {3, 4.0}}), 1.0, 1e-14);
  auto f = [](double x) { return -7.0 + 0.4 * x - 0.03 * x * x; };
  EXPECT_NEAR(zne_expectation({{1, f(1)}, {3, f(3)}, {5, f(5)}}), -7.0, 1e-12);
  EXPECT_THROW(zne_expectation({{1, 1.0}}), std::invalid_argument);
}

TEST(Zne, AffineInGateCountRecoversTruth) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const double truth = g(rng), slope = g(rng);
    const std::size_t gates = 22;
    std::map<int, double> pts;
    for (int s : {1, 3, 5}) pts[s] = truth + slope * static_cast<double>(gates * static_cast<std::size_t>(s));
    EXPECT_NEAR(zne_expectation(pts), truth, 1e-9 * (1 + std::abs(slope) * 110));
  }
}

TEST(ZneSchedule, Validation) {
  EXPECT_NO_THROW(ZneSchedule{}.validate());
  EXPECT_THROW((ZneSchedule{{1, 2, 5}}.validate()), std::invalid_argument);
  EXPECT_THROW((ZneSchedule{{3, 5}}.validate()), std::invalid_argument);
  EXPECT_THROW((ZneSchedule{{1}}.validate()), std::invalid_argument);
  EXPECT_THROW((ZneSchedule{{1, 5, 3}}.validate()), std::invalid_argument);
}

TEST(CalibratedEstimator, LowestBandImprovesOverRawInMedian) {
  // Ground state of a Bloch image prepared exactly, then estimated raw and mitigated.
  const auto model = polonium_model();
  const auto path = resolve_kpath(simple_cubic_xmg(), 6);
  const auto h = map_hamiltonian(bloch_matrix(model, path.points[0].k));
  const auto exact = oracle::eigenvalues(bloch_matrix(model, path.points[0].k).matrix());
  RunConfig rc;
  rc.tier = Tier::statevector;
  rc.trials = 2;
  const Estimator sv = make_estimator(rc, 4);
  Rng opt_rng(7);
  DeflationState empty(h, 1.0);
  const auto best = minimize([&](std::span<const double> t) { return cost(t, empty, sv, opt_rng); }, 6,
                             OptimizerConfig{0.5, 1e-7, 400, 0, 3});
  const Circuit prep = build_ansatz(AnsatzSpec(4, best.x));
  ASSERT_NEAR(best.value, exact[0], 1e-6);

  NoiseDescriptor noise;
  MitigationConfig mit;
  std::vector<double> raw_err, mit_err;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Estimator raw(Backend(Tier::noisy, noise), 4, 8096);
    const Estimator cal(Backend(Tier::calibrated, noise), 4, 8096, mit, seed);
    Rng r1(seed), r2(seed + 100);
    raw_err.push_back(std::abs(raw.energy(prep, h, r1) - exact[0]));
    mit_err.push_back(std::abs(cal.energy(prep, h, r2) - exact[0]));
  }
  EXPECT_LE(summarize(mit_err).median, summarize(raw_err).median);
}
