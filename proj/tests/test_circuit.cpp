#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qbands/backend.hpp"
#include "qbands/circuit.hpp"

using namespace qbands;
using oracle::Mat;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct A(θ,φ) matrix, written with qubit a as the least significant index
// bit, then permuted into this library's ordering (a most significant).
Mat a_gate_reference(double theta, double phi) {
  Mat m = Mat::Zero(4, 4);
  const cplx e(std::cos(phi), std::sin(phi));
  m(0, 0) = 1;
  m(3, 3) = 1;
  m(1, 1) = std::cos(theta);
  m(1, 2) = e * std::sin(theta);
  m(2, 1) = std::conj(e) * std::sin(theta);
  m(2, 2) = -std::cos(theta);
  Mat swap = Mat::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
  return swap * m * swap;
}

Mat unitary_of(const Circuit& c) { return oracle::to_eigen(c.unitary()); }

}  // namespace

TEST(AGate, MatchesReferenceMatrixUpToPhase) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng), p = u(rng);
    const Circuit c = a_gate(t, p);
    EXPECT_EQ(c.size(), 7u);
    EXPECT_LT(oracle::phase_distance(unitary_of(c), a_gate_reference(t, p)), 1e-10);
  }
}

TEST(AGate, FixesVacuumAndDoubleOccupancy) {
  const Circuit c = a_gate(0.7, 1.9);
  const Backend b;
  for (std::size_t idx : {0u, 3u}) {
    std::vector<cplx> amps(4, 0.0);
    amps[idx] = 1.0;
    StateVector s(2, amps);
    s.apply(c);
    EXPECT_NEAR(std::norm(s[idx]), 1.0, 1e-12);
  }
}

TEST(Ansatz, SingleQubitIsX) {
  const Circuit c = build_ansatz(AnsatzSpec(1, {}));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.gates()[0].kind, GateKind::X);
  EXPECT_NEAR(std::norm(Backend().run_statevector(c)[1]), 1.0, 1e-15);
}

TEST(Ansatz, ZeroThetaKeepsFirstOrbital) {
  for (double phi : {0.0, 1.3, 4.0}) {
    const auto s = Backend().run_statevector(build_ansatz(AnsatzSpec(2, {0.0, phi})));
    EXPECT_NEAR(std::norm(s[0b10]), 1.0, 1e-12);
  }
}

TEST(Ansatz, RejectsWrongParameterCount) {
  EXPECT_THROW(AnsatzSpec(3, {0.1}), std::invalid_argument);
  EXPECT_THROW(AnsatzSpec(0, {}), std::invalid_argument);
}

TEST(Ansatz, GateCountsAreLinear) {
  for (std::size_t m = 1; m <= 7; ++m) {
    const Circuit c = build_ansatz(AnsatzSpec(m, std::vector<double>(AnsatzSpec::num_params(m), 0.3)));
    EXPECT_EQ(c.size(), 1 + 7 * (m - 1));
    EXPECT_EQ(c.entangling_count(), 3 * (m - 1));
  }
}

TEST(Ansatz, StaysInSingleExcitationSubspace) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  const Backend b;
  for (int i = 0; i < 300; ++i) {
    const std::size_t m = 2 + i % 5;
    std::vector<double> th(AnsatzSpec::num_params(m));
    for (double& x : th) x = u(rng);
    const auto s = b.run_statevector(build_ansatz(AnsatzSpec(m, th)));
    double leak = 0;
    for (std::size_t k = 0; k < s.dim(); ++k)
      if (__builtin_popcountll(k) != 1) leak += std::norm(s[k]);
    EXPECT_LE(leak, 1e-12);
  }
}

TEST(Adjoint, SimpleGates) {
  Circuit h(1);
  h.append(Gate::h(0));
  EXPECT_EQ(adjoint(h).gates()[0].kind, GateKind::H);
  Circuit rz(1);
  rz.append(Gate::rz(0, 0.4));
  EXPECT_DOUBLE_EQ(adjoint(rz).gates()[0].angle, -0.4);
}

TEST(Adjoint, InvertsRandomAnsatz) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> th(6);
    for (double& x : th) x = u(rng);
    const Circuit v = build_ansatz(AnsatzSpec(4, th));
    Circuit vv = v;
    vv.append(adjoint(v));
    const auto s = Backend().run_statevector(vv);
    EXPECT_NEAR(std::norm(s[0]), 1.0, 1e-10);
    EXPECT_LT((unitary_of(vv) - Mat::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BasisRotation, ConjugatesToZ) {
  const Mat z = oracle::pauli("Z");
  for (const char* w : {"X", "Y"}) {
    const Mat r = unitary_of(basis_rotation(PauliWord(w)));
    EXPECT_LT((r.adjoint() * z * r - oracle::pauli(w)).cwiseAbs().maxCoeff(), 1e-12) << w;
  }
  EXPECT_EQ(basis_rotation(PauliWord("ZI")).size(), 0u);
  const Mat r = unitary_of(basis_rotation(PauliWord("XYZ")));
  EXPECT_LT((r.adjoint() * oracle::pauli("ZZZ") * r - oracle::pauli("XYZ")).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Trotter, SingleWordIsExact) {
  const PauliSum h(1, {{0.8, PauliWord("Z")}});
  const Mat u = unitary_of(trotter_evolution(h, 1.7, 1));
  const Mat ref = oracle::expm(cplx(0, 0.8 * 1.7) * oracle::pauli("Z"));
  EXPECT_LT((u - ref).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Trotter, CommutingSumOneSliceIsExact) {
  const PauliSum h(3, {{0.3, PauliWord("ZZI")}, {-1.1, PauliWord("IZZ")}, {0.5, PauliWord("ZIZ")}, {2.0, PauliWord("III")}});
  Mat hm = Mat::Zero(8, 8);
  for (const auto& t : h.terms()) hm += t.coeff * oracle::pauli(t.word.str());
  const Mat ref = oracle::expm(cplx(0, 0.9) * hm);
  EXPECT_LT((unitary_of(trotter_evolution(h, 0.9, 1)) - ref).norm(), 1e-10);
}

TEST(Trotter, FirstOrderErrorHalvesWithSlices) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g;
  const char* words[] = {"XX", "YZ", "ZI", "IX", "YY"};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<PauliTerm> terms;
    for (const char* w : words) terms.push_back({g(rng), PauliWord(w)});
    const PauliSum h(2, terms);
    Mat hm = Mat::Zero(4, 4);
    for (const auto& t : h.terms()) hm += t.coeff * oracle::pauli(t.word.str());
    const Mat ref = oracle::expm(cplx(0, 0.5) * hm);
    double prev = 0;
    for (int n : {1, 2, 4, 8, 16}) {
      const Mat u = unitary_of(trotter_evolution(h, 0.5, n));
      const double err = (u - ref).operatorNorm();
      if (n >= 4) {
        EXPECT_NEAR(prev / err, 2.0, 0.4) << "slices " << n;
      }
      prev = err;
    }
  }
}

TEST(Controlled, XBecomesCnot) {
  Circuit x(1);
  x.append(Gate::x(0));
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
  EXPECT_LT((unitary_of(controlled(x)) - cnot).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Controlled, BlockStructure) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  std::vector<double> th(4);
  for (double& x : th) x = u(rng);
  Circuit c = build_ansatz(AnsatzSpec(3, th));
  c.append(pauli_exponential(PauliWord("XYZ"), 0.37));
  c.append(Gate::global_phase(0.9));
  const Mat inner = unitary_of(c);
  const Mat full = unitary_of(controlled(c));
  EXPECT_LT((full.topLeftCorner(8, 8) - Mat::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((full.bottomRightCorner(8, 8) - inner).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(full.topRightCorner(8, 8).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuits, EmittedUnitariesAreUnitary) {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  std::vector<double> th(6);
  for (double& x : th) x = u(rng);
  const PauliSum h(3, {{0.4, PauliWord("XYZ")}, {-0.2, PauliWord("ZZI")}, {1.0, PauliWord("IXX")}});
  for (const Circuit& c : {build_ansatz(AnsatzSpec(4, th)), trotter_evolution(h, 0.8, 3),
                           controlled(trotter_evolution(h, 0.8, 2)), basis_rotation(PauliWord("XYI"))})
    EXPECT_TRUE(is_unitary(c.unitary(), 1e-10));
}

TEST(PauliExponential, MatchesDenseExponential) {
  for (const char* w : {"X", "XY", "ZIY", "IIII", "YXZX"}) {
    const PauliWord word(w);
    const Mat ref = oracle::expm(cplx(0, 0.61) * oracle::pauli(w));
    EXPECT_LT((unitary_of(pauli_exponential(word, 0.61)) - ref).cwiseAbs().maxCoeff(), 1e-10) << w;
  }
}

TEST(CircuitValidation, RejectsOutOfRangeAndRepeatedQubits) {
  Circuit c(2);
  EXPECT_THROW(c.append(Gate::x(2)), std::invalid_argument);
  EXPECT_THROW(c.append(Gate::cnot(1, 1)), std::invalid_argument);
  CMatrix bad(2, 2);
  bad(0, 0) = 2.0;
  EXPECT_THROW(Gate::unitary_gate({0}, bad), std::invalid_argument);
}
