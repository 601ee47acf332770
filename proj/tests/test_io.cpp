#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qbands/io.hpp"

using namespace qbands;

namespace {

const char* kTwoOrbital = R"(name: pair
units: {energy: eV, length: angstrom}
lattice_vectors: [[2, 0, 0], [0, 2, 0], [0, 0, 2]]
orbitals: [a, {label: b, position: [0.5, 0, 0]}]
hoppings:
  - {orbitals: [a, a], cell: [0, 0, 0], t: -1}
  - {orbitals: [a, b], cell: [0, 0, 0], t: 0.5}
  - {orbitals: [b, a], delta: [1, 0, 0], t: [0.5, 0]}
)";

const char* kRun = R"(kpath:
  coordinates: reduced
  anchors:
    - {label: G, k: [0, 0, 0]}
    - {label: X, k: [0.5, 0, 0]}
  points_per_segment: 2
tier: sampling
shots: 512
trials: 3
seed: 17
optimizer: {rho_begin: 0.4, rho_end: 1.0e-3, max_evals: 60}
)";

int line_of(const std::string& text, const std::string& source, bool model) {
  try {
    if (model)
      parse_model(text, source);
    else
      parse_run(text, source);
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(source + ":"), std::string::npos) << e.what();
    return e.line();
  }
  ADD_FAILURE() << "expected a config error";
  return -1;
}

}  // namespace

TEST(ParseModel, TwoOrbitalWithPositionsAndDelta) {
  const auto m = parse_model(kTwoOrbital);
  EXPECT_EQ(m.num_orbitals(), 2u);
  EXPECT_TRUE(m.is_closed());
  // Cell form with positions: δ = (0 + 0 − 0.5)·a₁ = (−1, 0, 0) for a→b, which is the
  // conjugate partner of the explicit b→a hop, so the two entries describe one bond.
  const auto h = bloch_matrix(m, {0.3, 0, 0}).matrix();
  const cplx expected = 0.5 * std::exp(cplx(0, -0.3));
  EXPECT_NEAR(std::abs(h(0, 1) - expected), 0.0, 1e-12);
  EXPECT_NEAR(h(0, 0).real(), -1.0, 1e-12);
}

TEST(ParseModel, BundledFileMatchesBuiltInModel) {
  const auto file = load_model(QBANDS_DATA_DIR "/polonium.yaml");
  const auto built = polonium_model();
  for (const Vec3& k : {Vec3{0, 0, 0}, Vec3{0.3, -0.2, 0.9}, Vec3{0.9391, 0.9391, 0}}) {
    EXPECT_LT((bloch_matrix(file, k).matrix() - bloch_matrix(built, k).matrix()).max_abs(), 1e-12);
    EXPECT_LT((oracle::to_eigen(bloch_matrix(file, k).matrix()) - oracle::polonium_bloch(k)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(ParseModel, UnitConversion) {
  std::string text = kTwoOrbital;
  text.replace(text.find("energy: eV"), 10, "energy: meV");
  text.replace(text.find("length: angstrom"), 16, "length: nm");
  const auto m = parse_model(text);
  EXPECT_NEAR(m.lattice_vectors()[0][0], 20.0, 1e-12);
  EXPECT_NEAR(bloch_matrix(m, {0, 0, 0})(0, 0).real(), -1e-3, 1e-15);
}

TEST(ParseModel, ErrorsNameTheLine) {
  EXPECT_EQ(line_of("name: x\nunits: {energy: eV, length: angstrom}\nlattice_vectors: [[1,0,0],[0,1,0]]\n", "m.yaml",
                    true),
            3);
  std::string bad_key = kTwoOrbital;
  bad_key += "colour: blue\n";
  EXPECT_EQ(line_of(bad_key, "m.yaml", true), 9);
  EXPECT_EQ(line_of("name: x\nunits: [unclosed\n", "m.yaml", true), 3);
  std::string unknown_orbital = kTwoOrbital;
  unknown_orbital.replace(unknown_orbital.find("[a, a]"), 6, "[a, c]");
  EXPECT_EQ(line_of(unknown_orbital, "m.yaml", true), 6);
}

TEST(ParseModel, ConflictingHoppingsAreConfigErrors) {
  std::string text = kTwoOrbital;
  text += "  - {orbitals: [a, b], cell: [0, 0, 0], t: 0.7}\n";
  EXPECT_THROW(parse_model(text), ConfigError);
}

TEST(ParseRun, FieldsAndValidation) {
  const auto rf = parse_run(kRun);
  EXPECT_FALSE(rf.model);
  EXPECT_EQ(rf.run.tier, Tier::sampling);
  EXPECT_EQ(rf.run.shots, 512u);
  EXPECT_EQ(rf.run.trials, 3u);
  EXPECT_EQ(rf.run.seed, 17u);
  EXPECT_EQ(rf.run.optimizer.max_evals, 60u);
  EXPECT_DOUBLE_EQ(rf.run.optimizer.rho_begin, 0.4);
  EXPECT_EQ(rf.kpath.anchors.size(), 2u);
  const auto path = rf.kpath.resolve(parse_model(kTwoOrbital));
  ASSERT_EQ(path.points.size(), 3u);
  EXPECT_NEAR(path.points[2].k[0], std::numbers::pi / 2, 1e-12);
}

TEST(ParseRun, CalibratedWithoutNoiseIsRejected) {
  std::string text = kRun;
  text.replace(text.find("tier: sampling"), 14, "tier: calibrated");
  try {
    parse_run(text, "r.yaml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("noise"), std::string::npos) << e.what();
  }
}

TEST(ParseRun, UnknownTierAndBadNumbers) {
  std::string text = kRun;
  text.replace(text.find("tier: sampling"), 14, "tier: quantum");
  EXPECT_EQ(line_of(text, "r.yaml", false), 7);
  std::string shots = kRun;
  shots.replace(shots.find("shots: 512"), 10, "shots: lots");
  EXPECT_EQ(line_of(shots, "r.yaml", false), 8);
}

TEST(ParseRun, ModelPathResolvedAgainstRunDirectory) {
  const auto rf = load_run(QBANDS_DATA_DIR "/run_statevector.yaml");
  ASSERT_TRUE(rf.model);
  EXPECT_TRUE(std::filesystem::exists(*rf.model));
  EXPECT_EQ(rf.run.trials, 8u);
  EXPECT_EQ(rf.kpath.resolve(load_model(*rf.model)).points.size(), 13u);
}

TEST(ParseRun, AllBundledRunsLoad) {
  for (const char* f : {"run_statevector.yaml", "run_sampling.yaml", "run_noisy.yaml", "run_calibrated.yaml",
                        "run_qpe.yaml"})
    EXPECT_NO_THROW(load_run(std::string(QBANDS_DATA_DIR) + "/" + f)) << f;
}

TEST(ReadText, MissingFile) { EXPECT_THROW(read_text("/nonexistent/qbands.yaml"), ConfigError); }

TEST(Hash, FnvKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
  EXPECT_EQ((OutputHeader{0x10, 3}.line()), "# config_hash=0000000000000010 seed=3");
}

TEST(BandCsv, ExactTableRoundTrip) {
  const auto path = resolve_kpath(simple_cubic_xmg(), 3);
  const auto table = exact_bands(polonium_model(), path);
  const std::string csv = band_csv(table, {1, 2});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "# config_hash=0000000000000001 seed=2");
  const auto back = parse_band_csv(csv);
  ASSERT_EQ(back.points.size(), table.points.size());
  EXPECT_EQ(back.num_bands, 4u);
  for (std::size_t i = 0; i < table.points.size(); ++i)
    for (std::size_t l = 0; l < 4; ++l)
      EXPECT_NEAR(back.points[i].energies[l], table.points[i].energies[l], 1e-11 * (1 + std::abs(table.points[i].energies[l])));
  EXPECT_EQ(back.points[0].provenance[0], Provenance::exact);
}

TEST(BandCsv, StatsAndErrorRows) {
  BandTable t;
  t.num_bands = 2;
  BandPoint p;
  p.k_index = 0;
  p.energies = {-1, 1};
  p.provenance = {Provenance::optimized, Provenance::optimized};
  p.stats = {summarize({-1.1, -1, -0.9}), summarize({0.9, 1, 1.1})};
  t.points.push_back(p);
  BandPoint err;
  err.k_index = 1;
  err.error = "boom";
  t.points.push_back(err);
  const std::string csv = band_csv(t, {});
  EXPECT_NE(csv.find("mean_0"), std::string::npos);
  EXPECT_NE(csv.find(",error"), std::string::npos);
  const auto back = parse_band_csv(csv);
  ASSERT_EQ(back.points.size(), 2u);
  EXPECT_TRUE(back.points[1].error);
  ASSERT_EQ(back.points[0].stats.size(), 2u);
  EXPECT_NEAR(back.points[0].stats[0].mean, -1.0, 1e-12);
  EXPECT_NEAR(back.points[0].stats[1].q3, summarize({0.9, 1, 1.1}).q3, 1e-12);
}

TEST(BandCsv, MalformedRowsNameTheLine) {
  try {
    parse_band_csv("# h\nk_index,path_distance,kx,ky,kz,E_0,method\n0,0,0,0,0,1,exact\n1,0,0\n", "t.csv");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(TrialsJson, RoundTripThroughParse) {
  const auto path = resolve_kpath(simple_cubic_xmg(), 1);
  RunConfig rc;
  rc.trials = 2;
  rc.optimizer.max_evals_per_dim = 20;
  rc.seed = 3;
  const auto run = band_structure(polonium_model(), path, rc);
  const auto json = trials_json(path, run, {5, 3});
  const auto stored = parse_trials_json(json);
  ASSERT_EQ(stored.size(), path.points.size());
  for (const auto& s : stored) {
    const auto& orig = *run.solutions[s.k_index];
    ASSERT_EQ(s.solution.levels.size(), orig.levels.size());
    EXPECT_DOUBLE_EQ(s.solution.beta.beta, orig.beta.beta);
    for (std::size_t l = 0; l < orig.levels.size(); ++l) {
      EXPECT_EQ(s.solution.levels[l].theta, orig.levels[l].theta);
      ASSERT_EQ(s.solution.levels[l].trials.size(), 2u);
      EXPECT_DOUBLE_EQ(s.solution.levels[l].trials[1].energy, orig.levels[l].trials[1].energy);
      EXPECT_DOUBLE_EQ(s.solution.levels[l].stats.median, orig.levels[l].stats.median);
    }
  }
  EXPECT_THROW(parse_trials_json("{not json"), ConfigError);
}

TEST(PlotCsv, RowsAndRoundTrip) {
  const auto path = resolve_kpath(simple_cubic_xmg(), 2);
  const auto table = exact_bands(polonium_model(), path);
  const auto rows = plot_rows(table);
  EXPECT_EQ(rows.size(), path.points.size() * 4);
  const auto back = parse_plot_csv(plot_csv(rows, {}));
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].band, rows[i].band);
    EXPECT_EQ(back[i].method, "exact");
    EXPECT_EQ(back[i].statistic, "value");
    EXPECT_NEAR(back[i].value, rows[i].value, 1e-11 * (1 + std::abs(rows[i].value)));
  }
  EXPECT_THROW(parse_plot_csv(""), ConfigError);
}
