#include "qbands/vqd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qbands {

namespace {

// Stream labels for derive_seed.
constexpr std::uint64_t kBetaStream = 0xbe7a;
constexpr std::uint64_t kLevelStream = 0x1e7e1;
constexpr std::uint64_t kQpeStream = 0x9be;
constexpr std::uint64_t kCalibrationStream = 0xca1;

Circuit ansatz(std::size_t m, std::span<const double> theta) {
  return build_ansatz(AnsatzSpec(m, std::vector<double>(theta.begin(), theta.end())));
}

}  // namespace

void RunConfig::validate() const {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (beta_trials == 0) throw std::invalid_argument("beta_trials must be positive");
  if (!(beta_factor >= 1.0)) throw std::invalid_argument("beta_factor must be at least 1");
  if (workers == 0) throw std::invalid_argument("workers must be positive");
  if ((tier == Tier::noisy || tier == Tier::calibrated) && !noise)
    throw std::invalid_argument(std::string("tier '") + to_string(tier) + "' requires a noise block");
  if (noise) noise->validate();
  if (tier == Tier::calibrated) mitigation.validate();
  if (qpe) qpe->validate();
}

Backend make_backend(const RunConfig& config) {
  const bool noisy = config.tier == Tier::noisy || config.tier == Tier::calibrated;
  return Backend(config.tier, noisy ? config.noise : std::nullopt);
}

Estimator make_estimator(const RunConfig& config, int n_qubits, std::uint64_t job) {
  return Estimator(make_backend(config), n_qubits, config.shots, config.mitigation,
                   derive_seed(config.seed, {kCalibrationStream, job}));
}

DeflationState::DeflationState(PauliSum h, double beta) : h_(std::move(h)), groups_(partition(h_)), beta_(beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("deflation weight beta must be positive");
}

void DeflationState::push(std::vector<double> theta, double energy) {
  const Circuit prep = ansatz(num_qubits(), theta);
  push(prep, std::move(theta), energy);
}

void DeflationState::push(const Circuit& prep, std::vector<double> theta, double energy) {
  if (prep.n_qubits() != static_cast<int>(num_qubits())) throw std::invalid_argument("level circuit width mismatch");
  levels_.push_back({std::move(theta), energy, adjoint(prep)});
}

double cost(const Circuit& prep, const DeflationState& state, const Estimator& est, Rng& rng,
            MeasurementTally* tally) {
  double c = est.energy(prep, state.hamiltonian(), state.groups(), rng, tally);
  for (const auto& level : state.levels())
    c += state.beta() * est.overlap(compose(prep, level.inverse_prep), rng, tally);
  return c;
}

double cost(std::span<const double> theta, const DeflationState& state, const Estimator& est, Rng& rng,
            MeasurementTally* tally) {
  return cost(ansatz(state.num_qubits(), theta), state, est, rng, tally);
}

BetaCalibration calibrate_beta(const PauliSum& h, const Estimator& est, const RunConfig& config, std::uint64_t seed) {
  const std::size_t m = h.n_qubits();
  const std::size_t dim = AnsatzSpec::num_params(m);
  const CommutingPartition groups = partition(h);
  BetaCalibration out;

  auto extreme = [&](bool maximizing, std::vector<double>& theta_out) {
    Rng rng(derive_seed(seed, {kBetaStream, maximizing ? 1u : 0u}));
    if (dim == 0) {
      theta_out.clear();
      return est.energy(ansatz(m, {}), h, groups, rng);
    }
    const Objective f = [&](std::span<const double> th) { return est.energy(ansatz(m, th), h, groups, rng); };
    std::optional<OptimizationResult> best;
    for (std::size_t trial = 0; trial < config.beta_trials; ++trial) {
      OptimizerConfig oc = config.optimizer;
      oc.seed = derive_seed(seed, {kBetaStream, maximizing ? 1u : 0u, trial});
      OptimizationResult r = maximizing ? maximize(f, dim, oc) : minimize(f, dim, oc);
      if (!best || (maximizing ? r.value > best->value : r.value < best->value)) best = std::move(r);
    }
    theta_out = best->x;
    return est.energy(ansatz(m, theta_out), h, groups, rng);
  };

  out.e_max = extreme(true, out.theta_max);
  out.e_min = extreme(false, out.theta_min);
  const double delta = out.e_max - out.e_min;
  if (delta > 0.0) {
    out.beta = config.beta_factor * delta;
  } else {
    out.beta = 1.0;
    out.fallback = true;
  }
  return out;
}

KSolution solve_k(const PauliSum& h, const BetaCalibration& beta, const Estimator& est, const RunConfig& config,
                  std::uint64_t seed) {
  const std::size_t m = h.n_qubits();
  const std::size_t dim = AnsatzSpec::num_params(m);
  KSolution sol;
  sol.beta = beta;
  if (beta.fallback) sol.warnings.push_back("flat spectrum: deflation weight set to 1 eV");

  DeflationState state(h, beta.beta);
  for (std::size_t level = 0; level < m; ++level) {
    LevelResult res;
    std::size_t best = 0;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      Rng rng(derive_seed(seed, {kLevelStream, level, trial}));
      TrialRecord rec;
      if (dim == 0) {
        rec.cost = cost(std::span<const double>{}, state, est, rng);
        rec.converged = true;
      } else {
        OptimizerConfig oc = config.optimizer;
        oc.seed = derive_seed(seed, {kLevelStream, level, trial, 1});
        const Objective f = [&](std::span<const double> th) { return cost(th, state, est, rng); };
        OptimizationResult r = minimize(f, dim, oc);
        rec.theta = std::move(r.x);
        rec.cost = r.value;
        rec.evaluations = r.evaluations;
        rec.converged = r.converged;
      }
      rec.energy = est.energy(ansatz(m, rec.theta), state.hamiltonian(), state.groups(), rng);
      if (!rec.converged) ++res.non_converged;
      if (trial == 0 || rec.cost < res.trials[best].cost) best = trial;
      res.trials.push_back(std::move(rec));
    }
    res.theta = res.trials[best].theta;
    res.energy = res.trials[best].energy;
    std::vector<double> energies;
    for (const auto& t : res.trials) energies.push_back(t.energy);
    res.stats = summarize(energies);
    if (res.non_converged > 0) {
      std::ostringstream os;
      os << "level " << level << ": " << res.non_converged << " of " << config.trials
         << " trials hit the evaluation budget";
      sol.warnings.push_back(os.str());
    }
    state.push(res.theta, res.energy);
    sol.levels.push_back(std::move(res));
  }
  return sol;
}

KSolution solve_k(const PauliSum& h, const Estimator& est, const RunConfig& config, std::uint64_t seed) {
  return solve_k(h, calibrate_beta(h, est, config, seed), est, config, seed);
}

void refine_levels(KSolution& sol, const PauliSum& h, const QpeConfig& qpe, const Backend& backend,
                   std::uint64_t seed) {
  QpeConfig cfg = qpe;
  const double spread = sol.beta.e_max - sol.beta.e_min;
  const double pad = std::max(0.05 * spread, 0.5);
  cfg.e_lo = sol.beta.e_min - pad;
  cfg.e_hi = sol.beta.e_max + pad;
  std::optional<Rescaled> r;
  try {
    r = rescale(h, cfg.e_lo, cfg.e_hi, cfg.tau);
  } catch (const std::invalid_argument& e) {
    sol.warnings.push_back(std::string("qpe skipped: ") + e.what());
    return;
  }
  for (std::size_t level = 0; level < sol.levels.size(); ++level) {
    auto& res = sol.levels[level];
    std::vector<double> refined;
    for (std::size_t trial = 0; trial < res.trials.size(); ++trial) {
      auto& rec = res.trials[trial];
      Rng rng(derive_seed(seed, {kQpeStream, level, trial}));
      const Circuit prep = ansatz(h.n_qubits(), rec.theta);
      rec.refined = iterative_qpe(prep, r->h, r->map, r->tau, cfg, backend, rng);
      refined.push_back(rec.refined->energy);
    }
    res.refined_stats = summarize(refined);
  }
}

std::uint64_t kpoint_seed(std::uint64_t master, std::size_t k_index) { return derive_seed(master, {k_index}); }

BandPoint band_point(const KPoint& kp, std::size_t k_index, const KSolution& sol) {
  struct Entry {
    double energy;
    Provenance prov;
    TrialStats stats;
  };
  std::vector<Entry> entries;
  for (const auto& level : sol.levels) {
    if (level.refined_stats)
      entries.push_back({level.refined_stats->median, Provenance::qpe_refined, *level.refined_stats});
    else
      entries.push_back({level.stats.median, Provenance::optimized, level.stats});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.energy < b.energy; });
  BandPoint p;
  p.k_index = k_index;
  p.path_distance = kp.distance;
  p.k = kp.k;
  for (const auto& e : entries) {
    p.energies.push_back(e.energy);
    p.provenance.push_back(e.prov);
    p.stats.push_back(e.stats);
  }
  return p;
}

BandRun band_structure(const TightBindingModel& model, const KPath& path, const RunConfig& config) {
  config.validate();
  const TightBindingModel closed = model.is_closed() ? model : close_hermitian(model);
  const int m = static_cast<int>(closed.num_orbitals());
  const Estimator est = make_estimator(config, m);
  const Backend backend = make_backend(config);

  const std::size_t n = path.points.size();
  BandRun run;
  run.table.num_bands = closed.num_orbitals();
  run.table.points.resize(n);
  run.solutions.resize(n);

  auto job = [&](std::size_t i) {
    const KPoint& kp = path.points[i];
    const std::uint64_t seed = kpoint_seed(config.seed, i);
    try {
      const PauliSum h = map_hamiltonian(bloch_matrix(closed, kp.k));
      KSolution sol = solve_k(h, est, config, seed);
      if (config.qpe) refine_levels(sol, h, *config.qpe, backend, seed);
      run.table.points[i] = band_point(kp, i, sol);
      run.solutions[i] = std::move(sol);
    } catch (const std::exception& e) {
      BandPoint p;
      p.k_index = i;
      p.path_distance = kp.distance;
      p.k = kp.k;
      p.error = e.what();
      run.table.points[i] = std::move(p);
    }
  };

  const std::size_t workers = std::min(config.workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return run;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
  return run;
}

}  // namespace qbands
