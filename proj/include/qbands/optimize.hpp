#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qbands {

struct OptimizerConfig {
  double rho_begin = 0.5;  // rad
  double rho_end = 1e-4;
  std::size_t max_evals_per_dim = 100;
  std::size_t max_evals = 0;  // overrides max_evals_per_dim when nonzero
  std::uint64_t seed = 0;     // initial point for the dim-only overloads

  std::size_t budget(std::size_t dim) const { return max_evals ? max_evals : max_evals_per_dim * dim; }
  void validate(std::size_t dim) const;
};

struct OptimizationResult {
  std::vector<double> x;
  double value = 0.0;  // objective at x as recorded when evaluated
  std::size_t evaluations = 0;
  bool converged = false;  // false when the evaluation budget ran out first
};

struct TraceEntry {
  std::size_t index;
  std::vector<double> x;
  double value;
};

using Objective = std::function<double(std::span<const double>)>;

/// Linear-approximation trust-region descent over a dim+1 simplex (COBYLA
/// without constraints). The trust radius shrinks from rho_begin to rho_end.
OptimizationResult minimize(const Objective& f, std::vector<double> start, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace = nullptr);
/// Starts from random_init(dim, config.seed).
OptimizationResult minimize(const Objective& f, std::size_t dim, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace = nullptr);

/// minimize(−f); the reported value is f itself.
OptimizationResult maximize(const Objective& f, std::vector<double> start, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace = nullptr);
OptimizationResult maximize(const Objective& f, std::size_t dim, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace = nullptr);

/// Angles i.i.d. uniform in [0, 2π).
std::vector<double> random_init(std::size_t dim, std::uint64_t seed);

std::string trace_csv(const std::vector<TraceEntry>& trace);

}  // namespace qbands
