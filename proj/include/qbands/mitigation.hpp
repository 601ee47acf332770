#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qbands/backend.hpp"

namespace qbands {

/// Column-stochastic misread matrix: entry (measured, prepared).
class CalibrationMatrix {
 public:
  CalibrationMatrix(int n_qubits, std::vector<double> entries, std::uint64_t shots = 0);

  /// Exact channel of independent per-bit flips with probability p.
  static CalibrationMatrix symmetric_flip(int n_qubits, double p);

  int n_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  std::uint64_t shots() const { return shots_; }
  double operator()(std::size_t measured, std::size_t prepared) const { return c_[measured * dim() + prepared]; }
  const std::vector<double>& entries() const { return c_; }

  std::string to_json() const;
  static CalibrationMatrix from_json(const std::string& text);

 private:
  int n_;
  std::vector<double> c_;
  std::uint64_t shots_;
};

/// Prepares every basis state with X gates on the backend's noisy channel and
/// records outcome frequencies column by column.
CalibrationMatrix measure_calibration(const Backend& backend, int n_qubits, std::uint64_t shots, Rng& rng);

/// Least-squares solution of C·x = f with negative entries clipped and the
/// result renormalized. Throws std::runtime_error reporting the condition
/// number when C is numerically singular.
std::vector<double> mitigate_distribution(std::span<const double> frequencies, const CalibrationMatrix& cal);
std::vector<double> mitigate_counts(const Counts& counts, const CalibrationMatrix& cal);

/// 2-norm condition number of the calibration matrix.
double condition_number(const CalibrationMatrix& cal);

struct ZneSchedule {
  std::vector<int> scales{1, 3, 5};

  void validate() const;  // odd, strictly increasing, starts at 1, at least two
};

/// Global folding c (c† c)^((scale−1)/2).
Circuit fold_circuit(const Circuit& c, int scale);

/// Lagrange polynomial through every (scale, value) point evaluated at zero.
double zne_expectation(const std::map<int, double>& energy_at_scale);
double zne_expectation(const std::map<int, double>& energy_at_scale, const ZneSchedule& schedule);

}  // namespace qbands
