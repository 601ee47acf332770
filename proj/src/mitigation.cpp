#include "qbands/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include "json.hpp"

namespace qbands {

CalibrationMatrix::CalibrationMatrix(int n_qubits, std::vector<double> entries, std::uint64_t shots)
    : n_(n_qubits), c_(std::move(entries)), shots_(shots) {
  if (n_qubits < 1 || n_qubits > 12) throw std::invalid_argument("calibration matrix qubit count out of range");
  if (c_.size() != dim() * dim()) throw std::invalid_argument("calibration matrix entry count is not 4^n");
  for (double x : c_)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("calibration entries must lie in [0, 1]");
}

CalibrationMatrix CalibrationMatrix::symmetric_flip(int n, double p) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> c(dim * dim);
  for (std::size_t prepared = 0; prepared < dim; ++prepared) {
    std::vector<double> col(dim, 0.0);
    col[prepared] = 1.0;
    apply_readout_channel(col, n, p);
    for (std::size_t measured = 0; measured < dim; ++measured) c[measured * dim + prepared] = col[measured];
  }
  return CalibrationMatrix(n, std::move(c));
}

std::string CalibrationMatrix::to_json() const {
  nlohmann::ordered_json j;
  j["n_qubits"] = n_;
  j["shots"] = shots_;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < dim(); ++m) {
    std::vector<double> row(c_.begin() + static_cast<std::ptrdiff_t>(m * dim()),
                            c_.begin() + static_cast<std::ptrdiff_t>((m + 1) * dim()));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  return j.dump(2);
}

CalibrationMatrix CalibrationMatrix::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int n = j.at("n_qubits").get<int>();
  std::vector<double> entries;
  for (const auto& row : j.at("matrix"))
    for (const auto& x : row) entries.push_back(x.get<double>());
  return CalibrationMatrix(n, std::move(entries), j.value("shots", std::uint64_t{0}));
}

CalibrationMatrix measure_calibration(const Backend& backend, int n, std::uint64_t shots, Rng& rng) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> c(dim * dim);
  for (std::size_t prepared = 0; prepared < dim; ++prepared) {
    Circuit prep(n);
    for (int q = 0; q < n; ++q)
      if (prepared >> (n - 1 - q) & 1U) prep.append(Gate::x(q));
    const auto freq = backend.measure(prep, shots, rng).frequencies();
    for (std::size_t measured = 0; measured < dim; ++measured) c[measured * dim + prepared] = freq[measured];
  }
  return CalibrationMatrix(n, std::move(c), shots);
}

namespace {
Eigen::MatrixXd as_eigen(const CalibrationMatrix& cal) {
  const auto dim = static_cast<Eigen::Index>(cal.dim());
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      m(i, j) = cal(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}
}  // namespace

double condition_number(const CalibrationMatrix& cal) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_eigen(cal));
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

std::vector<double> mitigate_distribution(std::span<const double> frequencies, const CalibrationMatrix& cal) {
  if (frequencies.size() != cal.dim()) throw std::invalid_argument("distribution length does not match calibration");
  const Eigen::MatrixXd c = as_eigen(cal);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream os;
    os << "calibration matrix is singular (condition number " << cond << ")";
    throw std::runtime_error(os.str());
  }
  Eigen::VectorXd f(static_cast<Eigen::Index>(frequencies.size()));
  for (std::size_t i = 0; i < frequencies.size(); ++i) f(static_cast<Eigen::Index>(i)) = frequencies[i];
  const Eigen::VectorXd x = svd.solve(f);

  std::vector<double> out(frequencies.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::max(x(static_cast<Eigen::Index>(i)), 0.0);
    total += out[i];
  }
  if (total <= 0.0) throw std::runtime_error("mitigated distribution has no positive mass");
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> mitigate_counts(const Counts& counts, const CalibrationMatrix& cal) {
  if (counts.n_qubits != cal.n_qubits()) throw std::invalid_argument("counts width does not match calibration");
  const auto f = counts.frequencies();
  return mitigate_distribution(f, cal);
}

void ZneSchedule::validate() const {
  if (scales.size() < 2) throw std::invalid_argument("ZNE needs at least two scale factors");
  if (scales.front() != 1) throw std::invalid_argument("ZNE scale factors must start at 1");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 1 || scales[i] % 2 == 0) throw std::invalid_argument("ZNE scale factors must be odd");
    if (i > 0 && scales[i] <= scales[i - 1]) throw std::invalid_argument("ZNE scale factors must increase");
  }
}

Circuit fold_circuit(const Circuit& c, int scale) {
  if (scale < 1 || scale % 2 == 0) throw std::invalid_argument("fold scale must be an odd positive integer");
  Circuit out = c;
  const Circuit inv = adjoint(c);
  for (int k = 0; k < (scale - 1) / 2; ++k) {
    out.append(inv);
    out.append(c);
  }
  return out;
}

double zne_expectation(const std::map<int, double>& points) {
  if (points.size() < 2) throw std::invalid_argument("zero-noise extrapolation needs at least two points");
  double result = 0.0;
  for (const auto& [xi, yi] : points) {
    double w = 1.0;
    for (const auto& [xj, yj] : points)
      if (xj != xi) w *= (0.0 - xj) / static_cast<double>(xi - xj);
    result += w * yi;
  }
  return result;
}

double zne_expectation(const std::map<int, double>& points, const ZneSchedule& schedule) {
  schedule.validate();
  std::map<int, double> used;
  for (int s : schedule.scales) {
    auto it = points.find(s);
    if (it == points.end()) throw std::invalid_argument("missing energy for ZNE scale " + std::to_string(s));
    used.emplace(s, it->second);
  }
  return zne_expectation(used);
}

}  // namespace qbands
