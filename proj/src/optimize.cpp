#include "qbands/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "qbands/rng.hpp"

namespace qbands {

void OptimizerConfig::validate(std::size_t dim) const {
  if (!(rho_end > 0.0) || !(rho_begin > rho_end))
    throw std::invalid_argument("optimizer radii must satisfy rho_begin > rho_end > 0");
  if (budget(dim) < dim + 2) throw std::invalid_argument("optimizer evaluation budget must be at least dim + 2");
}

namespace {

using Matrix = std::vector<std::vector<double>>;

// Gauss-Jordan inverse with partial pivoting; nullopt when singular.
std::optional<Matrix> invert(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

class Cobyla {
 public:
  Cobyla(const Objective& f, std::vector<double> start, const OptimizerConfig& cfg, std::vector<TraceEntry>* trace)
      : f_(f), n_(start.size()), cfg_(cfg), budget_(cfg.budget(start.size())), trace_(trace), pole_(std::move(start)) {}

  OptimizationResult run() {
    rho_ = cfg_.rho_begin;
    fpole_ = eval(pole_);
    build_simplex();

    bool converged = false;
    // Set after a successful trust step: keep stepping before touching geometry.
    bool stepping = false;
    while (evals_ < budget_) {
      promote_best_vertex();
      auto inv = invert(sim_);
      if (!inv) {
        build_simplex();
        stepping = false;
        continue;
      }
      // Linear model gradient: sim_ · g = f_j − f_pole.
      std::vector<double> g(n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) g[i] += (*inv)[i][j] * (fsim_[j] - fpole_);

      const auto bad = worst_vertex(*inv);
      if (bad && !stepping) {
        geometry_step(*bad, *inv, g);
        stepping = true;
        continue;
      }

      const double gnorm = norm2(g);
      if (gnorm > 0.0) {
        std::vector<double> d(n_);
        for (std::size_t i = 0; i < n_; ++i) d[i] = -rho_ * g[i] / gnorm;
        const double predicted = rho_ * gnorm;
        const double ft = eval(add(pole_, d));
        const double actual = fpole_ - ft;
        replace_vertex(*inv, d, ft, actual > 0.0);
        if (actual >= 0.1 * predicted) {
          stepping = true;
          continue;
        }
      }
      // Failed step: repair the simplex first if it was poorly shaped.
      if (bad) {
        stepping = false;
        continue;
      }
      if (rho_ <= cfg_.rho_end) {
        converged = true;
        break;
      }
      rho_ *= 0.5;
      if (rho_ <= 1.5 * cfg_.rho_end) rho_ = cfg_.rho_end;
      stepping = false;
    }
    OptimizationResult r;
    r.x = best_x_;
    r.value = best_f_;
    r.evaluations = evals_;
    r.converged = converged;
    return r;
  }

 private:
  std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) const {
    std::vector<double> r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
  }

  double eval(const std::vector<double>& x) {
    const double v = f_(x);
    ++evals_;
    if (trace_) trace_->push_back({evals_, x, v});
    if (evals_ == 1 || v < best_f_) {
      best_f_ = v;
      best_x_ = x;
    }
    return v;
  }

  void build_simplex() {
    sim_.assign(n_, std::vector<double>(n_, 0.0));
    fsim_.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_ && evals_ < budget_; ++j) {
      sim_[j][j] = rho_;
      fsim_[j] = eval(add(pole_, sim_[j]));
    }
  }

  // Keeps the lowest recorded value at the pole.
  void promote_best_vertex() {
    std::size_t best = n_;
    double fbest = fpole_;
    for (std::size_t j = 0; j < n_; ++j)
      if (fsim_[j] < fbest) {
        fbest = fsim_[j];
        best = j;
      }
    if (best == n_) return;
    const std::vector<double> shift = sim_[best];
    pole_ = add(pole_, shift);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == best) continue;
      for (std::size_t i = 0; i < n_; ++i) sim_[j][i] -= shift[i];
    }
    for (std::size_t i = 0; i < n_; ++i) sim_[best][i] = -shift[i];
    std::swap(fsim_[best], fpole_);
  }

  // Vertex violating the distance (η > 2.1ρ) or flatness (σ < 0.25ρ) tests.
  std::optional<std::size_t> worst_vertex(const Matrix& inv) const {
    std::optional<std::size_t> far, flat;
    double far_len = 2.1 * rho_, flat_sig = 0.25 * rho_;
    for (std::size_t j = 0; j < n_; ++j) {
      const double eta = norm2(sim_[j]);
      double col = 0.0;
      for (std::size_t i = 0; i < n_; ++i) col += inv[i][j] * inv[i][j];
      const double sigma = 1.0 / std::sqrt(col);
      if (eta > far_len) {
        far_len = eta;
        far = j;
      }
      if (sigma < flat_sig) {
        flat_sig = sigma;
        flat = j;
      }
    }
    return far ? far : flat;
  }

  // Moves vertex j to distance ρ/2 from the pole along the normal of the
  // opposite face, on the side the linear model prefers.
  void geometry_step(std::size_t j, const Matrix& inv, const std::vector<double>& g) {
    std::vector<double> d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = inv[i][j];
    const double len = norm2(d);
    double slope = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      d[i] *= 0.5 * rho_ / len;
      slope += g[i] * d[i];
    }
    if (slope > 0.0)
      for (double& x : d) x = -x;
    sim_[j] = d;
    fsim_[j] = eval(add(pole_, d));
  }

  // An improving trial point replaces the vertex farthest from it among those
  // with a sizeable barycentric weight, else the largest-weight vertex. A
  // worse point only enters when it improves the simplex volume.
  void replace_vertex(const Matrix& inv, const std::vector<double>& d, double ft, bool improved) {
    std::vector<double> lambda(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < n_; ++i) lambda[j] += inv[i][j] * d[i];

    std::optional<std::size_t> pick;
    double best = improved ? 0.0 : 1.0;
    for (std::size_t j = 0; j < n_; ++j)
      if (std::abs(lambda[j]) > best) {
        best = std::abs(lambda[j]);
        pick = j;
      }
    if (improved) {
      double far = 1.1 * rho_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(lambda[j]) < 0.1) continue;
        std::vector<double> diff(n_);
        for (std::size_t i = 0; i < n_; ++i) diff[i] = sim_[j][i] - d[i];
        const double dist = norm2(diff);
        if (dist > far) {
          far = dist;
          pick = j;
        }
      }
    }
    if (!pick) return;
    sim_[*pick] = d;
    fsim_[*pick] = ft;
  }

  const Objective& f_;
  std::size_t n_;
  OptimizerConfig cfg_;
  std::size_t budget_;
  std::vector<TraceEntry>* trace_;

  std::vector<double> pole_;
  double fpole_ = 0.0;
  Matrix sim_;  // row j: vertex j relative to the pole
  std::vector<double> fsim_;
  double rho_ = 0.0;
  std::size_t evals_ = 0;
  std::vector<double> best_x_;
  double best_f_ = 0.0;
};

}  // namespace

OptimizationResult minimize(const Objective& f, std::vector<double> start, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace) {
  if (start.empty()) throw std::invalid_argument("minimize needs at least one parameter");
  config.validate(start.size());
  return Cobyla(f, std::move(start), config, trace).run();
}

OptimizationResult minimize(const Objective& f, std::size_t dim, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace) {
  return minimize(f, random_init(dim, config.seed), config, trace);
}

OptimizationResult maximize(const Objective& f, std::vector<double> start, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace) {
  const Objective neg = [&f](std::span<const double> x) { return -f(x); };
  OptimizationResult r = minimize(neg, std::move(start), config, trace);
  r.value = -r.value;
  if (trace)
    for (auto& t : *trace) t.value = -t.value;
  return r;
}

OptimizationResult maximize(const Objective& f, std::size_t dim, const OptimizerConfig& config,
                            std::vector<TraceEntry>* trace) {
  return maximize(f, random_init(dim, config.seed), config, trace);
}

std::vector<double> random_init(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> x(dim);
  for (double& v : x) v = u(rng);
  return x;
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::ostringstream os;
  os.precision(12);
  os << "eval,value";
  const std::size_t dim = trace.empty() ? 0 : trace.front().x.size();
  for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
  os << "\n";
  for (const auto& t : trace) {
    os << t.index << "," << t.value;
    for (double v : t.x) os << "," << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace qbands
