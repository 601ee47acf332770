#include "qbands/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qbands {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}
}  // namespace

const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::Rx: return "Rx";
    case GateKind::Ry: return "Ry";
    case GateKind::Rz: return "Rz";
    case GateKind::Phase: return "Phase";
    case GateKind::CNOT: return "CNOT";
    case GateKind::GlobalPhase: return "GlobalPhase";
    case GateKind::Unitary1: return "U1";
    case GateKind::Unitary2: return "U2";
  }
  return "?";
}

Gate Gate::unitary_gate(std::vector<int> targets, CMatrix u) {
  const std::size_t dim = std::size_t{1} << targets.size();
  if (targets.empty() || targets.size() > 2 || u.rows() != dim || u.cols() != dim)
    throw std::invalid_argument("explicit gate matrix must be 2x2 on one qubit or 4x4 on two");
  if (!is_unitary(u, 1e-10)) throw std::invalid_argument("explicit gate matrix is not unitary");
  Gate g{targets.size() == 1 ? GateKind::Unitary1 : GateKind::Unitary2, std::move(targets)};
  g.unitary = std::move(u);
  return g;
}

CMatrix Gate::base_matrix() const {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const double r = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case GateKind::X:
    case GateKind::CNOT: return mat2(0, 1, 1, 0);
    case GateKind::H: return mat2(r, r, r, -r);
    case GateKind::S: return mat2(1, 0, 0, kI);
    case GateKind::Sdg: return mat2(1, 0, 0, -kI);
    case GateKind::Rx: return mat2(c, -kI * s, -kI * s, c);
    case GateKind::Ry: return mat2(c, -s, s, c);
    case GateKind::Rz: return mat2(std::polar(1.0, -angle / 2.0), 0, 0, std::polar(1.0, angle / 2.0));
    case GateKind::Phase: return mat2(1, 0, 0, std::polar(1.0, angle));
    case GateKind::GlobalPhase: {
      CMatrix m(1, 1);
      m(0, 0) = std::polar(1.0, angle);
      return m;
    }
    case GateKind::Unitary1:
    case GateKind::Unitary2: return unitary;
  }
  throw std::logic_error("unknown gate kind");
}

Gate Gate::adjoint() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::Phase:
    case GateKind::GlobalPhase: g.angle = -angle; break;
    case GateKind::Unitary1:
    case GateKind::Unitary2: g.unitary = unitary.adjoint(); break;
    default: break;
  }
  return g;
}

std::vector<int> Gate::touched() const {
  std::vector<int> q = controls;
  q.insert(q.end(), targets.begin(), targets.end());
  return q;
}

std::string Gate::to_string() const {
  std::ostringstream os;
  os.precision(12);
  os << qbands::to_string(kind);
  switch (kind) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::Phase:
    case GateKind::GlobalPhase: os << "(" << angle << ")"; break;
    default: break;
  }
  for (int c : controls) os << " c" << c;
  for (int t : targets) os << " q" << t;
  return os.str();
}

Circuit::Circuit(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("negative qubit count");
}

Circuit& Circuit::append(Gate g) {
  const std::size_t expected = g.kind == GateKind::GlobalPhase ? 0 : (g.kind == GateKind::Unitary2 ? 2 : 1);
  if (g.targets.size() != expected) throw std::invalid_argument(std::string("wrong target count for gate ") + qbands::to_string(g.kind));
  if (g.kind == GateKind::CNOT && g.controls.empty()) throw std::invalid_argument("CNOT needs a control qubit");
  if (!std::isfinite(g.angle)) throw std::invalid_argument("gate angle is not finite");
  auto qs = g.touched();
  for (int q : qs)
    if (q < 0 || q >= n_) throw std::invalid_argument("gate qubit " + std::to_string(q) + " out of range");
  std::sort(qs.begin(), qs.end());
  if (std::adjacent_find(qs.begin(), qs.end()) != qs.end())
    throw std::invalid_argument("gate acts twice on the same qubit: " + g.to_string());
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_ != n_) throw std::invalid_argument("cannot append circuits of different width");
  gates_.reserve(gates_.size() + other.gates_.size());
  for (const auto& g : other.gates_) gates_.push_back(g);
  return *this;
}

std::size_t Circuit::entangling_count() const {
  return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) {
    return g.touched().size() >= 2;
  }));
}

std::string Circuit::dump() const {
  std::ostringstream os;
  os << "qubits " << n_ << "\n";
  for (const auto& g : gates_) os << g.to_string() << "\n";
  return os.str();
}

CMatrix Circuit::unitary() const {
  if (n_ > 10) throw std::invalid_argument("dense unitary limited to 10 qubits");
  const std::size_t dim = std::size_t{1} << n_;
  CMatrix u = CMatrix::identity(dim);
  auto bit = [this](int q) { return std::size_t{1} << (n_ - 1 - q); };
  for (const auto& g : gates_) {
    std::size_t cmask = 0;
    for (int c : g.controls) cmask |= bit(c);
    const CMatrix base = g.base_matrix();
    CMatrix gm(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
      if ((col & cmask) != cmask) {
        gm(col, col) = 1.0;
        continue;
      }
      // local index of col on the targets (first target is most significant)
      std::size_t local = 0;
      std::size_t tmask = 0;
      for (int t : g.targets) {
        local = (local << 1) | ((col & bit(t)) ? 1 : 0);
        tmask |= bit(t);
      }
      const std::size_t k = g.targets.size();
      for (std::size_t out = 0; out < (std::size_t{1} << k); ++out) {
        std::size_t row = col & ~tmask;
        for (std::size_t j = 0; j < k; ++j)
          if (out >> (k - 1 - j) & 1U) row |= bit(g.targets[j]);
        gm(row, col) += base(out, local);
      }
    }
    u = gm * u;
  }
  return u;
}

Circuit adjoint(const Circuit& c) {
  Circuit r(c.n_qubits());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) r.append(it->adjoint());
  return r;
}

Circuit compose(const Circuit& c1, const Circuit& c2) {
  Circuit r = c1;
  r.append(c2);
  return r;
}

Circuit a_gate(double theta, double phi, int n_qubits, int a, int b) {
  Circuit c(n_qubits);
  c.append(Gate::cnot(a, b));
  c.append(Gate::rz(a, -(phi + kPi)));
  c.append(Gate::ry(a, -(theta + kPi / 2.0)));
  c.append(Gate::cnot(b, a));
  c.append(Gate::ry(a, theta + kPi / 2.0));
  c.append(Gate::rz(a, phi + kPi));
  c.append(Gate::cnot(a, b));
  return c;
}

AnsatzSpec::AnsatzSpec(std::size_t num_qubits, std::vector<double> params) : m_(num_qubits), params_(std::move(params)) {
  if (m_ < 1) throw std::invalid_argument("ansatz needs at least one qubit");
  if (params_.size() != num_params(m_))
    throw std::invalid_argument("ansatz on " + std::to_string(m_) + " qubits takes " + std::to_string(num_params(m_)) +
                                " parameters, got " + std::to_string(params_.size()));
}

Circuit build_ansatz(const AnsatzSpec& spec) {
  const int m = static_cast<int>(spec.num_qubits());
  Circuit c(m);
  c.append(Gate::x(0));
  for (int j = 1; j < m; ++j) {
    const std::size_t ti = 2 * static_cast<std::size_t>(j - 1);
    Circuit ag = a_gate(spec.params()[ti], spec.params()[ti + 1], m, j - 1, j);
    for (Gate g : ag.gates()) {
      if (g.kind == GateKind::Ry) g.param_index = static_cast<int>(ti);
      if (g.kind == GateKind::Rz) g.param_index = static_cast<int>(ti + 1);
      c.append(std::move(g));
    }
  }
  return c;
}

Circuit basis_rotation(const PauliWord& word) {
  const int n = static_cast<int>(word.size());
  Circuit c(n);
  for (int q = 0; q < n; ++q) {
    if (word[q] == 'X') {
      c.append(Gate::h(q));
    } else if (word[q] == 'Y') {
      c.append(Gate::sdg(q));
      c.append(Gate::h(q));
    }
  }
  return c;
}

Circuit pauli_exponential(const PauliWord& word, double theta) {
  const int n = static_cast<int>(word.size());
  Circuit c(n);
  std::vector<int> active;
  for (int q = 0; q < n; ++q)
    if (word[q] != 'I') active.push_back(q);
  if (active.empty()) {
    c.append(Gate::global_phase(theta));
    return c;
  }
  const Circuit rot = basis_rotation(word);
  c.append(rot);
  for (std::size_t i = 0; i + 1 < active.size(); ++i) c.append(Gate::cnot(active[i], active[i + 1]));
  // exp(iθ Z) = Rz(−2θ) on the parity qubit
  c.append(Gate::rz(active.back(), -2.0 * theta));
  for (std::size_t i = active.size() - 1; i > 0; --i) c.append(Gate::cnot(active[i - 1], active[i]));
  c.append(adjoint(rot));
  return c;
}

Circuit trotter_evolution(const PauliSum& h, double tau, int slices) {
  if (slices < 1) throw std::invalid_argument("trotter_evolution needs at least one slice");
  const int n = static_cast<int>(h.n_qubits());
  Circuit slice(n);
  const double dt = tau / static_cast<double>(slices);
  for (const auto& t : h.terms()) slice.append(pauli_exponential(t.word, t.coeff * dt));
  Circuit c(n);
  for (int s = 0; s < slices; ++s) c.append(slice);
  return c;
}

Circuit embed(const Circuit& c, int n_qubits, int offset) {
  if (offset < 0 || offset + c.n_qubits() > n_qubits) throw std::invalid_argument("embed: circuit does not fit");
  Circuit r(n_qubits);
  for (Gate g : c.gates()) {
    for (int& q : g.targets) q += offset;
    for (int& q : g.controls) q += offset;
    r.append(std::move(g));
  }
  return r;
}

Circuit controlled(const Circuit& c) {
  Circuit shifted = embed(c, c.n_qubits() + 1, 1);
  Circuit r(c.n_qubits() + 1);
  for (Gate g : shifted.gates()) {
    g.controls.insert(g.controls.begin(), 0);
    r.append(std::move(g));
  }
  return r;
}

}  // namespace qbands
