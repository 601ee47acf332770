#include "qbands/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace qbands {

PauliWord::PauliWord(std::string letters) : letters_(std::move(letters)) {
  for (char c : letters_)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      throw std::invalid_argument("Pauli word has invalid letter '" + std::string(1, c) + "'");
  if (letters_.size() > 63) throw std::invalid_argument("Pauli word longer than 63 qubits");
}

bool PauliWord::is_identity() const {
  return std::all_of(letters_.begin(), letters_.end(), [](char c) { return c == 'I'; });
}

bool PauliWord::is_diagonal() const {
  return std::all_of(letters_.begin(), letters_.end(), [](char c) { return c == 'I' || c == 'Z'; });
}

std::uint64_t PauliWord::x_mask() const {
  std::uint64_t m = 0;
  const std::size_t n = letters_.size();
  for (std::size_t q = 0; q < n; ++q)
    if (letters_[q] == 'X' || letters_[q] == 'Y') m |= std::uint64_t{1} << (n - 1 - q);
  return m;
}

std::uint64_t PauliWord::z_mask() const {
  std::uint64_t m = 0;
  const std::size_t n = letters_.size();
  for (std::size_t q = 0; q < n; ++q)
    if (letters_[q] == 'Z' || letters_[q] == 'Y') m |= std::uint64_t{1} << (n - 1 - q);
  return m;
}

int PauliWord::num_y() const { return static_cast<int>(std::count(letters_.begin(), letters_.end(), 'Y')); }

PauliWord PauliWord::with(std::size_t q, char letter) const {
  std::string s = letters_;
  s.at(q) = letter;
  return PauliWord(std::move(s));
}

bool qubitwise_commutes(const PauliWord& a, const PauliWord& b) {
  if (a.size() != b.size()) throw std::invalid_argument("qubitwise_commutes: word lengths differ");
  for (std::size_t q = 0; q < a.size(); ++q)
    if (a[q] != 'I' && b[q] != 'I' && a[q] != b[q]) return false;
  return true;
}

PauliSum::PauliSum(std::size_t n_qubits, const std::vector<PauliTerm>& terms) : n_(n_qubits) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<PauliTerm> merged;
  for (const auto& t : terms) {
    if (t.word.size() != n_) throw std::invalid_argument("PauliSum: word length does not match qubit count");
    if (!std::isfinite(t.coeff)) throw std::invalid_argument("PauliSum: non-finite coefficient");
    auto [it, fresh] = index.emplace(t.word.str(), merged.size());
    if (fresh)
      merged.push_back(t);
    else
      merged[it->second].coeff += t.coeff;
  }
  for (auto& t : merged)
    if (std::abs(t.coeff) >= kPruneThreshold) terms_.push_back(std::move(t));
}

double PauliSum::identity_coeff() const {
  for (const auto& t : terms_)
    if (t.word.is_identity()) return t.coeff;
  return 0.0;
}

PauliSum PauliSum::scaled(double s) const {
  std::vector<PauliTerm> t = terms_;
  for (auto& x : t) x.coeff *= s;
  return PauliSum(n_, t);
}

PauliSum PauliSum::plus_identity(double shift) const {
  std::vector<PauliTerm> t = terms_;
  t.push_back({shift, PauliWord::identity(n_)});
  return PauliSum(n_, t);
}

std::string PauliSum::to_string() const {
  std::ostringstream os;
  os.precision(12);
  for (const auto& t : terms_) os << t.coeff << " " << t.word.str() << "\n";
  return os.str();
}

PauliSum map_hamiltonian(const HermitianMatrix& h) {
  const std::size_t m = h.dim();
  auto word = [m](std::initializer_list<std::pair<std::size_t, char>> letters) {
    std::string s(m, 'I');
    for (auto [q, c] : letters) s[q] = c;
    return PauliWord(std::move(s));
  };

  std::vector<PauliTerm> terms;
  double trace = 0.0;
  for (std::size_t a = 0; a < m; ++a) trace += h(a, a).real();
  terms.push_back({0.5 * trace, PauliWord::identity(m)});
  for (std::size_t a = 0; a < m; ++a) terms.push_back({-0.5 * h(a, a).real(), word({{a, 'Z'}})});

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) terms.push_back({0.5 * h(a, b).real(), word({{a, 'X'}, {b, 'X'}})});
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) terms.push_back({0.5 * h(a, b).real(), word({{a, 'Y'}, {b, 'Y'}})});
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) terms.push_back({0.5 * h(a, b).imag(), word({{a, 'Y'}, {b, 'X'}})});
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) terms.push_back({-0.5 * h(a, b).imag(), word({{a, 'X'}, {b, 'Y'}})});
  return PauliSum(m, terms);
}

CommutingPartition partition(const PauliSum& sum) {
  CommutingPartition out;
  std::vector<std::string> basis;  // union letters per group
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const auto& w = sum[i].word;
    bool placed = false;
    for (std::size_t g = 0; g < basis.size() && !placed; ++g) {
      if (!qubitwise_commutes(w, PauliWord(basis[g]))) continue;
      for (std::size_t q = 0; q < w.size(); ++q)
        if (w[q] != 'I') basis[g][q] = w[q];
      out.groups[g].push_back(i);
      placed = true;
    }
    if (!placed) {
      basis.push_back(w.str());
      out.groups.push_back({i});
    }
  }
  return out;
}

PauliWord measurement_basis(const std::vector<PauliWord>& words) {
  if (words.empty()) throw std::invalid_argument("measurement_basis: empty group");
  std::string basis(words.front().size(), 'I');
  for (const auto& w : words) {
    if (w.size() != basis.size()) throw std::invalid_argument("measurement_basis: word lengths differ");
    for (std::size_t q = 0; q < w.size(); ++q) {
      if (w[q] == 'I') continue;
      if (basis[q] != 'I' && basis[q] != w[q])
        throw std::invalid_argument("words do not commute qubit-wise: conflict at qubit " + std::to_string(q) +
                                    " in " + w.str());
      basis[q] = w[q];
    }
  }
  return PauliWord(std::move(basis));
}

PauliSum omega0(std::size_t n) {
  if (n < 1) throw std::invalid_argument("omega0 needs at least one qubit");
  if (n > 20) throw std::invalid_argument("omega0: too many qubits");
  const double w = std::ldexp(1.0, -static_cast<int>(n));
  std::vector<PauliTerm> terms;
  terms.reserve(std::size_t{1} << n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::string s(n, 'I');
    for (std::size_t q = 0; q < n; ++q)
      if (bits >> (n - 1 - q) & 1U) s[q] = 'Z';
    terms.push_back({w, PauliWord(std::move(s))});
  }
  return PauliSum(n, terms);
}

HermitianMatrix excitation_block(const PauliSum& sum) {
  const std::size_t n = sum.n_qubits();
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CMatrix block(n, n);
  for (const auto& t : sum.terms()) {
    const std::uint64_t xm = t.word.x_mask();
    const std::uint64_t zm = t.word.z_mask();
    const cplx yphase = ipow[t.word.num_y() % 4];
    for (std::size_t b = 0; b < n; ++b) {
      const std::uint64_t in = std::uint64_t{1} << (n - 1 - b);
      const std::uint64_t out = in ^ xm;
      if (std::popcount(out) != 1) continue;
      const auto a = static_cast<std::size_t>(n - 1 - std::countr_zero(out));
      const double sign = (std::popcount(in & zm) & 1) ? -1.0 : 1.0;
      block(a, b) += t.coeff * sign * yphase;
    }
  }
  return HermitianMatrix(block);
}

CMatrix matrix_of(const PauliWord& word) {
  const std::size_t n = word.size();
  if (n > 12) throw std::invalid_argument("matrix_of: more than 12 qubits");
  const std::uint64_t dim = std::uint64_t{1} << n;
  const std::uint64_t xm = word.x_mask();
  const std::uint64_t zm = word.z_mask();
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx yphase = ipow[word.num_y() % 4];
  CMatrix m(dim, dim);
  // P|b> = i^{#Y} (-1)^{|b & z|} |b ^ x>
  for (std::uint64_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
    m(b ^ xm, b) = yphase * sign;
  }
  return m;
}

CMatrix matrix_of(const PauliSum& sum) {
  const std::size_t n = sum.n_qubits();
  if (n > 12) throw std::invalid_argument("matrix_of: more than 12 qubits");
  const std::uint64_t dim = std::uint64_t{1} << n;
  CMatrix m(dim, dim);
  for (const auto& t : sum.terms()) m = m + matrix_of(t.word) * cplx{t.coeff};
  return m;
}

}  // namespace qbands
