#include "qbands/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qbands {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::operator*(const CMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
  CMatrix r(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const cplx a = (*this)(i, k);
      if (a == cplx{}) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) r(i, j) += a * rhs(k, j);
    }
  return r;
}

CMatrix CMatrix::operator+(const CMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("matrix sum: dimension mismatch");
  CMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += rhs.data_[i];
  return r;
}

CMatrix CMatrix::operator-(const CMatrix& rhs) const { return *this + rhs * cplx{-1.0}; }

CMatrix CMatrix::operator*(cplx s) const {
  CMatrix r = *this;
  for (auto& x : r.data_) x *= s;
  return r;
}

std::vector<cplx> CMatrix::operator*(std::span<const cplx> v) const {
  if (v.size() != cols_) throw std::invalid_argument("matrix-vector product: dimension mismatch");
  std::vector<cplx> r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
  return r;
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

double CMatrix::frobenius() const {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return std::sqrt(s);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return r;
}

bool HermitianMatrix::is_hermitian(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.max_abs(), 1.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > rel_tol * scale) return false;
  return true;
}

HermitianMatrix::HermitianMatrix(CMatrix m, double rel_tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("HermitianMatrix: matrix is not square");
  if (!is_hermitian(m_, rel_tol)) throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian");
}

namespace {

// Implicit QL with Wilkinson-style shifts on a real symmetric tridiagonal
// matrix. d: diagonal, e[i]: coupling between i and i+1 (e[n-1] unused).
// Rotations are accumulated into the columns of z (row-major n x n).
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("eigh: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z[k * n + i + 1];
            z[k * n + i + 1] = s * z[k * n + i] + c * f;
            z[k * n + i] = c * z[k * n + i] - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

EigenSystem eigh(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  CMatrix a = h.matrix();
  CMatrix q = CMatrix::identity(n);

  // Householder: zero out column k below the subdiagonal.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    std::vector<cplx> v(m);
    double xnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = a(k + 1 + i, k);
      xnorm2 += std::norm(v[i]);
    }
    double tail2 = xnorm2 - std::norm(v[0]);
    if (tail2 <= 0.0) continue;
    const double xnorm = std::sqrt(xnorm2);
    const cplx phase = std::abs(v[0]) > 0.0 ? v[0] / std::abs(v[0]) : cplx{1.0};
    v[0] += phase * xnorm;
    double vnorm2 = 0.0;
    for (const auto& x : v) vnorm2 += std::norm(x);
    if (vnorm2 == 0.0) continue;

    // P = I - 2 v v† / (v†v) on the trailing block; A <- P A P, Q <- Q P.
    CMatrix p = CMatrix::identity(n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) p(k + 1 + i, k + 1 + j) -= 2.0 * v[i] * std::conj(v[j]) / vnorm2;
    a = p * a * p;
    q = q * p;
  }

  // Diagonal unitary making the off-diagonal real and non-negative.
  std::vector<double> d(n), e(n, 0.0);
  std::vector<cplx> phase(n, cplx{1.0});
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx sub = a(i + 1, i);
    const double mag = std::abs(sub);
    e[i] = mag;
    phase[i + 1] = mag > 0.0 ? phase[i] * (sub / mag) : phase[i];
  }

  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  tridiagonal_ql(d, e, z);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

  EigenSystem out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.values[col] = d[src];
    // v = Q D z
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc{};
      for (std::size_t j = 0; j < n; ++j) acc += q(i, j) * phase[j] * z[j * n + src];
      out.vectors(i, col) = acc;
    }
  }
  return out;
}

std::vector<double> eigvalsh(const HermitianMatrix& h) { return eigh(h).values; }

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const CMatrix p = u.adjoint() * u;
  return (p - CMatrix::identity(u.rows())).max_abs() <= tol;
}

}  // namespace qbands
