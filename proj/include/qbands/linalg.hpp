#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qbands {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double norm(const Vec3& a);

/// Dense row-major complex matrix. Small sizes only (Bloch matrices, gate matrices).
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const cplx> data() const { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix operator*(const CMatrix& rhs) const;
  CMatrix operator+(const CMatrix& rhs) const;
  CMatrix operator-(const CMatrix& rhs) const;
  CMatrix operator*(cplx s) const;
  std::vector<cplx> operator*(std::span<const cplx> v) const;

  /// Largest absolute entry.
  double max_abs() const;
  /// Frobenius norm.
  double frobenius() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Kronecker product a ⊗ b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Square matrix that is self-adjoint within tolerance; construction validates.
class HermitianMatrix {
 public:
  /// Throws std::invalid_argument if `m` is not square or |m - m†| exceeds
  /// `rel_tol` relative to the largest entry.
  explicit HermitianMatrix(CMatrix m, double rel_tol = 1e-12);

  std::size_t dim() const { return m_.rows(); }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const CMatrix& matrix() const { return m_; }

  static bool is_hermitian(const CMatrix& m, double rel_tol = 1e-12);

 private:
  CMatrix m_;
};

struct EigenSystem {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column j pairs with values[j]
};

/// Householder reduction to real tridiagonal form followed by implicit QL.
EigenSystem eigh(const HermitianMatrix& h);
std::vector<double> eigvalsh(const HermitianMatrix& h);

/// Unitary within `tol` (max-abs deviation of U†U from I).
bool is_unitary(const CMatrix& u, double tol = 1e-10);

}  // namespace qbands
