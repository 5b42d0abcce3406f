#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "marginopt/errors.hpp"

namespace marginopt::linalg {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

/// Dense real matrix, row-major. Constructors taking data reject non-finite
/// entries; the default-value constructor zero-fills.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}
  RealMatrix(std::size_t rows, std::size_t cols, RealVector entries);

  static RealMatrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  const RealVector& entries() const { return entries_; }
  RealVector& entries() { return entries_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  RealVector entries_;
};

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, Complex(0.0, 0.0)) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, ComplexVector entries);

  Complex& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  Complex operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  const ComplexVector& entries() const { return entries_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ComplexVector entries_;
};

/// Eigenvalues (and optionally unit-norm eigenvectors) of a square matrix.
/// Non-real eigenvalues of real inputs come in exact conjugate pairs.
struct Spectrum {
  ComplexVector eigenvalues;
  std::vector<ComplexVector> eigenvectors;  // empty unless requested

  bool has_vectors() const { return !eigenvectors.empty(); }
};

/// Eigendecomposition of a symmetric matrix in real arithmetic:
/// values ascending, eigenvectors as orthonormal columns of `vectors`.
struct SymEigResult {
  RealVector values;
  RealMatrix vectors;
};

// --- basic arithmetic -------------------------------------------------------

RealMatrix multiply(const RealMatrix& a, const RealMatrix& b);
RealVector multiply(const RealMatrix& a, const RealVector& x);
ComplexVector multiply(const RealMatrix& a, const ComplexVector& x);

double dot(const RealVector& a, const RealVector& b);
/// Unconjugated bilinear form sum_i a_i * b_i (not the Hermitian inner
/// product); this is the form that appears in the norm constraint.
Complex bilinear_dot(const ComplexVector& a, const ComplexVector& b);

double norm2(const RealVector& v);
double norm2(const ComplexVector& v);
double frobenius_norm(const RealMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
double max_abs(const RealMatrix& a);

/// Determinant by LU with partial pivoting; returns 0 for singular input.
double determinant(const RealMatrix& a);

// --- linear solves ----------------------------------------------------------

/// LU factorization with partial pivoting. Factorization never throws;
/// `singular()` reports a pivot below 1e-14 * maxabs(A) and solve() then
/// raises SingularSystemError carrying the pivot index.
class ComplexLu {
 public:
  explicit ComplexLu(const ComplexMatrix& a);

  bool singular() const { return singular_; }
  std::size_t pivot_index() const { return pivot_index_; }
  /// Cheap conditioning screen: max|U_ii| / min|U_ii| (inf when singular).
  double condition_proxy() const;
  ComplexVector solve(const ComplexVector& b) const;

 private:
  std::size_t n_ = 0;
  ComplexVector lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
  std::size_t pivot_index_ = 0;
};

class RealLu {
 public:
  explicit RealLu(const RealMatrix& a);

  bool singular() const { return singular_; }
  std::size_t pivot_index() const { return pivot_index_; }
  double determinant() const;
  RealVector solve(const RealVector& b) const;

 private:
  std::size_t n_ = 0;
  RealVector lu_;
  std::vector<std::size_t> perm_;
  int perm_sign_ = 1;
  bool singular_ = false;
  std::size_t pivot_index_ = 0;
};

/// Row-pivoted complex solve; throws SingularSystemError on a tiny pivot.
ComplexVector solve_complex(const ComplexMatrix& a, const ComplexVector& b);
RealVector solve_real(const RealMatrix& a, const RealVector& b);

// --- eigensolvers -----------------------------------------------------------

/// Symmetric eigendecomposition (Householder tridiagonalization followed by
/// implicit-shift QL). Values ascending, vectors orthonormal, each column
/// sign-fixed so its first nonzero component is positive. `tol` bounds the
/// relative Frobenius reconstruction error, checked before returning.
SymEigResult sym_eig_decomposition(const RealMatrix& s, double tol = 1e-10);

/// Spec-shaped wrapper around sym_eig_decomposition.
Spectrum sym_eig(const RealMatrix& s, double tol = 1e-10);

/// All eigenvalues of a general real square matrix: balance, Householder
/// Hessenberg reduction, Francis double-shift QR with deflation. Eigenvalues
/// sorted by (Re, Im). With `want_vectors`, eigenvectors are recovered by
/// inverse iteration on the original matrix and validated against
/// ||Mv - mu v|| <= tol * ||M||_F.
Spectrum general_eig(const RealMatrix& m, bool want_vectors = false,
                     double tol = 1e-8, int max_sweeps_per_dim = 40);

/// Scale-relative threshold below which an imaginary part counts as zero.
inline double imag_tolerance(double scale, double coeff = 1e-9) {
  return coeff * (1.0 + scale);
}

}  // namespace marginopt::linalg
