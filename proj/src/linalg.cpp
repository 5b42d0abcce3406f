#include "marginopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "marginopt/rng.hpp"

namespace marginopt::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const RealMatrix& a, const char* who) {
  if (!a.square()) {
    throw DimensionError(std::string(who) + ": matrix is not square (" +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ")");
  }
}

bool all_finite(const RealVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool all_finite(const ComplexVector& v) {
  for (const Complex& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  }
  return true;
}

}  // namespace

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, RealVector entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionError("RealMatrix: entry count " +
                         std::to_string(entries_.size()) + " != " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (!all_finite(entries_)) {
    throw ValidationError("RealMatrix: non-finite entry");
  }
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             ComplexVector entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionError("ComplexMatrix: entry count " +
                         std::to_string(entries_.size()) + " != " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (!all_finite(entries_)) {
    throw ValidationError("ComplexMatrix: non-finite entry");
  }
}

// --- basic arithmetic -------------------------------------------------------

RealMatrix multiply(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: inner dimensions disagree");
  }
  RealMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

RealVector multiply(const RealMatrix& a, const RealVector& x) {
  if (a.cols() != x.size()) {
    throw DimensionError("multiply: matrix/vector dimensions disagree");
  }
  RealVector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

ComplexVector multiply(const RealMatrix& a, const ComplexVector& x) {
  if (a.cols() != x.size()) {
    throw DimensionError("multiply: matrix/vector dimensions disagree");
  }
  ComplexVector y(a.rows(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

double dot(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Complex bilinear_dot(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("bilinear_dot: length mismatch");
  }
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const RealVector& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double norm2(const ComplexVector& v) {
  double acc = 0.0;
  for (const Complex& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

double frobenius_norm(const RealMatrix& a) {
  double acc = 0.0;
  for (double x : a.entries()) acc += x * x;
  return std::sqrt(acc);
}

double frobenius_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (const Complex& x : a.entries()) acc += std::norm(x);
  return std::sqrt(acc);
}

double max_abs(const RealMatrix& a) {
  double m = 0.0;
  for (double x : a.entries()) m = std::max(m, std::abs(x));
  return m;
}

double determinant(const RealMatrix& a) {
  require_square(a, "determinant");
  RealLu lu(a);
  if (lu.singular()) return 0.0;
  return lu.determinant();
}

// --- LU factorizations ------------------------------------------------------

namespace {

// Doolittle LU with partial pivoting over either double or Complex.
template <typename T>
struct LuCore {
  std::size_t n = 0;
  std::vector<T> lu;
  std::vector<std::size_t> perm;
  int perm_sign = 1;
  bool singular = false;
  std::size_t pivot_index = 0;

  void factor(const std::vector<T>& entries, std::size_t dim) {
    n = dim;
    lu = entries;
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    double max_entry = 0.0;
    for (const T& x : lu) max_entry = std::max(max_entry, std::abs(x));
    const double pivot_floor = 1e-14 * max_entry;

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t best = k;
      double best_mag = std::abs(lu[k * n + k]);
      for (std::size_t i = k + 1; i < n; ++i) {
        double mag = std::abs(lu[i * n + k]);
        if (mag > best_mag) {
          best_mag = mag;
          best = i;
        }
      }
      if (best_mag <= pivot_floor || best_mag == 0.0) {
        singular = true;
        pivot_index = k;
        return;
      }
      if (best != k) {
        for (std::size_t j = 0; j < n; ++j) {
          std::swap(lu[k * n + j], lu[best * n + j]);
        }
        std::swap(perm[k], perm[best]);
        perm_sign = -perm_sign;
      }
      const T pivot = lu[k * n + k];
      for (std::size_t i = k + 1; i < n; ++i) {
        const T factor = lu[i * n + k] / pivot;
        lu[i * n + k] = factor;
        if (factor == T{}) continue;
        for (std::size_t j = k + 1; j < n; ++j) {
          lu[i * n + j] -= factor * lu[k * n + j];
        }
      }
    }
  }

  std::vector<T> solve(const std::vector<T>& b) const {
    if (singular) {
      throw SingularSystemError(
          "solve: numerically singular system (pivot column " +
              std::to_string(pivot_index) + ")",
          pivot_index);
    }
    if (b.size() != n) throw DimensionError("solve: rhs length mismatch");
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 1; i < n; ++i) {
      T acc = x[i];
      for (std::size_t j = 0; j < i; ++j) acc -= lu[i * n + j] * x[j];
      x[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
      T acc = x[i];
      for (std::size_t j = i + 1; j < n; ++j) acc -= lu[i * n + j] * x[j];
      x[i] = acc / lu[i * n + i];
    }
    return x;
  }
};

}  // namespace

ComplexLu::ComplexLu(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionError("ComplexLu: matrix is not square");
  LuCore<Complex> core;
  core.factor(a.entries(), a.rows());
  n_ = core.n;
  lu_ = std::move(core.lu);
  perm_ = std::move(core.perm);
  singular_ = core.singular;
  pivot_index_ = core.pivot_index;
}

double ComplexLu::condition_proxy() const {
  if (singular_ || n_ == 0) return std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double mag = std::abs(lu_[i * n_ + i]);
    lo = std::min(lo, mag);
    hi = std::max(hi, mag);
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

ComplexVector ComplexLu::solve(const ComplexVector& b) const {
  LuCore<Complex> view;
  view.n = n_;
  view.lu = lu_;
  view.perm = perm_;
  view.singular = singular_;
  view.pivot_index = pivot_index_;
  return view.solve(b);
}

RealLu::RealLu(const RealMatrix& a) {
  if (!a.square()) throw DimensionError("RealLu: matrix is not square");
  LuCore<double> core;
  core.factor(a.entries(), a.rows());
  n_ = core.n;
  lu_ = std::move(core.lu);
  perm_ = std::move(core.perm);
  perm_sign_ = core.perm_sign;
  singular_ = core.singular;
  pivot_index_ = core.pivot_index;
}

double RealLu::determinant() const {
  if (singular_) return 0.0;
  double det = perm_sign_;
  for (std::size_t i = 0; i < n_; ++i) det *= lu_[i * n_ + i];
  return det;
}

RealVector RealLu::solve(const RealVector& b) const {
  LuCore<double> view;
  view.n = n_;
  view.lu = lu_;
  view.perm = perm_;
  view.singular = singular_;
  view.pivot_index = pivot_index_;
  return view.solve(b);
}

ComplexVector solve_complex(const ComplexMatrix& a, const ComplexVector& b) {
  if (!a.square()) throw DimensionError("solve_complex: matrix is not square");
  if (a.rows() != b.size()) {
    throw DimensionError("solve_complex: rhs length mismatch");
  }
  return ComplexLu(a).solve(b);
}

RealVector solve_real(const RealMatrix& a, const RealVector& b) {
  if (!a.square()) throw DimensionError("solve_real: matrix is not square");
  if (a.rows() != b.size()) {
    throw DimensionError("solve_real: rhs length mismatch");
  }
  return RealLu(a).solve(b);
}

// --- symmetric eigensolver ---------------------------------------------------

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form with
// accumulation of the orthogonal transform (tred2 lineage). `q` holds the
// matrix on input and the accumulated transform on output.
void tridiagonalize(RealVector& q, std::size_t n, RealVector& diag,
                    RealVector& sub) {
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    double scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(q[i * n + k]);
      if (scale == 0.0) {
        sub[i] = q[i * n + l];
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          q[i * n + k] /= scale;
          h += q[i * n + k] * q[i * n + k];
        }
        double f = q[i * n + l];
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        sub[i] = scale * g;
        h -= f * g;
        q[i * n + l] = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          q[j * n + i] = q[i * n + j] / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += q[j * n + k] * q[i * n + k];
          for (std::size_t k = j + 1; k <= l; ++k) {
            g += q[k * n + j] * q[i * n + k];
          }
          sub[j] = g / h;
          f += sub[j] * q[i * n + j];
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = q[i * n + j];
          g = sub[j] - hh * f;
          sub[j] = g;
          for (std::size_t k = 0; k <= j; ++k) {
            q[j * n + k] -= f * sub[k] + g * q[i * n + k];
          }
        }
      }
    } else {
      sub[i] = q[i * n + l];
    }
    diag[i] = h;
  }
  diag[0] = 0.0;
  sub[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diag[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += q[i * n + k] * q[k * n + j];
        for (std::size_t k = 0; k < i; ++k) q[k * n + j] -= g * q[k * n + i];
      }
    }
    diag[i] = q[i * n + i];
    q[i * n + i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      q[j * n + i] = 0.0;
      q[i * n + j] = 0.0;
    }
  }
}

// Implicit-shift QL on a tridiagonal matrix, rotating the accumulated
// transform along (tql2 lineage).
void tridiagonal_ql(RealVector& diag, RealVector& sub, RealVector& q,
                    std::size_t n, int max_iter) {
  for (std::size_t i = 1; i < n; ++i) sub[i - 1] = sub[i];
  sub[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(sub[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (iter++ == max_iter) {
          throw ConvergenceError(
              "sym_eig: QL failed to converge after " +
                  std::to_string(max_iter) + " iterations at index " +
                  std::to_string(l),
              iter, l, m);
        }
        double g = (diag[l + 1] - diag[l]) / (2.0 * sub[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + sub[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * sub[i];
          const double b = c * sub[i];
          r = std::hypot(f, g);
          sub[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            sub[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = q[k * n + i + 1];
            q[k * n + i + 1] = s * q[k * n + i] + c * f;
            q[k * n + i] = c * q[k * n + i] - s * f;
          }
        }
        if (underflow) continue;
        diag[l] -= p;
        sub[l] = g;
        sub[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

SymEigResult sym_eig_decomposition(const RealMatrix& s, double tol) {
  require_square(s, "sym_eig");
  const std::size_t n = s.rows();
  if (n == 0) throw DimensionError("sym_eig: empty matrix");

  const double scale = max_abs(s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * std::max(scale, 1e-300)) {
        throw SymmetryError("sym_eig: input is not symmetric at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  SymEigResult out;
  out.values.assign(n, 0.0);
  if (n == 1) {
    out.values[0] = s(0, 0);
    out.vectors = RealMatrix::identity(1);
    return out;
  }

  RealVector q = s.entries();
  RealVector sub(n, 0.0);
  tridiagonalize(q, n, out.values, sub);
  tridiagonal_ql(out.values, sub, q, n, 40);

  // Sort ascending, carrying eigenvector columns along.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.values[a] < out.values[b];
  });

  RealVector sorted_values(n);
  RealMatrix vectors(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    sorted_values[j] = out.values[src];
    for (std::size_t i = 0; i < n; ++i) vectors(i, j) = q[i * n + src];
  }

  // Deterministic sign: first component that is clearly nonzero is positive.
  for (std::size_t j = 0; j < n; ++j) {
    double colmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      colmax = std::max(colmax, std::abs(vectors(i, j)));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(vectors(i, j)) > 1e-12 * colmax) {
        if (vectors(i, j) < 0.0) {
          for (std::size_t k = 0; k < n; ++k) vectors(k, j) = -vectors(k, j);
        }
        break;
      }
    }
  }

  out.values = std::move(sorted_values);
  out.vectors = std::move(vectors);

  if (tol > 0.0) {
    // Reconstruction check ||Q L Q^T - S||_F <= tol * ||S||_F.
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          acc += out.vectors(i, k) * out.values[k] * out.vectors(j, k);
        }
        const double d = acc - s(i, j);
        err += d * d;
      }
    }
    const double ref = frobenius_norm(s);
    if (std::sqrt(err) > tol * std::max(ref, 1e-300)) {
      throw ConvergenceError("sym_eig: reconstruction residual above tolerance",
                             0, 0, n - 1);
    }
  }
  return out;
}

Spectrum sym_eig(const RealMatrix& s, double tol) {
  SymEigResult dec = sym_eig_decomposition(s, tol);
  const std::size_t n = dec.values.size();
  Spectrum spec;
  spec.eigenvalues.resize(n);
  spec.eigenvectors.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    spec.eigenvalues[j] = Complex(dec.values[j], 0.0);
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Complex(dec.vectors(i, j), 0.0);
    spec.eigenvectors[j] = std::move(v);
  }
  return spec;
}

// --- general eigensolver ------------------------------------------------------

namespace {

// In-place balancing by powers of two (balanc lineage); similarity transform,
// exact in floating point, improves eigenvalue accuracy.
void balance(RealVector& a, std::size_t n) {
  constexpr double kRadix = 2.0;
  constexpr double kRadixSq = kRadix * kRadix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(a[j * n + i]);
        row += std::abs(a[i * n + j]);
      }
      if (col == 0.0 || row == 0.0) continue;
      double g = row / kRadix;
      double f = 1.0;
      const double s = col + row;
      while (col < g) {
        f *= kRadix;
        col *= kRadixSq;
      }
      g = row * kRadix;
      while (col > g) {
        f /= kRadix;
        col /= kRadixSq;
      }
      if ((col + row) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] *= g;
        for (std::size_t j = 0; j < n; ++j) a[j * n + i] *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form (eigenvalues only, no
// transform accumulation).
void hessenberg_reduce(RealVector& a, std::size_t n) {
  if (n < 3) return;
  RealVector v(n, 0.0);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double scale = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(a[i * n + k]);
    if (scale == 0.0) continue;

    double h = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a[i * n + k] / scale;
      h += v[i] * v[i];
    }
    double f = v[k + 1];
    double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
    h -= f * g;  // h = v^T v / 2 after the update below
    v[k + 1] = f - g;

    // Apply P = I - v v^T / h from the left then the right.
    for (std::size_t j = k; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) acc += v[i] * a[i * n + j];
      acc /= h;
      for (std::size_t i = k + 1; i < n; ++i) a[i * n + j] -= acc * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) acc += a[i * n + j] * v[j];
      acc /= h;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= acc * v[j];
    }

    a[(k + 1) * n + k] = scale * g;
    for (std::size_t i = k + 2; i < n; ++i) a[i * n + k] = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (hqr lineage),
// eigenvalues only. Throws ConvergenceError when the total sweep budget is
// exhausted, naming the deflation window that failed to split.
ComplexVector hessenberg_qr(RealVector& h, std::size_t n,
                            long max_total_sweeps) {
  ComplexVector eig(n);
  auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> double& {
    return h[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
  };

  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) {
      anorm += std::abs(h[i * n + j]);
    }
  }
  if (anorm == 0.0) anorm = 1.0;

  long total_sweeps = 0;
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  int window_its = 0;

  while (hi >= 0) {
    // Find the active block [lo, hi]: split at a negligible subdiagonal.
    std::ptrdiff_t lo = hi;
    while (lo >= 1) {
      const double s =
          std::abs(at(lo - 1, lo - 1)) + std::abs(at(lo, lo));
      const double ref = (s == 0.0) ? anorm : s;
      if (std::abs(at(lo, lo - 1)) <= kEps * ref) {
        at(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }

    if (lo == hi) {
      eig[hi] = Complex(at(hi, hi), 0.0);
      --hi;
      window_its = 0;
      continue;
    }
    if (lo == hi - 1) {
      const double x = at(hi, hi);
      const double y = at(hi - 1, hi - 1);
      const double w = at(hi, hi - 1) * at(hi - 1, hi);
      const double p = 0.5 * (y - x);
      const double q = p * p + w;
      double z = std::sqrt(std::abs(q));
      if (q >= 0.0) {
        z = p + std::copysign(z, p);
        const double e1 = x + z;
        const double e2 = (z != 0.0) ? x - w / z : e1;
        eig[hi - 1] = Complex(e1, 0.0);
        eig[hi] = Complex(e2, 0.0);
      } else {
        eig[hi - 1] = Complex(x + p, z);
        eig[hi] = Complex(x + p, -z);
      }
      hi -= 2;
      window_its = 0;
      continue;
    }

    if (total_sweeps >= max_total_sweeps) {
      throw ConvergenceError(
          "general_eig: QR exceeded " + std::to_string(max_total_sweeps) +
              " sweeps; stuck deflation window [" + std::to_string(lo) + "," +
              std::to_string(hi) + "]",
          total_sweeps, static_cast<std::size_t>(lo),
          static_cast<std::size_t>(hi));
    }

    // Shift pair: eigenvalues of the trailing 2x2, or an exceptional shift
    // every ten stalled iterations.
    double shift_sum;
    double shift_prod;
    if (window_its != 0 && window_its % 10 == 0) {
      const double s_ex =
          std::abs(at(hi, hi - 1)) + std::abs(at(hi - 1, hi - 2));
      const double base = at(hi, hi) + 0.75 * s_ex;
      shift_sum = 2.0 * base;
      shift_prod = base * base + 0.4375 * s_ex * s_ex;
    } else {
      const double x = at(hi, hi);
      const double y = at(hi - 1, hi - 1);
      const double w = at(hi, hi - 1) * at(hi - 1, hi);
      shift_sum = x + y;
      shift_prod = x * y - w;
    }
    ++window_its;
    ++total_sweeps;

    // First column of (H - s1 I)(H - s2 I), scanned upward for a place where
    // the bulge can start without disturbing converged structure.
    std::ptrdiff_t m = hi - 2;
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    for (; m >= lo; --m) {
      const double z = at(m, m);
      p = (z * z - shift_sum * z + shift_prod) / at(m + 1, m) + at(m, m + 1);
      q = at(m + 1, m + 1) + z - shift_sum;
      r = at(m + 2, m + 1);
      const double s = std::abs(p) + std::abs(q) + std::abs(r);
      if (s != 0.0) {
        p /= s;
        q /= s;
        r /= s;
      }
      if (m == lo) break;
      const double u = std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r));
      const double v = std::abs(p) * (std::abs(at(m - 1, m - 1)) +
                                      std::abs(z) + std::abs(at(m + 1, m + 1)));
      if (u <= kEps * v) break;
    }
    for (std::ptrdiff_t i = m + 2; i <= hi; ++i) at(i, i - 2) = 0.0;
    for (std::ptrdiff_t i = m + 3; i <= hi; ++i) at(i, i - 3) = 0.0;

    // Chase the bulge from row m to the bottom of the window.
    for (std::ptrdiff_t k = m; k <= hi - 1; ++k) {
      double col_scale = 0.0;
      if (k != m) {
        p = at(k, k - 1);
        q = at(k + 1, k - 1);
        r = (k != hi - 1) ? at(k + 2, k - 1) : 0.0;
        col_scale = std::abs(p) + std::abs(q) + std::abs(r);
        if (col_scale != 0.0) {
          p /= col_scale;
          q /= col_scale;
          r /= col_scale;
        }
      }
      double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
      if (s == 0.0) continue;
      if (k == m) {
        if (lo != m) at(k, k - 1) = -at(k, k - 1);
      } else {
        at(k, k - 1) = -s * col_scale;
      }
      p += s;
      const double x = p / s;
      const double y = q / s;
      const double z = r / s;
      q /= p;
      r /= p;

      for (std::ptrdiff_t j = k; j <= hi; ++j) {
        double pp = at(k, j) + q * at(k + 1, j);
        if (k != hi - 1) {
          pp += r * at(k + 2, j);
          at(k + 2, j) -= pp * z;
        }
        at(k + 1, j) -= pp * y;
        at(k, j) -= pp * x;
      }
      const std::ptrdiff_t col_end = std::min(hi, k + 3);
      for (std::ptrdiff_t i = lo; i <= col_end; ++i) {
        double pp = x * at(i, k) + y * at(i, k + 1);
        if (k != hi - 1) {
          pp += z * at(i, k + 2);
          at(i, k + 2) -= pp * r;
        }
        at(i, k + 1) -= pp * q;
        at(i, k) -= pp;
      }
    }
  }
  return eig;
}

// Deterministic start vector for inverse iteration.
ComplexVector iteration_seed(std::size_t n, std::uint64_t salt) {
  ComplexVector v(n);
  std::uint64_t state = 0x6d61726769; // arbitrary fixed tag
  state ^= salt * 0x9E3779B97F4A7C15ull;
  for (std::size_t i = 0; i < n; ++i) {
    const double a =
        static_cast<double>(rng::splitmix64(state) >> 11) * 0x1.0p-53;
    v[i] = Complex(0.5 + a, 0.25 + 0.5 * a * a);
  }
  const double nrm = norm2(v);
  for (Complex& x : v) x /= nrm;
  return v;
}

// Inverse iteration on the original matrix for one eigenvalue estimate.
// Returns a unit-norm vector with phase fixed so the largest-magnitude
// component is real and positive.
ComplexVector inverse_iteration(const RealMatrix& m, Complex mu, double tol) {
  const std::size_t n = m.rows();
  const double mnorm = std::max(frobenius_norm(m), 1e-300);

  for (int attempt = 0; attempt < 6; ++attempt) {
    // Shift slightly off an exactly singular (M - mu I).
    const double bump =
        (attempt == 0) ? 0.0
                       : std::ldexp(1e-12 * (1.0 + std::abs(mu)), attempt - 1);
    const Complex shift = mu + Complex(bump, bump);
    ComplexMatrix c(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        c(i, j) = Complex(m(i, j), 0.0) - (i == j ? shift : Complex(0.0, 0.0));
      }
    }
    ComplexLu lu(c);
    if (lu.singular()) continue;

    ComplexVector v = iteration_seed(n, static_cast<std::uint64_t>(attempt));
    for (int it = 0; it < 8; ++it) {
      ComplexVector next = lu.solve(v);
      const double nrm = norm2(next);
      if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
      for (Complex& x : next) x /= nrm;
      v = std::move(next);

      ComplexVector mv = multiply(m, v);
      double resid = 0.0;
      for (std::size_t i = 0; i < n; ++i) resid += std::norm(mv[i] - mu * v[i]);
      resid = std::sqrt(resid);
      if (resid <= tol * mnorm) {
        // Phase normalization: largest component real positive.
        std::size_t imax = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            imax = i;
          }
        }
        const Complex phase = std::conj(v[imax]) / std::abs(v[imax]);
        for (Complex& x : v) x *= phase;
        const double nrm2v = norm2(v);
        for (Complex& x : v) x /= nrm2v;
        return v;
      }
    }
  }
  throw ConvergenceError("general_eig: inverse iteration failed for mu=(" +
                             std::to_string(mu.real()) + "," +
                             std::to_string(mu.imag()) + ")",
                         8, 0, n - 1);
}

}  // namespace

Spectrum general_eig(const RealMatrix& m, bool want_vectors, double tol,
                     int max_sweeps_per_dim) {
  require_square(m, "general_eig");
  const std::size_t n = m.rows();
  if (n == 0) throw DimensionError("general_eig: empty matrix");

  Spectrum spec;
  if (n == 1) {
    spec.eigenvalues = {Complex(m(0, 0), 0.0)};
    if (want_vectors) spec.eigenvectors = {{Complex(1.0, 0.0)}};
    return spec;
  }

  RealVector work = m.entries();
  balance(work, n);
  hessenberg_reduce(work, n);
  spec.eigenvalues = hessenberg_qr(
      work, n, static_cast<long>(max_sweeps_per_dim) * static_cast<long>(n));

  // Deterministic order; exact conjugate pairs stay adjacent.
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(),
            [](const Complex& a, const Complex& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });

  if (want_vectors) {
    spec.eigenvectors.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex mu = spec.eigenvalues[i];
      if (mu.imag() < 0.0) {
        // Conjugate partner is computed when its positive-imag twin is seen.
        continue;
      }
      spec.eigenvectors[i] = inverse_iteration(m, mu, tol);
      if (mu.imag() > 0.0) {
        // Locate the partner (sorted order: conj(mu) directly precedes mu
        // among equal real parts).
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i && spec.eigenvalues[j] == std::conj(mu) &&
              spec.eigenvectors[j].empty()) {
            ComplexVector conj_v(n);
            for (std::size_t k = 0; k < n; ++k) {
              conj_v[k] = std::conj(spec.eigenvectors[i][k]);
            }
            spec.eigenvectors[j] = std::move(conj_v);
            break;
          }
        }
      }
    }
  }
  return spec;
}

}  // namespace marginopt::linalg
