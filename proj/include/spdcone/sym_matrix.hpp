// Small dense symmetric / SPD matrix types and the Jacobi eigensolver.
// Dimensions are tiny (typically 2..10), so everything is O(n^3) dense
// with no external linear algebra dependency.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdcone {

/// Thrown when an iterative procedure exceeds its iteration cap.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An exactly symmetric n x n real matrix, row-major storage.
class SymMatrix {
 public:
  SymMatrix() = default;

  static SymMatrix zero(int n);
  static SymMatrix identity(int n);
  static SymMatrix diag(std::span<const double> d);

  /// Builds from row-major entries. Asymmetry up to `rel_tol` (relative to
  /// the largest entry magnitude) is symmetrized away; beyond that the
  /// input is rejected.
  static SymMatrix from_entries(int n, std::span<const double> rowmajor,
                                double rel_tol = 1e-12);

  /// Trusted fast path: `rowmajor` must already be exactly symmetric.
  static SymMatrix from_symmetric(int n, std::vector<double> rowmajor);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return e_[static_cast<size_t>(i) * n_ + j]; }
  void set(int i, int j, double v) {
    e_[static_cast<size_t>(i) * n_ + j] = v;
    e_[static_cast<size_t>(j) * n_ + i] = v;
  }
  const std::vector<double>& entries() const { return e_; }

  double trace() const;
  double frobenius_norm() const;
  /// Largest entry magnitude (max norm).
  double max_abs() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double c);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }

  bool same_entries(const SymMatrix& o) const {
    return n_ == o.n_ && e_ == o.e_;
  }

 private:
  int n_ = 0;
  std::vector<double> e_;
};

/// Eigendecomposition of a symmetric matrix: s = basis * diag(values) * basis^T,
/// eigenvalues ascending, basis columns orthonormal.
struct EigDecomposition {
  int n = 0;
  std::vector<double> values;  // ascending
  std::vector<double> basis;   // row-major; column k is the k-th eigenvector
};

/// Cyclic Jacobi rotations; off-diagonal tolerance 1e-13 * ||s||_F,
/// capped at 100 sweeps (throws convergence_error at the cap).
EigDecomposition sym_eig(const SymMatrix& s);

/// basis * diag(f(values)) * basis^T, rebuilt exactly symmetric.
SymMatrix eig_apply(const EigDecomposition& e, double (*f)(double));

enum class SpdFun { Log, Sqrt, InvSqrt, Inv };

/// Symmetric positive definite matrix. Construction validates positivity via
/// eigendecomposition (min eigenvalue > 1e-12 * max eigenvalue) and caches
/// the decomposition for downstream use.
class SPDMatrix {
 public:
  explicit SPDMatrix(const SymMatrix& s);

  static SPDMatrix identity(int n);
  static SPDMatrix diag(std::span<const double> d);

  int dim() const { return s_.dim(); }
  double operator()(int i, int j) const { return s_(i, j); }
  const SymMatrix& sym() const { return s_; }
  const std::vector<double>& entries() const { return s_.entries(); }
  const EigDecomposition& eig() const { return eig_; }

  double log_det() const;
  double det() const;

  bool same_entries(const SPDMatrix& o) const { return s_.same_entries(o.s_); }

 private:
  SymMatrix s_;
  EigDecomposition eig_;
};

/// f applied to the eigenvalues of a, in a's eigenbasis.
SymMatrix spd_fun(const SPDMatrix& a, SpdFun f);

SPDMatrix spd_sqrt(const SPDMatrix& a);
SPDMatrix spd_inv_sqrt(const SPDMatrix& a);
SPDMatrix spd_inv(const SPDMatrix& a);
SymMatrix spd_log(const SPDMatrix& a);

/// Eigenbasis exponential of a symmetric matrix (always SPD).
SPDMatrix sym_exp(const SymMatrix& s);

/// g * a * g^T for an arbitrary (row-major n x n) matrix g.
SymMatrix congruence(const SymMatrix& a, std::span<const double> g);

/// SPD matrix with determinant 1 (tolerance 1e-10 on |det - 1|).
class UnitDetSPD {
 public:
  explicit UnitDetSPD(SPDMatrix m);

  /// Rescales m by det^{-1/n} and constructs; use where round-off drift in
  /// the determinant accumulates (geodesic fibers and the like).
  static UnitDetSPD project(const SPDMatrix& m);

  int dim() const { return m_.dim(); }
  const SPDMatrix& spd() const { return m_; }
  const SymMatrix& sym() const { return m_.sym(); }

 private:
  SPDMatrix m_;
};

// Raw kernels used by hot loops (curve shortening); no allocation, no
// validation. `n` is the matrix dimension, buffers are row-major n*n.
namespace detail {

// C = A * B
void mat_mul(int n, const double* a, const double* b, double* c);
// tr(A * B)
double mat_trace_prod(int n, const double* a, const double* b);
// In-place Cholesky of the lower triangle; returns false if not PD.
bool cholesky_in_place(int n, double* a);
// Determinant of a symmetric matrix: closed form for n <= 3, Cholesky above.
// Returns a negative value or 0 if the Cholesky route fails.
double sym_det(int n, const double* a);
// Inverse of a symmetric PD matrix into `out`; closed form for n <= 3.
// Returns false when the matrix is numerically singular.
bool sym_inverse(int n, const double* a, double* out);
// Lexicographic comparison of equal-length entry buffers.
bool lex_less(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace detail

}  // namespace spdcone
