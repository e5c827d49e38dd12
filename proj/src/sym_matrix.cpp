#include "spdcone/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spdcone {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

SymMatrix SymMatrix::zero(int n) {
  require(n >= 1, "SymMatrix: dimension must be >= 1");
  SymMatrix s;
  s.n_ = n;
  s.e_.assign(static_cast<size_t>(n) * n, 0.0);
  return s;
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s = zero(n);
  for (int i = 0; i < n; ++i) s.e_[static_cast<size_t>(i) * n + i] = 1.0;
  return s;
}

SymMatrix SymMatrix::diag(std::span<const double> d) {
  SymMatrix s = zero(static_cast<int>(d.size()));
  for (int i = 0; i < s.n_; ++i) s.e_[static_cast<size_t>(i) * s.n_ + i] = d[i];
  return s;
}

SymMatrix SymMatrix::from_entries(int n, std::span<const double> rowmajor,
                                  double rel_tol) {
  require(n >= 1, "SymMatrix: dimension must be >= 1");
  require(rowmajor.size() == static_cast<size_t>(n) * n,
          "SymMatrix: entry count does not match dimension");
  double scale = 0.0;
  for (double v : rowmajor) {
    require(std::isfinite(v), "SymMatrix: non-finite entry");
    scale = std::max(scale, std::abs(v));
  }
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      asym = std::max(asym, std::abs(rowmajor[static_cast<size_t>(i) * n + j] -
                                     rowmajor[static_cast<size_t>(j) * n + i]));
  require(asym <= rel_tol * std::max(scale, 1e-300),
          "SymMatrix: asymmetry " + std::to_string(asym) +
              " exceeds tolerance");
  SymMatrix s = zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = 0.5 * (rowmajor[static_cast<size_t>(i) * n + j] +
                              rowmajor[static_cast<size_t>(j) * n + i]);
      s.set(i, j, v);
    }
  return s;
}

SymMatrix SymMatrix::from_symmetric(int n, std::vector<double> rowmajor) {
  require(n >= 1 && rowmajor.size() == static_cast<size_t>(n) * n,
          "SymMatrix: bad buffer");
  SymMatrix s;
  s.n_ = n;
  s.e_ = std::move(rowmajor);
  return s;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += e_[static_cast<size_t>(i) * n_ + i];
  return t;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : e_) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : e_) m = std::max(m, std::abs(v));
  return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  require(n_ == o.n_, "SymMatrix: dimension mismatch");
  for (size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  require(n_ == o.n_, "SymMatrix: dimension mismatch");
  for (size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double c) {
  for (double& v : e_) v *= c;
  return *this;
}

namespace {

double offdiag_norm(int n, const std::vector<double>& a) {
  double s = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      const double v = a[static_cast<size_t>(p) * n + q];
      s += 2.0 * v * v;
    }
  return std::sqrt(s);
}

}  // namespace

EigDecomposition sym_eig(const SymMatrix& s) {
  const int n = s.dim();
  if (n < 1) throw std::invalid_argument("sym_eig: empty matrix");

  std::vector<double> a = s.entries();
  std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;

  const double norm = s.frobenius_norm();
  const double stop = 1e-13 * norm;

  if (n > 1 && norm > 0.0) {
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
      if (offdiag_norm(n, a) <= stop) break;
      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          const double apq = a[static_cast<size_t>(p) * n + q];
          if (apq == 0.0) continue;
          const double app = a[static_cast<size_t>(p) * n + p];
          const double aqq = a[static_cast<size_t>(q) * n + q];
          const double theta = (aqq - app) / (2.0 * apq);
          const double t =
              (theta >= 0.0 ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double sn = t * c;
          // A <- G^T A G with G the (p,q) rotation
          for (int k = 0; k < n; ++k) {
            const double akp = a[static_cast<size_t>(k) * n + p];
            const double akq = a[static_cast<size_t>(k) * n + q];
            a[static_cast<size_t>(k) * n + p] = c * akp - sn * akq;
            a[static_cast<size_t>(k) * n + q] = sn * akp + c * akq;
          }
          for (int k = 0; k < n; ++k) {
            const double apk = a[static_cast<size_t>(p) * n + k];
            const double aqk = a[static_cast<size_t>(q) * n + k];
            a[static_cast<size_t>(p) * n + k] = c * apk - sn * aqk;
            a[static_cast<size_t>(q) * n + k] = sn * apk + c * aqk;
          }
          a[static_cast<size_t>(p) * n + q] = 0.0;
          a[static_cast<size_t>(q) * n + p] = 0.0;
          for (int k = 0; k < n; ++k) {
            const double vkp = v[static_cast<size_t>(k) * n + p];
            const double vkq = v[static_cast<size_t>(k) * n + q];
            v[static_cast<size_t>(k) * n + p] = c * vkp - sn * vkq;
            v[static_cast<size_t>(k) * n + q] = sn * vkp + c * vkq;
          }
        }
      }
    }
    if (sweep == kMaxSweeps && offdiag_norm(n, a) > stop)
      throw convergence_error("sym_eig: Jacobi did not converge in 100 sweeps");
  }

  EigDecomposition d;
  d.n = n;
  d.values.resize(n);
  for (int i = 0; i < n; ++i) d.values[i] = a[static_cast<size_t>(i) * n + i];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return d.values[x] < d.values[y]; });

  std::vector<double> values(n);
  d.basis.assign(static_cast<size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    values[k] = d.values[order[k]];
    for (int i = 0; i < n; ++i)
      d.basis[static_cast<size_t>(i) * n + k] =
          v[static_cast<size_t>(i) * n + order[k]];
  }
  d.values = std::move(values);
  return d;
}

SymMatrix eig_apply(const EigDecomposition& e, double (*f)(double)) {
  const int n = e.n;
  std::vector<double> fv(n);
  for (int k = 0; k < n; ++k) fv[k] = f(e.values[k]);
  std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += e.basis[static_cast<size_t>(i) * n + k] * fv[k] *
             e.basis[static_cast<size_t>(j) * n + k];
      out[static_cast<size_t>(i) * n + j] = s;
      out[static_cast<size_t>(j) * n + i] = s;
    }
  return SymMatrix::from_symmetric(n, std::move(out));
}

SPDMatrix::SPDMatrix(const SymMatrix& s) : s_(s), eig_(sym_eig(s)) {
  const double max_eig = eig_.values.back();
  const double min_eig = eig_.values.front();
  if (!(max_eig > 0.0) || !(min_eig > 1e-12 * max_eig))
    throw std::invalid_argument(
        "SPDMatrix: matrix is not positive definite (min/max eigenvalue " +
        std::to_string(min_eig) + "/" + std::to_string(max_eig) + ")");
}

SPDMatrix SPDMatrix::identity(int n) { return SPDMatrix(SymMatrix::identity(n)); }

SPDMatrix SPDMatrix::diag(std::span<const double> d) {
  return SPDMatrix(SymMatrix::diag(d));
}

double SPDMatrix::log_det() const {
  double s = 0.0;
  for (double v : eig_.values) s += std::log(v);
  return s;
}

double SPDMatrix::det() const { return std::exp(log_det()); }

SymMatrix spd_fun(const SPDMatrix& a, SpdFun f) {
  switch (f) {
    case SpdFun::Log:
      return eig_apply(a.eig(), [](double x) { return std::log(x); });
    case SpdFun::Sqrt:
      return eig_apply(a.eig(), [](double x) { return std::sqrt(x); });
    case SpdFun::InvSqrt:
      return eig_apply(a.eig(), [](double x) { return 1.0 / std::sqrt(x); });
    case SpdFun::Inv:
      return eig_apply(a.eig(), [](double x) { return 1.0 / x; });
  }
  throw std::invalid_argument("spd_fun: unknown function");
}

SPDMatrix spd_sqrt(const SPDMatrix& a) { return SPDMatrix(spd_fun(a, SpdFun::Sqrt)); }
SPDMatrix spd_inv_sqrt(const SPDMatrix& a) {
  return SPDMatrix(spd_fun(a, SpdFun::InvSqrt));
}
SPDMatrix spd_inv(const SPDMatrix& a) { return SPDMatrix(spd_fun(a, SpdFun::Inv)); }
SymMatrix spd_log(const SPDMatrix& a) { return spd_fun(a, SpdFun::Log); }

SPDMatrix sym_exp(const SymMatrix& s) {
  return SPDMatrix(eig_apply(sym_eig(s), [](double x) { return std::exp(x); }));
}

SymMatrix congruence(const SymMatrix& a, std::span<const double> g) {
  const int n = a.dim();
  if (g.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("congruence: transform size mismatch");
  std::vector<double> t(static_cast<size_t>(n) * n);
  detail::mat_mul(n, g.data(), a.entries().data(), t.data());
  std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += t[static_cast<size_t>(i) * n + k] * g[static_cast<size_t>(j) * n + k];
      out[static_cast<size_t>(i) * n + j] = v;
      out[static_cast<size_t>(j) * n + i] = v;
    }
  return SymMatrix::from_symmetric(n, std::move(out));
}

UnitDetSPD::UnitDetSPD(SPDMatrix m) : m_(std::move(m)) {
  const double d = m_.det();
  if (std::abs(d - 1.0) > 1e-10)
    throw std::invalid_argument("UnitDetSPD: determinant " + std::to_string(d) +
                                " is not 1 within 1e-10");
}

UnitDetSPD UnitDetSPD::project(const SPDMatrix& m) {
  const int n = m.dim();
  const double scale = std::exp(-m.log_det() / n);
  SymMatrix s = m.sym();
  s *= scale;
  return UnitDetSPD(SPDMatrix(s));
}

namespace detail {

void mat_mul(int n, const double* a, const double* b, double* c) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j];
      c[i * n + j] = s;
    }
}

double mat_trace_prod(int n, const double* a, const double* b) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += a[i * n + j] * b[j * n + i];
  return s;
}

bool cholesky_in_place(int n, double* a) {
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  return true;
}

double sym_det(int n, const double* a) {
  switch (n) {
    case 1:
      return a[0];
    case 2:
      return a[0] * a[3] - a[1] * a[1];
    case 3:
      return a[0] * (a[4] * a[8] - a[5] * a[7]) -
             a[1] * (a[3] * a[8] - a[5] * a[6]) +
             a[2] * (a[3] * a[7] - a[4] * a[6]);
    default: {
      std::vector<double> c(a, a + static_cast<size_t>(n) * n);
      if (!cholesky_in_place(n, c.data())) return 0.0;
      double ld = 0.0;
      for (int i = 0; i < n; ++i) ld += std::log(c[static_cast<size_t>(i) * n + i]);
      return std::exp(2.0 * ld);
    }
  }
}

bool sym_inverse(int n, const double* a, double* out) {
  if (n == 1) {
    if (a[0] == 0.0) return false;
    out[0] = 1.0 / a[0];
    return true;
  }
  if (n == 2) {
    const double det = a[0] * a[3] - a[1] * a[1];
    if (det == 0.0) return false;
    const double inv = 1.0 / det;
    out[0] = a[3] * inv;
    out[1] = -a[1] * inv;
    out[2] = -a[2] * inv;
    out[3] = a[0] * inv;
    return true;
  }
  if (n == 3) {
    const double c00 = a[4] * a[8] - a[5] * a[7];
    const double c01 = a[5] * a[6] - a[3] * a[8];
    const double c02 = a[3] * a[7] - a[4] * a[6];
    const double det = a[0] * c00 + a[1] * c01 + a[2] * c02;
    if (det == 0.0) return false;
    const double inv = 1.0 / det;
    out[0] = c00 * inv;
    out[1] = (a[2] * a[7] - a[1] * a[8]) * inv;
    out[2] = (a[1] * a[5] - a[2] * a[4]) * inv;
    out[3] = out[1];
    out[4] = (a[0] * a[8] - a[2] * a[6]) * inv;
    out[5] = (a[2] * a[3] - a[0] * a[5]) * inv;
    out[6] = out[2];
    out[7] = out[5];
    out[8] = (a[0] * a[4] - a[1] * a[3]) * inv;
    return true;
  }
  // Cholesky route: A^{-1} = L^{-T} L^{-1}
  std::vector<double> l(a, a + static_cast<size_t>(n) * n);
  if (!cholesky_in_place(n, l.data())) return false;
  // Solve L X = I column by column, then L^T A^{-1} = X.
  std::vector<double> x(static_cast<size_t>(n) * n, 0.0);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= l[static_cast<size_t>(i) * n + k] * x[static_cast<size_t>(k) * n + col];
      x[static_cast<size_t>(i) * n + col] = s / l[static_cast<size_t>(i) * n + i];
    }
  }
  for (int col = 0; col < n; ++col) {
    for (int i = n - 1; i >= 0; --i) {
      double s = x[static_cast<size_t>(i) * n + col];
      for (int k = i + 1; k < n; ++k) s -= l[static_cast<size_t>(k) * n + i] * out[static_cast<size_t>(k) * n + col];
      out[static_cast<size_t>(i) * n + col] = s / l[static_cast<size_t>(i) * n + i];
    }
  }
  return true;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

}  // namespace spdcone
