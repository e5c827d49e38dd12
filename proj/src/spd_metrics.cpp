#include "spdcone/spd_metrics.hpp"

#include <cmath>
#include <vector>

namespace spdcone {

namespace {

void require_dims(const SPDMatrix& h, const SymMatrix& a, const SymMatrix& b) {
  if (h.dim() != a.dim() || h.dim() != b.dim())
    throw std::invalid_argument("inner product: dimension mismatch");
}

SymMatrix sandwich(const SymMatrix& w, const SymMatrix& m) {
  // w * m * w for symmetric w, m; rebuilt exactly symmetric.
  const int n = w.dim();
  std::vector<double> t(static_cast<size_t>(n) * n);
  std::vector<double> r(static_cast<size_t>(n) * n);
  detail::mat_mul(n, w.entries().data(), m.entries().data(), t.data());
  detail::mat_mul(n, t.data(), w.entries().data(), r.data());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (r[static_cast<size_t>(i) * n + j] +
                              r[static_cast<size_t>(j) * n + i]);
      r[static_cast<size_t>(i) * n + j] = v;
      r[static_cast<size_t>(j) * n + i] = v;
    }
  return SymMatrix::from_symmetric(n, std::move(r));
}

// Eigenvalues of a^-1 b via the congruence L^-1 b L^-T, L = chol(a).
std::vector<double> relative_eigenvalues(const SPDMatrix& a, const SPDMatrix& b) {
  const int n = a.dim();
  std::vector<double> l = a.entries();
  if (!detail::cholesky_in_place(n, l.data()))
    throw std::invalid_argument("dist_affine: Cholesky failed on SPD input");
  // y = L^-1 b (forward substitution on each column of b)
  std::vector<double> y = b.entries();
  for (int col = 0; col < n; ++col)
    for (int i = 0; i < n; ++i) {
      double s = y[static_cast<size_t>(i) * n + col];
      for (int k = 0; k < i; ++k)
        s -= l[static_cast<size_t>(i) * n + k] * y[static_cast<size_t>(k) * n + col];
      y[static_cast<size_t>(i) * n + col] = s / l[static_cast<size_t>(i) * n + i];
    }
  // m = y L^-T, i.e. solve m L^T = y row by row
  std::vector<double> m(static_cast<size_t>(n) * n);
  for (int row = 0; row < n; ++row)
    for (int j = 0; j < n; ++j) {
      double s = y[static_cast<size_t>(row) * n + j];
      for (int k = 0; k < j; ++k)
        s -= m[static_cast<size_t>(row) * n + k] * l[static_cast<size_t>(j) * n + k];
      m[static_cast<size_t>(row) * n + j] = s / l[static_cast<size_t>(j) * n + j];
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m[static_cast<size_t>(i) * n + j] +
                              m[static_cast<size_t>(j) * n + i]);
      m[static_cast<size_t>(i) * n + j] = v;
      m[static_cast<size_t>(j) * n + i] = v;
    }
  return sym_eig(SymMatrix::from_symmetric(n, std::move(m))).values;
}

}  // namespace

double inner_affine(const SPDMatrix& h, const SymMatrix& a, const SymMatrix& b) {
  require_dims(h, a, b);
  const int n = h.dim();
  const SymMatrix hi = spd_fun(h, SpdFun::Inv);
  std::vector<double> x(static_cast<size_t>(n) * n);
  std::vector<double> y(static_cast<size_t>(n) * n);
  detail::mat_mul(n, hi.entries().data(), a.entries().data(), x.data());
  detail::mat_mul(n, hi.entries().data(), b.entries().data(), y.data());
  return detail::mat_trace_prod(n, x.data(), y.data());
}

double inner_ebin(const SPDMatrix& h, const SymMatrix& a, const SymMatrix& b) {
  return inner_affine(h, a, b) * std::exp(0.5 * h.log_det());
}

double inner_ebin_base(const SPDMatrix& h, const SymMatrix& a,
                       const SymMatrix& b, const SPDMatrix& g0) {
  if (g0.dim() != h.dim())
    throw std::invalid_argument("inner_ebin_base: dimension mismatch");
  return inner_affine(h, a, b) * std::exp(0.5 * (h.log_det() - g0.log_det()));
}

double dist_affine(const SPDMatrix& a, const SPDMatrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("dist_affine: dimension mismatch");
  if (a.same_entries(b)) return 0.0;  // identity axiom, exactly
  // Canonical operand order makes the result bitwise symmetric.
  const bool swap = detail::lex_less(b.entries(), a.entries());
  const SPDMatrix& x = swap ? b : a;
  const SPDMatrix& y = swap ? a : b;
  double s = 0.0;
  for (double lam : relative_eigenvalues(x, y)) {
    const double l = std::log(lam);
    s += l * l;
  }
  return std::sqrt(s);
}

SPDMatrix geo_affine(const SPDMatrix& a, const SPDMatrix& b, double s) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("geo_affine: dimension mismatch");
  if (s == 0.0) return a;
  if (s == 1.0) return b;
  const SymMatrix r = spd_fun(a, SpdFun::Sqrt);
  const SymMatrix ri = spd_fun(a, SpdFun::InvSqrt);
  const SymMatrix m = sandwich(ri, b.sym());
  const EigDecomposition me = sym_eig(m);
  std::vector<double> pw(me.values.size());
  for (size_t i = 0; i < pw.size(); ++i) pw[i] = std::pow(me.values[i], s);
  // rebuild m^s then sandwich with a^{1/2}
  const int n = a.dim();
  std::vector<double> ms(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += me.basis[static_cast<size_t>(i) * n + k] * pw[k] *
             me.basis[static_cast<size_t>(j) * n + k];
      ms[static_cast<size_t>(i) * n + j] = v;
      ms[static_cast<size_t>(j) * n + i] = v;
    }
  return SPDMatrix(sandwich(r, SymMatrix::from_symmetric(n, std::move(ms))));
}

SymMatrix log_affine(const SPDMatrix& base, const SPDMatrix& p) {
  if (base.dim() != p.dim())
    throw std::invalid_argument("log_affine: dimension mismatch");
  const SymMatrix r = spd_fun(base, SpdFun::Sqrt);
  const SymMatrix ri = spd_fun(base, SpdFun::InvSqrt);
  const SymMatrix m = sandwich(ri, p.sym());
  const SymMatrix lg = eig_apply(sym_eig(m), [](double x) { return std::log(x); });
  return sandwich(r, lg);
}

SPDMatrix exp_affine(const SPDMatrix& base, const SymMatrix& v) {
  if (base.dim() != v.dim())
    throw std::invalid_argument("exp_affine: dimension mismatch");
  const SymMatrix r = spd_fun(base, SpdFun::Sqrt);
  const SymMatrix ri = spd_fun(base, SpdFun::InvSqrt);
  const SymMatrix m = sandwich(ri, v);
  const SymMatrix ex = eig_apply(sym_eig(m), [](double x) { return std::exp(x); });
  return SPDMatrix(sandwich(r, ex));
}

SplitPoint split(const SPDMatrix& a) {
  const int n = a.dim();
  const double ld = a.log_det();
  const double t = ld / std::sqrt(static_cast<double>(n));
  SymMatrix s = a.sym();
  s *= std::exp(-ld / n);
  return SplitPoint{t, UnitDetSPD::project(SPDMatrix(s))};
}

SPDMatrix join(const SplitPoint& p) {
  const int n = p.x1.dim();
  SymMatrix s = p.x1.sym();
  s *= std::exp(p.t / std::sqrt(static_cast<double>(n)));
  return SPDMatrix(s);
}

}  // namespace spdcone
