// The two Riemannian structures on the SPD manifold P(n): the flat
// affine-invariant metric d0 and its conformal rescaling by sqrt(det H),
// plus the isometric splitting P(n) = P1(n) x R along the log-determinant.

#pragma once

#include "spdcone/sym_matrix.hpp"

namespace spdcone {

/// Coordinates of an SPD matrix under the splitting (t, x1) -> e^{t/sqrt(n)} x1:
/// t is the log-determinant coordinate, x1 the unit-determinant part.
struct SplitPoint {
  double t;
  UnitDetSPD x1;
};

/// tr(h^-1 a h^-1 b): the flat affine-invariant inner product at h.
double inner_affine(const SPDMatrix& h, const SymMatrix& a, const SymMatrix& b);

/// inner_affine scaled by the conformal factor sqrt(det h).
double inner_ebin(const SPDMatrix& h, const SymMatrix& a, const SymMatrix& b);

/// Base-metric variant: inner_affine scaled by sqrt(det(g0^-1 h)).
/// Reduces to inner_ebin when g0 is the identity.
double inner_ebin_base(const SPDMatrix& h, const SymMatrix& a,
                       const SymMatrix& b, const SPDMatrix& g0);

/// Geodesic distance of the flat metric: sqrt(sum log^2 lambda_i) over the
/// eigenvalues of a^-1 b. Symmetric bit-for-bit (operands are ordered
/// canonically before the factorization).
double dist_affine(const SPDMatrix& a, const SPDMatrix& b);

/// Affine geodesic a^{1/2} (a^{-1/2} b a^{-1/2})^s a^{1/2}; constant speed,
/// exact at the endpoints, preserves det = 1 when both endpoints have det 1.
SPDMatrix geo_affine(const SPDMatrix& a, const SPDMatrix& b, double s);

/// Riemannian log of the flat metric at `base`; its inner_affine norm at base
/// equals dist_affine(base, p).
SymMatrix log_affine(const SPDMatrix& base, const SPDMatrix& p);

/// Riemannian exponential of the flat metric at `base`.
SPDMatrix exp_affine(const SPDMatrix& base, const SymMatrix& v);

/// t = (log det a)/sqrt(n), x1 = e^{-t/sqrt(n)} a.
SplitPoint split(const SPDMatrix& a);

/// Inverse of split: e^{t/sqrt(n)} x1.
SPDMatrix join(const SplitPoint& p);

}  // namespace spdcone
