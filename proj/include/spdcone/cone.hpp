// The metric completion of P(n) under the conformally rescaled metric,
// modeled as the Euclidean cone over (P1(n), (sqrt(n)/4) * d0). Points are
// either the apex (the degenerate limit) or a ray point (r, x1) with radius
// r > 0 and unit-determinant fiber x1; the correspondence with matrices is
// r = (4/sqrt(n)) (det a)^{1/4}, x1 = a / (det a)^{1/n}.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spdcone/spd_metrics.hpp"

namespace spdcone {

class ConePoint {
 public:
  static ConePoint apex(int n);
  static ConePoint ray(double r, UnitDetSPD x1);

  bool is_apex() const { return !x1_.has_value(); }
  int dim() const { return n_; }
  /// 0 at the apex.
  double radius() const { return r_; }
  const UnitDetSPD& fiber() const;

 private:
  ConePoint(int n, double r, std::optional<UnitDetSPD> x1)
      : n_(n), r_(r), x1_(std::move(x1)) {}
  int n_ = 0;
  double r_ = 0.0;
  std::optional<UnitDetSPD> x1_;
};

/// Tangent vector at a ray point, in planar-development coordinates:
/// a radial component plus an angular (fiber) direction that is trace-free
/// at the fiber, tr(x1^-1 angular) = 0.
class ConeTangent {
 public:
  ConeTangent(ConePoint base, double radial, SymMatrix angular);

  const ConePoint& base() const { return base_; }
  double radial() const { return radial_; }
  const SymMatrix& angular() const { return angular_; }
  /// sqrt(radial^2 + (n/16) r^2 <angular, angular>_{x1, flat}).
  double norm() const;

 private:
  ConePoint base_;
  double radial_;
  SymMatrix angular_;
};

/// SPD matrix -> cone coordinates.
ConePoint embed(const SPDMatrix& a);

/// Inverse of embed; the apex has no matrix representative (throws).
SPDMatrix to_matrix(const ConePoint& p);

/// Cone angle between two ray points: (sqrt(n)/4) * dist_affine(x1_p, x1_q).
double angle(const ConePoint& p, const ConePoint& q);

/// Completion distance: law of cosines with the angle clamped at pi;
/// d(apex, (r, x1)) = r.
double dist_cone(const ConePoint& p, const ConePoint& q);

/// Geodesic from p to q at parameter s in [0, 1]. For angle < pi the
/// segment develops onto a planar sector; for angle >= pi it is the
/// two-radial-segments path through the apex.
ConePoint geodesic_cone(const ConePoint& p, const ConePoint& q, double s);

/// Initial velocity at x of the geodesic from x to p; norm equals
/// dist_cone(x, p). x must be a ray point.
ConeTangent log_map(const ConePoint& x, const ConePoint& p);

/// Geodesic flow for parameter 1 from the tangent's base point. Returns the
/// apex when a purely radial tangent reaches or crosses it.
ConePoint exp_map(const ConeTangent& v);

/// Weighted Fréchet mean by Karcher iteration with unit step (exact for two
/// points); throws convergence_error after 200 iterations.
ConePoint frechet_mean(std::span<const ConePoint> points,
                       std::span<const double> weights);

/// An SPD matrix within eps of p: the matrix of p itself for ray points,
/// a small multiple of the identity for the apex.
SPDMatrix approximate_by_positive(const ConePoint& p, double eps);

}  // namespace spdcone
