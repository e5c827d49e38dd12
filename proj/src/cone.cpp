#include "spdcone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spdcone {

namespace {

constexpr double kPi = std::numbers::pi;

double cone_scale(int n) { return std::sqrt(static_cast<double>(n)) / 4.0; }

void require_same_dim(const ConePoint& p, const ConePoint& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("cone: dimension mismatch");
}

}  // namespace

ConePoint ConePoint::apex(int n) {
  if (n < 1) throw std::invalid_argument("ConePoint: dimension must be >= 1");
  return ConePoint(n, 0.0, std::nullopt);
}

ConePoint ConePoint::ray(double r, UnitDetSPD x1) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("ConePoint: ray radius must be positive");
  const int n = x1.dim();
  return ConePoint(n, r, std::move(x1));
}

const UnitDetSPD& ConePoint::fiber() const {
  if (is_apex()) throw std::domain_error("ConePoint: apex has no fiber");
  return *x1_;
}

ConeTangent::ConeTangent(ConePoint base, double radial, SymMatrix angular)
    : base_(std::move(base)), radial_(radial), angular_(std::move(angular)) {
  if (base_.is_apex())
    throw std::invalid_argument("ConeTangent: base must be a ray point");
  if (angular_.dim() != base_.dim())
    throw std::invalid_argument("ConeTangent: dimension mismatch");
  const int n = base_.dim();
  const SPDMatrix& x1 = base_.fiber().spd();
  const SymMatrix xi = spd_fun(x1, SpdFun::Inv);
  const double tr = detail::mat_trace_prod(n, xi.entries().data(),
                                           angular_.entries().data());
  const double flat = std::sqrt(
      std::max(0.0, inner_affine(x1, angular_, angular_)));
  // The pure-trace direction c*x1 has flat norm |c|*sqrt(n). Reject blatant
  // violations, project away round-off drift (weighted tangent sums
  // accumulate it).
  if (std::abs(tr) / std::sqrt(static_cast<double>(n)) >
      1e-6 * std::max(1.0, flat))
    throw std::invalid_argument("ConeTangent: angular part is not trace-free");
  if (tr != 0.0) {
    SymMatrix correction = x1.sym();
    correction *= tr / n;
    angular_ -= correction;
  }
}

double ConeTangent::norm() const {
  const int n = base_.dim();
  const double r = base_.radius();
  const double flat =
      inner_affine(base_.fiber().spd(), angular_, angular_);
  return std::sqrt(radial_ * radial_ + (n / 16.0) * r * r * flat);
}

ConePoint embed(const SPDMatrix& a) {
  const int n = a.dim();
  const double ld = a.log_det();
  const double r = (4.0 / std::sqrt(static_cast<double>(n))) * std::exp(ld / 4.0);
  SymMatrix s = a.sym();
  s *= std::exp(-ld / n);
  return ConePoint::ray(r, UnitDetSPD::project(SPDMatrix(s)));
}

SPDMatrix to_matrix(const ConePoint& p) {
  if (p.is_apex())
    throw std::domain_error("to_matrix: apex has no matrix representative");
  const int n = p.dim();
  // (det)^{1/4} = r sqrt(n)/4, so the scale back is (r sqrt(n)/4)^{4/n}.
  const double q = p.radius() * std::sqrt(static_cast<double>(n)) / 4.0;
  SymMatrix s = p.fiber().sym();
  s *= std::pow(q, 4.0 / n);
  return SPDMatrix(s);
}

double angle(const ConePoint& p, const ConePoint& q) {
  require_same_dim(p, q);
  if (p.is_apex() || q.is_apex())
    throw std::domain_error("angle: undefined at the apex");
  return cone_scale(p.dim()) * dist_affine(p.fiber().spd(), q.fiber().spd());
}

double dist_cone(const ConePoint& p, const ConePoint& q) {
  require_same_dim(p, q);
  if (p.is_apex() && q.is_apex()) return 0.0;
  if (p.is_apex()) return q.radius();
  if (q.is_apex()) return p.radius();
  const double th = std::min(angle(p, q), kPi);
  if (th >= kPi) return p.radius() + q.radius();
  // Stable law of cosines: (dr)^2 + 4 r_p r_q sin^2(theta/2).
  const double dr = p.radius() - q.radius();
  const double h = std::sin(0.5 * th);
  return std::sqrt(dr * dr + 4.0 * (p.radius() * q.radius()) * (h * h));
}

ConePoint geodesic_cone(const ConePoint& p, const ConePoint& q, double s) {
  require_same_dim(p, q);
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("geodesic_cone: parameter outside [0, 1]");
  if (s == 0.0) return p;
  if (s == 1.0) return q;
  if (p.is_apex() && q.is_apex()) return p;
  if (p.is_apex()) {
    const double r = s * q.radius();
    return r > 0.0 ? ConePoint::ray(r, q.fiber()) : ConePoint::apex(p.dim());
  }
  if (q.is_apex()) {
    const double r = (1.0 - s) * p.radius();
    return r > 0.0 ? ConePoint::ray(r, p.fiber()) : ConePoint::apex(p.dim());
  }
  const double rp = p.radius();
  const double rq = q.radius();
  const double th = angle(p, q);
  if (th >= kPi) {
    // Through the apex, parametrized by arc length.
    const double pos = s * (rp + rq);
    if (pos < rp) return ConePoint::ray(rp - pos, p.fiber());
    if (pos > rp) return ConePoint::ray(pos - rp, q.fiber());
    return ConePoint::apex(p.dim());
  }
  if (th == 0.0) {
    const double r = (1.0 - s) * rp + s * rq;
    return ConePoint::ray(r, p.fiber());
  }
  // Develop onto the plane: p at (rp, 0), q at (rq, th), interpolate.
  const double zx = (1.0 - s) * rp + s * rq * std::cos(th);
  const double zy = s * rq * std::sin(th);
  const double r = std::hypot(zx, zy);
  if (r == 0.0) return ConePoint::apex(p.dim());
  const double alpha = std::atan2(zy, zx);
  const SPDMatrix fiber =
      geo_affine(p.fiber().spd(), q.fiber().spd(), alpha / th);
  return ConePoint::ray(r, UnitDetSPD::project(fiber));
}

ConeTangent log_map(const ConePoint& x, const ConePoint& p) {
  require_same_dim(x, p);
  if (x.is_apex())
    throw std::invalid_argument("log_map: base point must be a ray point");
  const int n = x.dim();
  const double rx = x.radius();
  const SymMatrix zero = SymMatrix::zero(n);
  if (p.is_apex()) return ConeTangent(x, -rx, zero);
  const double rp = p.radius();
  const double th = angle(x, p);
  if (th >= kPi) {
    // Through-apex geodesic: purely radial, inward, speed = distance.
    return ConeTangent(x, -(rx + rp), zero);
  }
  if (th == 0.0) return ConeTangent(x, rp - rx, zero);
  const double radial = rp * std::cos(th) - rx;
  const double mt = rp * std::sin(th);
  const SymMatrix u = log_affine(x.fiber().spd(), p.fiber().spd());
  const double delta = th / cone_scale(n);  // = dist_affine of the fibers
  SymMatrix ang = u;
  ang *= mt / (cone_scale(n) * rx * delta);
  return ConeTangent(x, radial, ang);
}

ConePoint exp_map(const ConeTangent& v) {
  const ConePoint& x = v.base();
  const int n = x.dim();
  const double rx = x.radius();
  const double wf =
      std::sqrt(std::max(0.0, inner_affine(x.fiber().spd(), v.angular(),
                                           v.angular())));
  const double mt = cone_scale(n) * rx * wf;
  const double zx = rx + v.radial();
  if (mt == 0.0) {
    if (zx > 0.0) return ConePoint::ray(zx, x.fiber());
    return ConePoint::apex(n);  // reached or crossed the apex
  }
  const double r = std::hypot(zx, mt);
  const double alpha = std::atan2(mt, zx);
  SymMatrix step = v.angular();
  step *= alpha / (cone_scale(n) * wf);
  const SPDMatrix fiber = exp_affine(x.fiber().spd(), step);
  return ConePoint::ray(r, UnitDetSPD::project(fiber));
}

ConePoint frechet_mean(std::span<const ConePoint> points,
                       std::span<const double> weights) {
  const size_t k = points.size();
  if (k == 0) throw std::invalid_argument("frechet_mean: empty input");
  if (weights.size() != k)
    throw std::invalid_argument("frechet_mean: weight count mismatch");
  const int n = points[0].dim();
  double wsum = 0.0;
  for (size_t i = 0; i < k; ++i) {
    if (points[i].dim() != n)
      throw std::invalid_argument("frechet_mean: dimension mismatch");
    if (!(weights[i] >= 0.0))
      throw std::invalid_argument("frechet_mean: negative weight");
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("frechet_mean: weights must sum to 1");

  if (k == 1) return points[0];

  size_t best = 0;
  bool any_ray = false;
  double max_ray_radius = 0.0;
  const UnitDetSPD* some_fiber = nullptr;
  for (size_t i = 0; i < k; ++i) {
    if (weights[i] > weights[best]) best = i;
    if (weights[i] > 0.0 && !points[i].is_apex()) {
      any_ray = true;
      max_ray_radius = std::max(max_ray_radius, points[i].radius());
      if (!some_fiber) some_fiber = &points[i].fiber();
    }
  }
  if (!any_ray) return ConePoint::apex(n);  // all mass at the apex

  const double restart_radius = 1e-6 * max_ray_radius;
  ConePoint m = points[best].is_apex()
                    ? ConePoint::ray(restart_radius, *some_fiber)
                    : points[best];

  constexpr int kMaxIter = 200;
  for (int it = 0; it < kMaxIter; ++it) {
    double t_radial = 0.0;
    SymMatrix t_angular = SymMatrix::zero(n);
    double scale = 0.0;  // weighted mean distance at the current iterate
    for (size_t i = 0; i < k; ++i) {
      if (weights[i] == 0.0) continue;
      const ConeTangent lg = log_map(m, points[i]);
      t_radial += weights[i] * lg.radial();
      SymMatrix a = lg.angular();
      a *= weights[i];
      t_angular += a;
      scale += weights[i] * lg.norm();
    }
    if (scale == 0.0) return m;  // all mass sits at m
    const ConeTangent step(m, t_radial, t_angular);
    if (step.norm() <= 1e-9 * scale) return m;
    const ConePoint next = exp_map(step);
    // log_map's angular part is undefined at the apex; restart just off it.
    m = next.is_apex() ? ConePoint::ray(restart_radius, m.fiber()) : next;
  }
  throw convergence_error("frechet_mean: no convergence after 200 iterations");
}

SPDMatrix approximate_by_positive(const ConePoint& p, double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("approximate_by_positive: eps must be > 0");
  if (!p.is_apex()) return to_matrix(p);
  // c * I with radius (4/sqrt(n)) c^{n/4} = eps/2 < eps.
  const int n = p.dim();
  const double c =
      std::pow(0.5 * eps * std::sqrt(static_cast<double>(n)) / 4.0, 4.0 / n);
  SymMatrix s = SymMatrix::identity(n);
  s *= c;
  return SPDMatrix(s);
}

}  // namespace spdcone
