#include "spdcone/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spdcone/spd_metrics.hpp"

namespace spdcone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEigenFloor = 1e-10;

struct RawPath {
  int n = 0;       // matrix dimension
  int segs = 0;    // number of segments (nodes - 1)
  std::vector<double> e;  // (segs + 1) * n * n, row-major per node

  double* node(int i) { return e.data() + static_cast<size_t>(i) * n * n; }
  const double* node(int i) const {
    return e.data() + static_cast<size_t>(i) * n * n;
  }
};

struct Scratch {
  std::vector<double> mid, minv, delta, x, y, z, grad, cand;
  explicit Scratch(int n) {
    const size_t nn = static_cast<size_t>(n) * n;
    mid.resize(nn);
    minv.resize(nn);
    delta.resize(nn);
    x.resize(nn);
    y.resize(nn);
    z.resize(nn);
    grad.resize(nn);
    cand.resize(nn);
  }
};

void symmetrize(int n, double* a) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a[i * n + j] + a[j * n + i]);
      a[i * n + j] = v;
      a[j * n + i] = v;
    }
}

// Energy of the segment (u, v): tr(m^-1 d m^-1 d) * phi(m), m the entrywise
// midpoint, phi = sqrt(det m) for the Ebin metric and 1 for the flat one.
double seg_energy(MetricKind kind, int n, const double* u, const double* v,
                  Scratch& s) {
  const size_t nn = static_cast<size_t>(n) * n;
  for (size_t i = 0; i < nn; ++i) {
    s.mid[i] = 0.5 * (u[i] + v[i]);
    s.delta[i] = v[i] - u[i];
  }
  if (!detail::sym_inverse(n, s.mid.data(), s.minv.data())) return kInf;
  detail::mat_mul(n, s.minv.data(), s.delta.data(), s.x.data());
  const double t = detail::mat_trace_prod(n, s.x.data(), s.x.data());
  if (kind == MetricKind::Affine) return t;
  const double det = detail::sym_det(n, s.mid.data());
  if (!(det > 0.0)) return kInf;
  return t * std::sqrt(det);
}

// Gradient with respect to the segment endpoint x. `left_endpoint` selects
// whether x is the left (segment x -> other) or right (other -> x) end.
// Adds into `grad`. Derivation: with m = (x + other)/2 and d = +-(x - other),
//   d tr(m^-1 d m^-1 d) = <2 m^-1 d m^-1, dd> - <2 m^-1 d m^-1 d m^-1, dm>,
//   d sqrt(det m)       = <sqrt(det m)/2 * m^-1, dm>,    dm = dx/2.
void seg_grad(MetricKind kind, int n, const double* x, const double* other,
              bool left_endpoint, Scratch& s, double* grad) {
  const size_t nn = static_cast<size_t>(n) * n;
  const double* u = left_endpoint ? x : other;
  const double* v = left_endpoint ? other : x;
  for (size_t i = 0; i < nn; ++i) {
    s.mid[i] = 0.5 * (u[i] + v[i]);
    s.delta[i] = v[i] - u[i];
  }
  if (!detail::sym_inverse(n, s.mid.data(), s.minv.data())) return;
  detail::mat_mul(n, s.minv.data(), s.delta.data(), s.x.data());   // m^-1 d
  detail::mat_mul(n, s.x.data(), s.minv.data(), s.y.data());       // m^-1 d m^-1
  detail::mat_mul(n, s.x.data(), s.y.data(), s.z.data());  // m^-1 d m^-1 d m^-1
  symmetrize(n, s.y.data());
  symmetrize(n, s.z.data());
  const double t = detail::mat_trace_prod(n, s.x.data(), s.x.data());
  double phi = 1.0;
  if (kind == MetricKind::Ebin) {
    const double det = detail::sym_det(n, s.mid.data());
    if (!(det > 0.0)) return;
    phi = std::sqrt(det);
  }
  const double sign = left_endpoint ? -1.0 : 1.0;
  for (size_t i = 0; i < nn; ++i)
    grad[i] += phi * (sign * 2.0 * s.y[i] - s.z[i]);
  if (kind == MetricKind::Ebin)
    for (size_t i = 0; i < nn; ++i) grad[i] += t * 0.25 * phi * s.minv[i];
}

// Projects onto the SPD set by flooring eigenvalues at 1e-10 when the
// Cholesky test fails.
void floor_spd(int n, double* a) {
  std::vector<double> probe(a, a + static_cast<size_t>(n) * n);
  if (detail::cholesky_in_place(n, probe.data())) return;
  const EigDecomposition eig =
      sym_eig(SymMatrix::from_symmetric(n, std::vector<double>(a, a + static_cast<size_t>(n) * n)));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += eig.basis[static_cast<size_t>(i) * n + k] *
             std::max(eig.values[k], kEigenFloor) *
             eig.basis[static_cast<size_t>(j) * n + k];
      a[i * n + j] = v;
      a[j * n + i] = v;
    }
}

// A few damped gradient steps on the two-segment local energy, accepted only
// if the local length does not increase. Returns true when the node moved.
bool node_update(MetricKind kind, int n, const double* a, double* x,
                 const double* b, double step, Scratch& s) {
  const size_t nn = static_cast<size_t>(n) * n;
  double e1 = seg_energy(kind, n, a, x, s);
  double e2 = seg_energy(kind, n, x, b, s);
  if (!std::isfinite(e1) || !std::isfinite(e2))
    throw std::runtime_error("shorten: step collapse (non-finite energy)");
  const double l0 = std::sqrt(e1) + std::sqrt(e2);

  std::vector<double> cur(x, x + nn);
  double e_cur = e1 + e2;
  bool moved = false;
  for (int gs = 0; gs < 4; ++gs) {
    std::fill(s.grad.begin(), s.grad.end(), 0.0);
    seg_grad(kind, n, cur.data(), a, false, s, s.grad.data());
    seg_grad(kind, n, cur.data(), b, true, s, s.grad.data());
    symmetrize(n, s.grad.data());
    double g2 = 0.0;
    for (size_t i = 0; i < nn; ++i) g2 += s.grad[i] * s.grad[i];
    if (!(g2 > 0.0)) break;

    // One probe at a displacement of ~half the shorter segment fixes the
    // step scale: fit e(t) = e0 - g2 t + c t^2 and jump to its minimum.
    // (The energy does not vanish at the optimum, so e/g2 alone is no
    // usable scale near stationarity.)
    double seg1 = 0.0, seg2 = 0.0;
    for (size_t i = 0; i < nn; ++i) {
      seg1 += (cur[i] - a[i]) * (cur[i] - a[i]);
      seg2 += (b[i] - cur[i]) * (b[i] - cur[i]);
    }
    const double tp =
        0.5 * std::sqrt(std::min(seg1, seg2)) / std::sqrt(g2);
    if (!(tp > 0.0)) break;
    for (size_t i = 0; i < nn; ++i) s.cand[i] = cur[i] - tp * s.grad[i];
    floor_spd(n, s.cand.data());
    const double ep = seg_energy(kind, n, a, s.cand.data(), s) +
                      seg_energy(kind, n, s.cand.data(), b, s);
    const double curv = (ep - e_cur + g2 * tp) / (tp * tp);
    double t = step * (curv > 0.0 ? std::min(g2 / (2.0 * curv), 8.0 * tp)
                                  : 2.0 * tp);

    bool improved = false;
    for (int half = 0; half < 16; ++half) {
      for (size_t i = 0; i < nn; ++i) s.cand[i] = cur[i] - t * s.grad[i];
      floor_spd(n, s.cand.data());
      const double e_new = seg_energy(kind, n, a, s.cand.data(), s) +
                           seg_energy(kind, n, s.cand.data(), b, s);
      if (e_new < e_cur * (1.0 - 1e-14)) {
        cur.assign(s.cand.begin(), s.cand.end());
        e_cur = e_new;
        improved = true;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved && ep < e_cur * (1.0 - 1e-14)) {
      // the probe itself improved; keep it
      for (size_t i = 0; i < nn; ++i) s.cand[i] = cur[i] - tp * s.grad[i];
      floor_spd(n, s.cand.data());
      cur.assign(s.cand.begin(), s.cand.end());
      e_cur = seg_energy(kind, n, a, cur.data(), s) +
              seg_energy(kind, n, cur.data(), b, s);
      improved = true;
      moved = true;
    }
    if (!improved) break;
  }
  if (!moved) return false;

  const double l1 = std::sqrt(seg_energy(kind, n, a, cur.data(), s)) +
                    std::sqrt(seg_energy(kind, n, cur.data(), b, s));
  if (l1 <= l0) {
    std::copy(cur.begin(), cur.end(), x);
    return l1 < l0;
  }
  return false;  // energy went down but length up; keep the old node
}

double raw_length(MetricKind kind, const RawPath& p, Scratch& s) {
  double len = 0.0;
  for (int k = 0; k < p.segs; ++k)
    len += std::sqrt(seg_energy(kind, p.n, p.node(k), p.node(k + 1), s));
  return len;
}

int raw_shorten(MetricKind kind, RawPath& p, int max_sweeps, double step,
                Exec exec, bool* stabilized) {
  *stabilized = (p.segs < 2);  // nothing to move
  if (p.segs < 2 || max_sweeps <= 0) return 0;
  Scratch scratch(p.n);
  double l_prev = raw_length(kind, p, scratch);
  int sweeps = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int phase = 1; phase <= 2; ++phase) {
      const int first = phase;  // odd then even interior indices
      if (exec == Exec::Parallel) {
#pragma omp parallel
        {
          Scratch local(p.n);
#pragma omp for schedule(static)
          for (int i = first; i <= p.segs - 1; i += 2)
            node_update(kind, p.n, p.node(i - 1), p.node(i), p.node(i + 1),
                        step, local);
        }
      } else {
        for (int i = first; i <= p.segs - 1; i += 2)
          node_update(kind, p.n, p.node(i - 1), p.node(i), p.node(i + 1), step,
                      scratch);
      }
    }
    ++sweeps;
    const double l_new = raw_length(kind, p, scratch);
    if (l_new > l_prev + 1e-12 * (1.0 + l_prev))
      throw std::logic_error("shorten: path length increased within a sweep");
    if (l_prev - l_new <= 1e-12 * std::max(l_new, 1e-300)) {
      *stabilized = true;
      return sweeps;
    }
    l_prev = l_new;
  }
  return sweeps;
}

// Piecewise-linear resampling in index space; endpoints are preserved
// exactly and interior nodes are convex combinations (hence SPD).
RawPath raw_resample(const RawPath& p, int new_segs) {
  RawPath out;
  out.n = p.n;
  out.segs = new_segs;
  const size_t nn = static_cast<size_t>(p.n) * p.n;
  out.e.resize(static_cast<size_t>(new_segs + 1) * nn);
  for (int j = 0; j <= new_segs; ++j) {
    const long long num = static_cast<long long>(j) * p.segs;
    const int i0 = static_cast<int>(num / new_segs);
    const double w = static_cast<double>(num % new_segs) / new_segs;
    double* dst = out.node(j);
    const double* u = p.node(i0);
    if (w == 0.0) {
      std::copy(u, u + nn, dst);
    } else {
      const double* v = p.node(i0 + 1);
      for (size_t t = 0; t < nn; ++t) dst[t] = (1.0 - w) * u[t] + w * v[t];
    }
  }
  return out;
}

RawPath to_raw(const DiscretePath& p) {
  RawPath r;
  r.n = p.nodes[0].dim();
  r.segs = static_cast<int>(p.nodes.size()) - 1;
  const size_t nn = static_cast<size_t>(r.n) * r.n;
  r.e.resize(p.nodes.size() * nn);
  for (size_t i = 0; i < p.nodes.size(); ++i)
    std::copy(p.nodes[i].entries().begin(), p.nodes[i].entries().end(),
              r.e.begin() + i * nn);
  return r;
}

DiscretePath from_raw(MetricKind kind, const RawPath& r) {
  DiscretePath p;
  p.kind = kind;
  const size_t nn = static_cast<size_t>(r.n) * r.n;
  p.nodes.reserve(r.segs + 1);
  for (int i = 0; i <= r.segs; ++i) {
    std::vector<double> e(r.node(i), r.node(i) + nn);
    symmetrize(r.n, e.data());
    p.nodes.emplace_back(SymMatrix::from_symmetric(r.n, std::move(e)));
  }
  return p;
}

void validate_path(const DiscretePath& p) {
  if (p.nodes.size() < 2)
    throw std::invalid_argument("DiscretePath: at least two nodes required");
  const int n = p.nodes[0].dim();
  for (const SPDMatrix& m : p.nodes)
    if (m.dim() != n)
      throw std::invalid_argument("DiscretePath: node dimension mismatch");
}

}  // namespace

namespace oracle_detail {

double local_energy(MetricKind kind, const SPDMatrix& a, const SymMatrix& x,
                    const SPDMatrix& b) {
  Scratch s(x.dim());
  return seg_energy(kind, x.dim(), a.entries().data(), x.entries().data(), s) +
         seg_energy(kind, x.dim(), x.entries().data(), b.entries().data(), s);
}

SymMatrix local_energy_grad(MetricKind kind, const SPDMatrix& a,
                            const SymMatrix& x, const SPDMatrix& b) {
  const int n = x.dim();
  Scratch s(n);
  std::vector<double> g(static_cast<size_t>(n) * n, 0.0);
  seg_grad(kind, n, x.entries().data(), a.entries().data(), false, s, g.data());
  seg_grad(kind, n, x.entries().data(), b.entries().data(), true, s, g.data());
  symmetrize(n, g.data());
  return SymMatrix::from_symmetric(n, std::move(g));
}

}  // namespace oracle_detail

double path_length(const DiscretePath& p) {
  validate_path(p);
  const RawPath r = to_raw(p);
  Scratch s(r.n);
  double len = 0.0;
  for (int k = 0; k < r.segs; ++k) {
    const double e = seg_energy(p.kind, r.n, r.node(k), r.node(k + 1), s);
    if (!std::isfinite(e))
      throw std::logic_error("path_length: segment midpoint is not SPD");
    len += std::sqrt(e);
  }
  return len;
}

ShortenResult shorten(const DiscretePath& p, int max_sweeps, double step,
                      Exec exec) {
  validate_path(p);
  if (max_sweeps < 0)
    throw std::invalid_argument("shorten: negative sweep count");
  if (!(step > 0.0)) throw std::invalid_argument("shorten: step must be > 0");
  RawPath r = to_raw(p);
  ShortenResult out;
  out.sweeps = raw_shorten(p.kind, r, max_sweeps, step, exec, &out.stabilized);
  out.path = from_raw(p.kind, r);
  return out;
}

OracleResult oracle_dist(const SPDMatrix& a, const SPDMatrix& b,
                         MetricKind kind, int nodes, int budget, Exec exec) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("oracle_dist: dimension mismatch");
  if (nodes < 1) throw std::invalid_argument("oracle_dist: nodes must be >= 1");
  if (budget < 0) throw std::invalid_argument("oracle_dist: negative budget");

  const int n = a.dim();
  const size_t nn = static_cast<size_t>(n) * n;

  if (a.same_entries(b)) {
    OracleResult res;
    res.length = 0.0;
    res.path = DiscretePath{kind, {a, b}};
    res.converged = true;
    return res;
  }

  // Coarse-to-fine ladder of segment counts ending at `nodes`.
  std::vector<int> sizes{nodes};
  while (sizes.front() > 6) sizes.insert(sizes.begin(), (sizes.front() + 1) / 2);

  const int k0 = sizes.front();
  RawPath lin;
  lin.n = n;
  lin.segs = k0;
  lin.e.resize(static_cast<size_t>(k0 + 1) * nn);
  RawPath geo = lin;
  for (int j = 0; j <= k0; ++j) {
    const double w = static_cast<double>(j) / k0;
    double* dl = lin.node(j);
    for (size_t t = 0; t < nn; ++t)
      dl[t] = (1.0 - w) * a.entries()[t] + w * b.entries()[t];
    const SPDMatrix g = geo_affine(a, b, w);
    std::copy(g.entries().begin(), g.entries().end(), geo.node(j));
  }

  OracleResult best;
  best.length = kInf;
  int total_sweeps = 0;
  for (RawPath* init : {&lin, &geo}) {
    RawPath cur = std::move(*init);
    int remaining = budget;
    bool stabilized = false;
    for (size_t lvl = 0; lvl < sizes.size(); ++lvl) {
      if (lvl > 0) cur = raw_resample(cur, sizes[lvl]);
      const int used = raw_shorten(kind, cur, remaining, 1.0, exec, &stabilized);
      remaining -= used;
      total_sweeps += used;
    }
    Scratch s(n);
    const double len = raw_length(kind, cur, s);
    if (len < best.length) {
      best.length = len;
      best.path = from_raw(kind, cur);
      best.converged = stabilized;
    }
  }
  best.sweeps_used = total_sweeps;
  return best;
}

}  // namespace spdcone
