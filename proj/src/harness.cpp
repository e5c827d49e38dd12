#include "spdcone/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spdcone/json_io.hpp"
#include "spdcone/oracle.hpp"

namespace spdcone {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxStoredFailures = 64;
// Keeps heavy-tail fibers inside the SPD conditioning tolerance while still
// reaching theta >= pi (the seam needs log-eigenvalue spreads ~2*pi/sqrt(n)).
constexpr double kHeavyTailClip = 6.0;

double default_tolerance(SuiteKind k) {
  switch (k) {
    case SuiteKind::CnCone:
    case SuiteKind::CnField:
      return 1e-9;
    case SuiteKind::MetricAxioms:
      return 1e-12;
    case SuiteKind::GeodesicConsistency:
      return 1e-9;
    case SuiteKind::OracleEquiv:
      return 1e-2;
    case SuiteKind::OracleAffine:
      return 1e-3;
    case SuiteKind::Completeness:
      return 0.0;
  }
  return 0.0;
}

// Orthonormal columns from Gram-Schmidt of a Gaussian matrix; retries the
// (measure-zero) degenerate draws.
std::vector<double> random_orthogonal(int n, RngStream& rng) {
  std::vector<double> g(static_cast<size_t>(n) * n);
  std::vector<double> q(static_cast<size_t>(n) * n);
  while (true) {
    for (double& v : g) v = rng.next_gaussian();
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      std::vector<double> col(n);
      for (int i = 0; i < n; ++i) col[i] = g[static_cast<size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += q[static_cast<size_t>(i) * n + k] * col[i];
        for (int i = 0; i < n; ++i) col[i] -= dot * q[static_cast<size_t>(i) * n + k];
      }
      double norm = 0.0;
      for (double v : col) norm += v * v;
      norm = std::sqrt(norm);
      if (norm < 1e-8) {
        ok = false;
        break;
      }
      for (int i = 0; i < n; ++i) q[static_cast<size_t>(i) * n + j] = col[i] / norm;
    }
    if (ok) return q;
  }
}

bool seam(const ConePoint& p, const ConePoint& q) {
  return !p.is_apex() && !q.is_apex() && angle(p, q) >= kPi;
}

struct IterStats {
  double margin = 0.0;
  int apex = 0;
  int seam = 0;
};

struct SuiteContext {
  SuiteKind kind;
  SamplerConfig cfg;
  SuiteOptions opts;
  std::shared_ptr<const SampleSpace> space;  // field suites only
};

IterStats eval_iteration(const SuiteContext& ctx, int64_t index, json* capture) {
  RngStream rng = RngStream::for_index(ctx.cfg.seed, static_cast<uint64_t>(index));
  IterStats st;
  switch (ctx.kind) {
    case SuiteKind::CnCone: {
      const ConePoint x = sample_cone_point(ctx.cfg, rng);
      const ConePoint y = sample_cone_point(ctx.cfg, rng);
      const ConePoint z = sample_cone_point(ctx.cfg, rng);
      st.apex = x.is_apex() + y.is_apex() + z.is_apex();
      const ConePoint m = geodesic_cone(y, z, 0.5);
      st.seam = seam(x, y) + seam(x, z) + seam(y, z) + seam(x, m);
      st.margin = cn_check(x, y, z);
      if (capture)
        *capture = json{{"x", cone_point_to_json(x)},
                        {"y", cone_point_to_json(y)},
                        {"z", cone_point_to_json(z)}};
      return st;
    }
    case SuiteKind::CnField: {
      const MetricField x = sample_field(ctx.cfg, ctx.space, rng);
      const MetricField y = sample_field(ctx.cfg, ctx.space, rng);
      const MetricField z = sample_field(ctx.cfg, ctx.space, rng);
      const MetricField m = field_geodesic(y, z, 0.5, Exec::Serial);
      const double dxy = field_dist(x, y, Exec::Serial);
      const double dxz = field_dist(x, z, Exec::Serial);
      const double dyz = field_dist(y, z, Exec::Serial);
      const double dxm = field_dist(x, m, Exec::Serial);
      st.margin =
          0.5 * dxy * dxy + 0.5 * dxz * dxz - 0.25 * dyz * dyz - dxm * dxm;
      for (const MetricField* f : {&x, &y, &z})
        for (const ConePoint& p : f->values()) st.apex += p.is_apex();
      if (capture)
        *capture = json{{"x", field_to_json(x)},
                        {"y", field_to_json(y)},
                        {"z", field_to_json(z)}};
      return st;
    }
    case SuiteKind::MetricAxioms: {
      const ConePoint x = sample_cone_point(ctx.cfg, rng);
      const ConePoint y = sample_cone_point(ctx.cfg, rng);
      const ConePoint z = sample_cone_point(ctx.cfg, rng);
      st.apex = x.is_apex() + y.is_apex() + z.is_apex();
      st.seam = seam(x, y) + seam(x, z) + seam(y, z);
      const double dxy = dist_cone(x, y);
      const double dxz = dist_cone(x, z);
      const double dyz = dist_cone(y, z);
      double margin = -std::abs(dxy - dist_cone(y, x));  // symmetry, exact
      margin = std::min(margin, -dist_cone(x, x));       // identity
      margin = std::min(margin, -dist_cone(y, y));
      margin = std::min(margin, -dist_cone(z, z));
      margin = std::min(margin, dxy + dyz - dxz);  // triangle, three ways
      margin = std::min(margin, dxy + dxz - dyz);
      margin = std::min(margin, dxz + dyz - dxy);
      st.margin = margin;
      if (capture)
        *capture = json{{"x", cone_point_to_json(x)},
                        {"y", cone_point_to_json(y)},
                        {"z", cone_point_to_json(z)}};
      return st;
    }
    case SuiteKind::GeodesicConsistency: {
      const ConePoint p = sample_cone_point(ctx.cfg, rng);
      const ConePoint q = sample_cone_point(ctx.cfg, rng);
      const double s = rng.next_double();
      const double u = rng.next_double();
      st.apex = p.is_apex() + q.is_apex();
      st.seam = seam(p, q);
      const double d = dist_cone(p, q);
      const ConePoint gs = geodesic_cone(p, q, s);
      const ConePoint gu = geodesic_cone(p, q, u);
      double err = std::abs(dist_cone(gs, gu) - std::abs(s - u) * d);
      err = std::max(err, std::abs(dist_cone(p, gs) - s * d));
      err = std::max(err, std::abs(dist_cone(gu, q) - (1.0 - u) * d));
      st.margin = -err;
      if (capture)
        *capture = json{{"p", cone_point_to_json(p)},
                        {"q", cone_point_to_json(q)},
                        {"s", s},
                        {"u", u}};
      return st;
    }
    case SuiteKind::OracleEquiv:
    case SuiteKind::OracleAffine: {
      const SPDMatrix a = sample_spd(ctx.cfg, rng);
      const SPDMatrix b = sample_spd(ctx.cfg, rng);
      const bool affine = ctx.kind == SuiteKind::OracleAffine;
      const double closed =
          affine ? dist_affine(a, b) : dist_cone(embed(a), embed(b));
      const OracleResult oracle =
          oracle_dist(a, b, affine ? MetricKind::Affine : MetricKind::Ebin,
                      ctx.opts.oracle_nodes, ctx.opts.oracle_budget,
                      Exec::Serial);
      const double rel =
          std::abs(closed - oracle.length) / std::max(closed, 1e-300);
      st.margin = -rel;
      if (capture)
        *capture = json{{"a", matrix_to_json(a.sym())},
                        {"b", matrix_to_json(b.sym())},
                        {"closed_form", closed},
                        {"oracle", oracle.length},
                        {"oracle_converged", oracle.converged}};
      return st;
    }
    case SuiteKind::Completeness: {
      const ConePoint p = sample_cone_point(ctx.cfg, rng);
      st.apex = p.is_apex();
      const SPDMatrix approx = approximate_by_positive(p, ctx.opts.epsilon);
      const double err = dist_cone(embed(approx), p);
      st.margin = ctx.opts.epsilon - err;
      if (capture)
        *capture = json{{"p", cone_point_to_json(p)},
                        {"eps", ctx.opts.epsilon},
                        {"err", err}};
      return st;
    }
  }
  throw std::invalid_argument("run_suite: unknown suite kind");
}

}  // namespace

const char* suite_name(SuiteKind k) {
  switch (k) {
    case SuiteKind::CnCone:
      return "cn_cone";
    case SuiteKind::CnField:
      return "cn_field";
    case SuiteKind::MetricAxioms:
      return "metric_axioms";
    case SuiteKind::GeodesicConsistency:
      return "geodesic_consistency";
    case SuiteKind::OracleEquiv:
      return "oracle_equiv";
    case SuiteKind::OracleAffine:
      return "oracle_affine";
    case SuiteKind::Completeness:
      return "completeness";
  }
  return "unknown";
}

SPDMatrix sample_spd(const SamplerConfig& cfg, RngStream& rng) {
  const int n = cfg.n;
  if (n < 1) throw std::invalid_argument("sample_spd: dimension must be >= 1");
  if (cfg.log_det_lo > cfg.log_det_hi)
    throw std::invalid_argument("sample_spd: empty log-det range");
  const std::vector<double> q = random_orthogonal(n, rng);
  std::vector<double> lam(n);
  for (int i = 0; i < n; ++i) {
    if (cfg.heavy_tail) {
      const double u = rng.next_double();
      const double c = cfg.anisotropy * std::tan(kPi * (u - 0.5));
      lam[i] = std::clamp(c, -kHeavyTailClip, kHeavyTailClip);
    } else {
      lam[i] = cfg.anisotropy * (2.0 * rng.next_double() - 1.0);
    }
  }
  const double tau = rng.next_uniform(cfg.log_det_lo, cfg.log_det_hi);
  double sum = 0.0;
  for (double l : lam) sum += l;
  const double shift = (tau - sum) / n;
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = std::exp(lam[i] + shift);

  std::vector<double> a(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += q[static_cast<size_t>(i) * n + k] * ev[k] *
             q[static_cast<size_t>(j) * n + k];
      a[static_cast<size_t>(i) * n + j] = v;
      a[static_cast<size_t>(j) * n + i] = v;
    }
  return SPDMatrix(SymMatrix::from_symmetric(n, std::move(a)));
}

ConePoint sample_cone_point(const SamplerConfig& cfg, RngStream& rng) {
  const double u = rng.next_double();
  if (u < cfg.apex_probability) return ConePoint::apex(cfg.n);
  return embed(sample_spd(cfg, rng));
}

MetricField sample_field(const SamplerConfig& cfg,
                         std::shared_ptr<const SampleSpace> space,
                         RngStream& rng) {
  if (!space) throw std::invalid_argument("sample_field: null space");
  SamplerConfig c = cfg;
  c.n = space->dim();
  std::vector<ConePoint> values;
  values.reserve(space->size());
  for (size_t i = 0; i < space->size(); ++i)
    values.push_back(sample_cone_point(c, rng));
  return MetricField(std::move(space), std::move(values));
}

std::vector<double> sample_unimodular(int n, RngStream& rng) {
  const std::vector<double> q1 = random_orthogonal(n, rng);
  const std::vector<double> q2 = random_orthogonal(n, rng);
  std::vector<double> lam(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    lam[i] = rng.next_uniform(-1.0, 1.0);
    sum += lam[i];
  }
  for (int i = 0; i < n; ++i) lam[i] -= sum / n;  // log det = 0
  // g = q1 * diag(e^lam) * q2^T
  std::vector<double> g(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += q1[static_cast<size_t>(i) * n + k] * std::exp(lam[k]) *
             q2[static_cast<size_t>(j) * n + k];
      g[static_cast<size_t>(i) * n + j] = v;
    }
  return g;
}

std::shared_ptr<const SampleSpace> make_uniform_space(int n, int atoms) {
  if (atoms < 1) throw std::invalid_argument("make_uniform_space: no atoms");
  std::vector<Atom> list;
  list.reserve(atoms);
  char buf[16];
  for (int i = 0; i < atoms; ++i) {
    std::snprintf(buf, sizeof(buf), "a%04d", i);
    list.push_back({buf, 1.0 / atoms});
  }
  return SampleSpace::create(n, std::move(list));
}

double cn_check(const ConePoint& x, const ConePoint& y, const ConePoint& z) {
  const ConePoint m = geodesic_cone(y, z, 0.5);
  const double dxy = dist_cone(x, y);
  const double dxz = dist_cone(x, z);
  const double dyz = dist_cone(y, z);
  const double dxm = dist_cone(x, m);
  return 0.5 * dxy * dxy + 0.5 * dxz * dxz - 0.25 * dyz * dyz - dxm * dxm;
}

SuiteReport run_suite(SuiteKind kind, const SamplerConfig& cfg,
                      int64_t iterations, const SuiteOptions& opts, Exec exec) {
  if (iterations < 1)
    throw std::invalid_argument("run_suite: iterations must be >= 1");

  SuiteContext ctx{kind, cfg, opts, nullptr};
  if (kind == SuiteKind::CnField)
    ctx.space = make_uniform_space(cfg.n, opts.field_atoms);

  std::vector<double> margins(iterations);
  std::vector<int> apexes(iterations);
  std::vector<int> seams(iterations);

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t i = 0; i < iterations; ++i) {
      const IterStats st = eval_iteration(ctx, i, nullptr);
      margins[i] = st.margin;
      apexes[i] = st.apex;
      seams[i] = st.seam;
    }
  } else {
    for (int64_t i = 0; i < iterations; ++i) {
      const IterStats st = eval_iteration(ctx, i, nullptr);
      margins[i] = st.margin;
      apexes[i] = st.apex;
      seams[i] = st.seam;
    }
  }

  SuiteReport rep;
  rep.suite = suite_name(kind);
  rep.n = cfg.n;
  rep.samples = iterations;
  rep.tolerance = opts.tolerance.value_or(default_tolerance(kind));

  // Fixed-order reductions keep the report schedule-independent.
  double sum = 0.0, comp = 0.0;
  int64_t argmin = 0;
  for (int64_t i = 0; i < iterations; ++i) {
    const double t = margins[i];
    const double next = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - next) + t;
    else
      comp += (t - next) + sum;
    sum = next;
    if (margins[i] < margins[argmin]) argmin = i;
    rep.apex_count += apexes[i];
    rep.seam_count += seams[i];
  }
  rep.mean_margin = (sum + comp) / static_cast<double>(iterations);
  rep.min_margin = margins[argmin];
  rep.max_violation = std::max(0.0, -rep.min_margin);

  SuiteFailure worst;
  worst.index = argmin;
  worst.seed = cfg.seed;
  worst.margin = margins[argmin];
  eval_iteration(ctx, argmin, &worst.inputs);
  rep.worst = std::move(worst);

  for (int64_t i = 0; i < iterations; ++i) {
    if (margins[i] < -rep.tolerance) {
      ++rep.failure_count;
      if (static_cast<int>(rep.failures.size()) < kMaxStoredFailures) {
        SuiteFailure f;
        f.index = i;
        f.seed = cfg.seed;
        f.margin = margins[i];
        eval_iteration(ctx, i, &f.inputs);
        rep.failures.push_back(std::move(f));
      }
    }
  }
  return rep;
}

nlohmann::json SuiteReport::to_json() const {
  auto failure_json = [](const SuiteFailure& f) {
    return json{{"index", f.index},
                {"seed", f.seed},
                {"margin", f.margin},
                {"inputs", f.inputs}};
  };
  json j{{"suite", suite},
         {"n", n},
         {"samples", samples},
         {"tolerance", tolerance},
         {"max_violation", max_violation},
         {"mean_margin", mean_margin},
         {"min_margin", min_margin},
         {"apex_count", apex_count},
         {"seam_count", seam_count},
         {"failure_count", failure_count},
         {"pass", pass()}};
  if (worst) j["worst"] = failure_json(*worst);
  json fl = json::array();
  for (const SuiteFailure& f : failures) fl.push_back(failure_json(f));
  j["failures"] = std::move(fl);
  return j;
}

}  // namespace spdcone
