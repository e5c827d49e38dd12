// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. All tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "spdcone/harness.hpp"
#include "spdcone/json_io.hpp"
#include "spdcone/oracle.hpp"

using namespace spdcone;

namespace {

constexpr uint64_t kBaseSeed = 20260810;
constexpr double kPi = std::numbers::pi;

int g_failures = 0;

void report(int id, bool pass, const std::string& label,
            const std::string& detail, double seconds) {
  std::printf("[%2d] %s %-58s %s (%.1fs)\n", id, pass ? "PASS" : "FAIL",
              label.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run(int id, const std::string& label,
         const std::function<bool(std::string&)>& body) {
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(id, pass, label, detail, dt);
}

SamplerConfig corpus_config(int n, uint64_t seed) {
  SamplerConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.log_det_lo = -2.0;
  cfg.log_det_hi = 2.0;
  cfg.anisotropy = 1.0;
  return cfg;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

double objective(const std::vector<ConePoint>& pts, const double* w,
                 const ConePoint& c) {
  double s = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double d = dist_cone(c, pts[i]);
    s += w[i] * d * d;
  }
  return s;
}

}  // namespace

int main() {
  std::printf("acceptance suite (threads: %d)\n", max_threads());

  // 1. The cone closed form equals the variational oracle for the rescaled
  //    metric: 100 seeded pairs per dimension, relative error <= 1e-2,
  //    total runtime <= 600 s.
  run(1, "oracle equivalence: dist_cone vs ebin oracle, n=2,3", [](std::string& d) {
    SuiteOptions opts;
    opts.oracle_nodes = 128;
    opts.oracle_budget = 3000;
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteReport r2 =
        run_suite(SuiteKind::OracleEquiv, corpus_config(2, kBaseSeed + 2), 100, opts);
    const SuiteReport r3 =
        run_suite(SuiteKind::OracleEquiv, corpus_config(3, kBaseSeed + 3), 100, opts);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    d = "max rel err n=2: " + sci(r2.max_violation) +
        ", n=3: " + sci(r3.max_violation) + "; " + sci(secs) + "s of 600s";
    return r2.pass() && r3.pass() && secs <= 600.0;
  });

  // 2. Oracle calibration: the same corpus under the flat metric matches
  //    dist_affine to 1e-3 relative.
  run(2, "oracle calibration: affine oracle vs dist_affine", [](std::string& d) {
    SuiteOptions opts;
    opts.oracle_nodes = 128;
    opts.oracle_budget = 3000;
    const SuiteReport r2 =
        run_suite(SuiteKind::OracleAffine, corpus_config(2, kBaseSeed + 2), 100, opts);
    const SuiteReport r3 =
        run_suite(SuiteKind::OracleAffine, corpus_config(3, kBaseSeed + 3), 100, opts);
    d = "max rel err n=2: " + sci(r2.max_violation) +
        ", n=3: " + sci(r3.max_violation);
    return r2.pass() && r3.pass();
  });

  // 3. CN comparison inequality: 1e4 cone triples per dimension with apex
  //    sampling and heavy tails, margin >= -1e-9; plus 1e3 field triples
  //    over a 16-atom space.
  run(3, "CN inequality: cone triples (n=2,3) and 16-atom fields", [](std::string& d) {
    SamplerConfig c2 = corpus_config(2, kBaseSeed + 30);
    c2.apex_probability = 0.1;
    c2.heavy_tail = true;
    SamplerConfig c3 = corpus_config(3, kBaseSeed + 31);
    c3.apex_probability = 0.1;
    c3.heavy_tail = true;
    const SuiteReport r2 = run_suite(SuiteKind::CnCone, c2, 10000);
    const SuiteReport r3 = run_suite(SuiteKind::CnCone, c3, 10000);
    SuiteOptions fopts;
    fopts.field_atoms = 16;
    SamplerConfig cf = corpus_config(2, kBaseSeed + 32);
    cf.apex_probability = 0.1;
    cf.heavy_tail = true;
    const SuiteReport rf = run_suite(SuiteKind::CnField, cf, 1000, fopts);
    d = "min margins: " + sci(r2.min_margin) + ", " + sci(r3.min_margin) +
        ", fields " + sci(rf.min_margin) + "; seam hits " +
        std::to_string(r2.seam_count + r3.seam_count);
    return r2.pass() && r3.pass() && rf.pass() && r2.seam_count > 0 &&
           r2.apex_count > 0;
  });

  // 4. Pythagorean splitting of the flat metric: 1e3 pairs,
  //    |d0^2 - d1^2 - dt^2| <= 1e-9 d0^2.
  run(4, "Pythagorean splitting across P1 x R", [](std::string& d) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const int n = 2 + (i % 2);
      const SamplerConfig cfg = corpus_config(n, kBaseSeed + 40);
      RngStream rng = RngStream::for_index(cfg.seed, i);
      const SPDMatrix a = sample_spd(cfg, rng);
      const SPDMatrix b = sample_spd(cfg, rng);
      const SplitPoint sa = split(a);
      const SplitPoint sb = split(b);
      const double d0 = dist_affine(a, b);
      const double d1 = dist_affine(sa.x1.spd(), sb.x1.spd());
      const double dt = sa.t - sb.t;
      worst = std::max(worst,
                       std::abs(d0 * d0 - d1 * d1 - dt * dt) / (d0 * d0));
    }
    d = "max relative defect " + sci(worst);
    return worst <= 1e-9;
  });

  // 5. Invariance: dist_affine under any congruence, the cone distance
  //    under unimodular congruence, both to 1e-10 relative.
  run(5, "congruence invariance of both distances", [](std::string& d) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const int n = 2 + (i % 2);
      const SamplerConfig cfg = corpus_config(n, kBaseSeed + 50);
      RngStream rng = RngStream::for_index(cfg.seed, i);
      const SPDMatrix a = sample_spd(cfg, rng);
      const SPDMatrix b = sample_spd(cfg, rng);
      std::vector<double> g = sample_unimodular(n, rng);

      const double dc = dist_cone(embed(a), embed(b));
      const double dcg = dist_cone(embed(SPDMatrix(congruence(a.sym(), g))),
                                   embed(SPDMatrix(congruence(b.sym(), g))));
      worst = std::max(worst, std::abs(dcg - dc) / dc);

      const double scale = std::exp(rng.next_uniform(-0.5, 0.5));
      for (double& v : g) v *= scale;  // now merely invertible
      const double da = dist_affine(a, b);
      const double dag = dist_affine(SPDMatrix(congruence(a.sym(), g)),
                                     SPDMatrix(congruence(b.sym(), g)));
      worst = std::max(worst, std::abs(dag - da) / da);
    }
    d = "max relative drift " + sci(worst);
    return worst <= 1e-10;
  });

  // 6. Geodesic and midpoint contracts on 1e3 pairs including the
  //    through-apex regime: parametrization and equidistance to 1e-9.
  run(6, "geodesic parametrization and midpoint equidistance", [](std::string& d) {
    double worst = 0.0;
    int seam = 0;
    for (int i = 0; i < 1000; ++i) {
      const int n = 2 + (i % 2);
      SamplerConfig cfg = corpus_config(n, kBaseSeed + 60);
      cfg.apex_probability = 0.1;
      cfg.heavy_tail = true;
      RngStream rng = RngStream::for_index(cfg.seed, i);
      const ConePoint p = sample_cone_point(cfg, rng);
      const ConePoint q = sample_cone_point(cfg, rng);
      if (!p.is_apex() && !q.is_apex() && angle(p, q) >= kPi) ++seam;
      const double dist = dist_cone(p, q);
      const double s = rng.next_double();
      const double u = rng.next_double();
      const ConePoint gs = geodesic_cone(p, q, s);
      const ConePoint gu = geodesic_cone(p, q, u);
      worst = std::max(worst, std::abs(dist_cone(gs, gu) -
                                       std::abs(s - u) * dist));
      const ConePoint m = geodesic_cone(p, q, 0.5);
      worst = std::max(worst, std::abs(dist_cone(p, m) - 0.5 * dist));
      worst = std::max(worst, std::abs(dist_cone(m, q) - 0.5 * dist));
    }
    d = "max defect " + sci(worst) + "; through-apex pairs " +
        std::to_string(seam);
    return worst <= 1e-9 && seam > 0;
  });

  // 7. Density of positive matrices in the completion: approximation
  //    within eps = 1e-3 for 100 sampled points including the apex.
  run(7, "apex and ray points approximated by SPD matrices", [](std::string& d) {
    const double eps = 1e-3;
    double worst = 0.0;
    int apexes = 0;
    for (int i = 0; i < 100; ++i) {
      SamplerConfig cfg = corpus_config(2 + (i % 2), kBaseSeed + 70);
      cfg.apex_probability = 0.3;
      RngStream rng = RngStream::for_index(cfg.seed, i);
      const ConePoint p = sample_cone_point(cfg, rng);
      apexes += p.is_apex();
      worst = std::max(worst,
                       dist_cone(embed(approximate_by_positive(p, eps)), p));
    }
    d = "max distance " + sci(worst) + " vs eps " + sci(eps) + "; apexes " +
        std::to_string(apexes);
    return worst < eps && apexes > 0;
  });

  // 8. The field distance depends only on the measure algebra: random
  //    weight-matching bijections preserve it to 1e-15 relative.
  run(8, "re-indexing invariance of the field distance", [](std::string& d) {
    auto space = make_uniform_space(2, 32);
    SamplerConfig cfg = corpus_config(2, kBaseSeed + 80);
    cfg.apex_probability = 0.1;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      RngStream rng = RngStream::for_index(cfg.seed, i);
      const MetricField f = sample_field(cfg, space, rng);
      const MetricField g = sample_field(cfg, space, rng);
      std::vector<int> perm(space->size());
      for (size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
      for (size_t k = perm.size(); k > 1; --k)
        std::swap(perm[k - 1], perm[rng.next_u64() % k]);
      std::map<std::string, std::string> bij;
      for (size_t k = 0; k < perm.size(); ++k)
        bij[space->atoms()[k].id] = space->atoms()[perm[k]].id;
      const double before = field_dist(f, g);
      const double after = field_dist(reindex(f, bij), reindex(g, bij));
      worst = std::max(worst, std::abs(after - before) / before);
    }
    d = "max relative drift " + sci(worst);
    return worst <= 1e-15;
  });

  // 9. Fréchet means: first-order residual below 1e-7 of the mean distance,
  //    objective no worse than the inputs and the pairwise midpoints.
  run(9, "Fréchet mean optimality on random weighted triples", [](std::string& d) {
    double worst_res = 0.0;
    bool optimal = true;
    for (int i = 0; i < 100; ++i) {
      SamplerConfig cfg = corpus_config(2 + (i % 2), kBaseSeed + 90);
      cfg.apex_probability = 0.1;
      RngStream rng = RngStream::for_index(cfg.seed, i);
      std::vector<ConePoint> pts;
      for (int k = 0; k < 3; ++k) pts.push_back(sample_cone_point(cfg, rng));
      double w[3];
      double sum = 0.0;
      for (double& x : w) {
        x = 0.05 + rng.next_double();
        sum += x;
      }
      for (double& x : w) x /= sum;

      const ConePoint m = frechet_mean(pts, std::span<const double>(w, 3));
      double scale = 0.0;
      for (int k = 0; k < 3; ++k) scale += w[k] * dist_cone(m, pts[k]);
      if (!m.is_apex() && scale > 0.0) {
        double t_rad = 0.0;
        SymMatrix t_ang = SymMatrix::zero(m.dim());
        for (int k = 0; k < 3; ++k) {
          const ConeTangent lg = log_map(m, pts[k]);
          t_rad += w[k] * lg.radial();
          SymMatrix s = lg.angular();
          s *= w[k];
          t_ang += s;
        }
        worst_res = std::max(worst_res,
                             ConeTangent(m, t_rad, t_ang).norm() / scale);
      }

      const double fm = objective(pts, w, m);
      const double slack = 1e-12 * (1.0 + scale * scale);
      for (int k = 0; k < 3; ++k)
        optimal = optimal && fm <= objective(pts, w, pts[k]) + slack;
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
          optimal = optimal &&
                    fm <= objective(pts, w,
                                    geodesic_cone(pts[a], pts[b], 0.5)) + slack;
    }
    d = "max residual/scale " + sci(worst_res) + "; objective minimal: " +
        (optimal ? "yes" : "no");
    return worst_res <= 1e-7 && optimal;
  });

  // 10. Hand-checkable flat sector: x at the apex, y and z at radius 2 with
  //     a right angle between their fibers.
  run(10, "flat-sector case: d(y,z), midpoint radius, CN margin", [](std::string& d) {
    const double u = kPi / 2.0;
    const double dy[] = {std::exp(u), std::exp(-u)};
    const double dz[] = {std::exp(-u), std::exp(u)};
    const ConePoint x = ConePoint::apex(2);
    const ConePoint y = ConePoint::ray(2.0, UnitDetSPD(SPDMatrix::diag(dy)));
    const ConePoint z = ConePoint::ray(2.0, UnitDetSPD(SPDMatrix::diag(dz)));

    const double theta_err = std::abs(angle(y, z) - kPi / 2.0);
    const double dyz_err = std::abs(dist_cone(y, z) - 2.0 * std::sqrt(2.0));
    const double mid_err =
        std::abs(geodesic_cone(y, z, 0.5).radius() - std::sqrt(2.0));
    const double cn_err = std::abs(cn_check(x, y, z));
    d = "angle err " + sci(theta_err) + ", d(y,z) err " + sci(dyz_err) +
        ", midpoint err " + sci(mid_err) + ", CN " + sci(cn_err);
    return theta_err <= 1e-12 && dyz_err <= 1e-10 && mid_err <= 1e-10 &&
           cn_err <= 1e-10;
  });

  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
