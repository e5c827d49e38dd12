// Timing comparison of the serial reference paths against the OpenMP
// kernels: suite iterations, per-atom field work, and red-black shortening
// sweeps. Results must match bit-for-bit; the benchmark checks that too.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "spdcone/harness.hpp"
#include "spdcone/json_io.hpp"
#include "spdcone/oracle.hpp"

using namespace spdcone;

namespace {

double time_of(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

void row(const std::string& name, double serial_s, double parallel_s,
         bool identical) {
  std::printf("%-34s %10.3fs %10.3fs %7.2fx   %s\n", name.c_str(), serial_s,
              parallel_s, serial_s / parallel_s,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", max_threads());
  std::printf("%-34s %11s %11s %8s   %s\n", "kernel", "serial", "openmp",
              "speedup", "outputs");

  {
    SamplerConfig cfg;
    cfg.n = 3;
    cfg.seed = 17;
    cfg.apex_probability = 0.1;
    cfg.heavy_tail = true;
    SuiteReport rs, rp;
    const double ts =
        time_of([&] { rs = run_suite(SuiteKind::CnCone, cfg, 20000, {}, Exec::Serial); });
    const double tp =
        time_of([&] { rp = run_suite(SuiteKind::CnCone, cfg, 20000, {}, Exec::Parallel); });
    row("cn_cone suite, 2e4 triples, n=3", ts, tp,
        dump_json(rs.to_json()) == dump_json(rp.to_json()));
  }

  {
    SamplerConfig cfg;
    cfg.n = 2;
    cfg.seed = 23;
    auto space = make_uniform_space(2, 512);
    RngStream rng(99);
    std::vector<MetricField> fields;
    for (int j = 0; j < 3; ++j) fields.push_back(sample_field(cfg, space, rng));
    const std::vector<double> w{0.5, 0.3, 0.2};
    MetricField ms = fields[0], mp = fields[0];
    const double ts = time_of([&] { ms = field_mean(fields, w, Exec::Serial); });
    const double tp = time_of([&] { mp = field_mean(fields, w, Exec::Parallel); });
    row("field_mean, 512 atoms, k=3", ts, tp,
        dump_json(field_to_json(ms)) == dump_json(field_to_json(mp)));
  }

  {
    SamplerConfig cfg;
    cfg.n = 3;
    cfg.seed = 31;
    RngStream rng(5);
    const SPDMatrix a = sample_spd(cfg, rng);
    const SPDMatrix b = sample_spd(cfg, rng);
    DiscretePath path{MetricKind::Ebin, {}};
    const int segs = 512;
    const int n = a.dim();
    for (int k = 0; k <= segs; ++k) {
      const double w = static_cast<double>(k) / segs;
      SymMatrix s = SymMatrix::zero(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          s.set(i, j, (1.0 - w) * a(i, j) + w * b(i, j));
      path.nodes.emplace_back(s);
    }
    ShortenResult ss, sp;
    const double ts = time_of([&] { ss = shorten(path, 200, 1.0, Exec::Serial); });
    const double tp = time_of([&] { sp = shorten(path, 200, 1.0, Exec::Parallel); });
    bool same = ss.sweeps == sp.sweeps && ss.path.nodes.size() == sp.path.nodes.size();
    if (same)
      for (size_t i = 0; i < ss.path.nodes.size(); ++i)
        same = same && ss.path.nodes[i].same_entries(sp.path.nodes[i]);
    row("shorten, 512 segments, 200 sweeps", ts, tp, same);
  }

  return 0;
}
