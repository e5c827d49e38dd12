// Randomized property-test engine: CN comparison inequalities, metric
// axioms, geodesic contracts, oracle cross-checks, and completeness probes.
// Every iteration derives its own random stream from (seed, index), so
// suites are reproducible and schedule-independent; the parallel policy
// produces bit-identical reports to the serial one.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "spdcone/exec.hpp"
#include "spdcone/fields.hpp"
#include "spdcone/rng.hpp"

namespace spdcone {

struct SamplerConfig {
  int n = 2;
  double log_det_lo = -2.0;
  double log_det_hi = 2.0;
  /// Half-width of the log-eigenvalue spread before the determinant shift.
  double anisotropy = 1.0;
  double apex_probability = 0.0;
  /// Cauchy-scaled log-eigenvalues (clipped at +-20) instead of uniform;
  /// stresses near-degenerate fibers and the theta >= pi seam.
  bool heavy_tail = false;
  uint64_t seed = 0;
};

enum class SuiteKind {
  CnCone,
  CnField,
  MetricAxioms,
  GeodesicConsistency,
  OracleEquiv,    // ebin oracle vs. the cone closed form
  OracleAffine,   // oracle calibration against dist_affine
  Completeness,
};

const char* suite_name(SuiteKind k);

struct SuiteOptions {
  /// Atom count for field suites.
  int field_atoms = 16;
  /// Oracle discretization and sweep budget for the oracle suites.
  int oracle_nodes = 128;
  int oracle_budget = 3000;
  /// Approximation radius for the completeness suite.
  double epsilon = 1e-3;
  /// Overrides the per-suite default violation tolerance.
  std::optional<double> tolerance;
};

struct SuiteFailure {
  int64_t index = 0;
  uint64_t seed = 0;  // suite seed; the stream is (seed, index)
  double margin = 0.0;
  nlohmann::json inputs;
};

/// Margins are signed slack: negative means a defect. For the CN suites the
/// margin is the raw comparison-inequality margin (nonnegative in CAT(0));
/// for error-style suites it is minus the observed error.
struct SuiteReport {
  std::string suite;
  int n = 0;
  int64_t samples = 0;
  double tolerance = 0.0;
  double max_violation = 0.0;  // max(0, -min margin)
  double mean_margin = 0.0;
  double min_margin = 0.0;
  /// Coverage counters: sampled apex points and distance evaluations that
  /// took the through-apex (theta >= pi) branch.
  int64_t apex_count = 0;
  int64_t seam_count = 0;
  /// The argmin-margin iteration, reproduced with its exact inputs.
  std::optional<SuiteFailure> worst;
  /// Iterations with margin < -tolerance (at most 64 retained).
  std::vector<SuiteFailure> failures;
  int64_t failure_count = 0;

  bool pass() const { return failure_count == 0; }
  nlohmann::json to_json() const;
};

/// Random SPD matrix: Haar-ish orthogonal basis (Gram-Schmidt of a Gaussian
/// matrix), log-eigenvalues spread by `anisotropy`, then shifted so that
/// log det is uniform in [log_det_lo, log_det_hi].
SPDMatrix sample_spd(const SamplerConfig& cfg, RngStream& rng);

/// Apex with probability apex_probability, otherwise an embedded sample_spd.
ConePoint sample_cone_point(const SamplerConfig& cfg, RngStream& rng);

MetricField sample_field(const SamplerConfig& cfg,
                         std::shared_ptr<const SampleSpace> space,
                         RngStream& rng);

/// Random invertible matrix with |det| = 1 (row-major n x n buffer).
std::vector<double> sample_unimodular(int n, RngStream& rng);

/// Equal-weight space with ids "a0000", "a0001", ...
std::shared_ptr<const SampleSpace> make_uniform_space(int n, int atoms);

/// Bruhat-Tits CN margin: 1/2 d(x,y)^2 + 1/2 d(x,z)^2 - 1/4 d(y,z)^2
/// - d(x,m)^2 with m the geodesic midpoint of y and z. Nonnegative for all
/// triples exactly when the space is CAT(0).
double cn_check(const ConePoint& x, const ConePoint& y, const ConePoint& z);

SuiteReport run_suite(SuiteKind kind, const SamplerConfig& cfg,
                      int64_t iterations, const SuiteOptions& opts = {},
                      Exec exec = Exec::Parallel);

}  // namespace spdcone
