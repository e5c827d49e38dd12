// Variational path-length oracle. Lengths and distances are computed
// directly from the Riemannian inner products by discrete curve shortening
// (red-black local energy descent), never through the cone reduction or the
// splitting — the two routes must agree without sharing code.

#pragma once

#include <vector>

#include "spdcone/exec.hpp"
#include "spdcone/sym_matrix.hpp"

namespace spdcone {

enum class MetricKind { Affine, Ebin };

/// Piecewise-linear path through K+1 SPD nodes.
struct DiscretePath {
  MetricKind kind;
  std::vector<SPDMatrix> nodes;
};

/// Midpoint-rule length: sum_k sqrt(<d_k, d_k>_{m_k}) with d_k the node
/// difference and m_k the entrywise segment midpoint.
double path_length(const DiscretePath& p);

struct ShortenResult {
  DiscretePath path;
  int sweeps = 0;
  bool stabilized = false;
};

/// Up to `max_sweeps` red-black sweeps; each interior node takes a few
/// damped gradient steps on its two adjacent segment energies (projected to
/// SPD by eigenvalue flooring at 1e-10) and is accepted only when the local
/// length does not increase, so the total length is monotone per sweep.
/// Endpoints stay fixed. Nodes of one color update concurrently under the
/// parallel policy with identical results.
ShortenResult shorten(const DiscretePath& p, int max_sweeps, double step = 1.0,
                      Exec exec = Exec::Parallel);

struct OracleResult {
  double length = 0.0;
  DiscretePath path;
  /// False when the sweep budget ran out before the length stabilized.
  bool converged = false;
  int sweeps_used = 0;
};

/// Distance estimate: shortens both an entrywise-linear and an affine-
/// geodesic initial polyline through a coarse-to-fine ladder up to `nodes`
/// segments, and returns the shorter result. `budget` caps the sweeps spent
/// on each initial polyline across its refinement levels.
OracleResult oracle_dist(const SPDMatrix& a, const SPDMatrix& b,
                         MetricKind kind, int nodes = 128, int budget = 3000,
                         Exec exec = Exec::Parallel);

namespace oracle_detail {

/// Two-segment local energy around an interior node x with frozen
/// neighbors a and b; the quantity each node update descends.
double local_energy(MetricKind kind, const SPDMatrix& a, const SymMatrix& x,
                    const SPDMatrix& b);

/// Analytic gradient of local_energy with respect to x.
SymMatrix local_energy_grad(MetricKind kind, const SPDMatrix& a,
                            const SymMatrix& x, const SPDMatrix& b);

}  // namespace oracle_detail

}  // namespace spdcone
