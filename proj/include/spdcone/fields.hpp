// L^2 space of cone-valued fields over a finite weighted sample space.
// Geometry of the base is deliberately absent: only atom ids and weights
// matter. Per-atom work parallelizes; the distance reduction always runs
// in ascending atom-id order (compensated summation), so serial and
// parallel execution produce identical bits.

#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spdcone/cone.hpp"
#include "spdcone/exec.hpp"

namespace spdcone {

struct Atom {
  std::string id;
  double weight;
};

class SampleSpace {
 public:
  /// Validates ids (nonempty, unique) and weights (positive, finite), and
  /// normalizes the total weight to 1. In strict mode a total differing
  /// from 1 by more than 1e-12 is rejected instead. If `warning` is given
  /// it receives a note when normalization actually changed the weights.
  static std::shared_ptr<const SampleSpace> create(int n, std::vector<Atom> atoms,
                                                   bool strict = false,
                                                   std::string* warning = nullptr);

  int dim() const { return n_; }
  size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  /// Atom indices sorted by ascending id; the canonical reduction order.
  const std::vector<int>& order_by_id() const { return order_; }
  /// Index of an atom id, or -1.
  int index_of(const std::string& id) const;

  /// Structural equality: same dimension, ids in the same order, and
  /// bitwise-equal weights.
  bool same_as(const SampleSpace& o) const;

 private:
  SampleSpace() = default;
  int n_ = 0;
  std::vector<Atom> atoms_;
  std::vector<int> order_;
  std::map<std::string, int> index_;
};

/// One ConePoint per atom of a SampleSpace.
class MetricField {
 public:
  MetricField(std::shared_ptr<const SampleSpace> space,
              std::vector<ConePoint> values);

  const SampleSpace& space() const { return *space_; }
  const std::shared_ptr<const SampleSpace>& space_ptr() const { return space_; }
  const std::vector<ConePoint>& values() const { return values_; }
  const ConePoint& value(int atom_index) const { return values_[atom_index]; }

 private:
  std::shared_ptr<const SampleSpace> space_;
  std::vector<ConePoint> values_;
};

/// sqrt(sum_i w_i dist_cone(f_i, g_i)^2), reduced in ascending atom-id order.
double field_dist(const MetricField& f, const MetricField& g,
                  Exec exec = Exec::Parallel);

/// Per-atom cone distances, in atom storage order.
std::vector<double> field_dist_per_atom(const MetricField& f,
                                        const MetricField& g,
                                        Exec exec = Exec::Parallel);

/// Pointwise geodesic; geodesics in L^2 of a CAT(0) target are pointwise.
MetricField field_geodesic(const MetricField& f, const MetricField& g, double s,
                           Exec exec = Exec::Parallel);

/// Pointwise Fréchet mean; reports the offending atom id on non-convergence.
MetricField field_mean(std::span<const MetricField> fields,
                       std::span<const double> weights,
                       Exec exec = Exec::Parallel);

/// Transports f along an id bijection with exactly matching weights. With no
/// target space given, the target is constructed from the bijection.
MetricField reindex(const MetricField& f,
                    const std::map<std::string, std::string>& bijection);
MetricField reindex(const MetricField& f,
                    const std::map<std::string, std::string>& bijection,
                    std::shared_ptr<const SampleSpace> target);

}  // namespace spdcone
