#include "spdcone/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace spdcone {

namespace {

// Neumaier-compensated sum over a fixed index order; order-insensitive to
// ~1 ulp, which is what makes re-indexed fields reproduce distances exactly.
double compensated_sum(const std::vector<double>& terms,
                       const std::vector<int>& order) {
  double sum = 0.0, comp = 0.0;
  for (int idx : order) {
    const double t = terms[idx];
    const double next = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - next) + t;
    else
      comp += (t - next) + sum;
    sum = next;
  }
  return sum + comp;
}

void require_same_space(const MetricField& f, const MetricField& g) {
  if (!f.space().same_as(g.space()))
    throw std::invalid_argument("fields: sample spaces do not match");
}

}  // namespace

std::shared_ptr<const SampleSpace> SampleSpace::create(int n,
                                                       std::vector<Atom> atoms,
                                                       bool strict,
                                                       std::string* warning) {
  if (n < 1) throw std::invalid_argument("SampleSpace: dimension must be >= 1");
  if (atoms.empty()) throw std::invalid_argument("SampleSpace: no atoms");
  double sum = 0.0;
  std::set<std::string> seen;
  for (const Atom& a : atoms) {
    if (a.id.empty()) throw std::invalid_argument("SampleSpace: empty atom id");
    if (!seen.insert(a.id).second)
      throw std::invalid_argument("SampleSpace: duplicate atom id '" + a.id + "'");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("SampleSpace: atom '" + a.id +
                                  "' has non-positive weight");
    sum += a.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    if (strict)
      throw std::invalid_argument(
          "SampleSpace: weights sum to " + std::to_string(sum) +
          ", not 1 (strict mode)");
    if (warning)
      *warning = "weights summed to " + std::to_string(sum) + "; normalized";
  }
  if (sum != 1.0)
    for (Atom& a : atoms) a.weight /= sum;

  auto space = std::shared_ptr<SampleSpace>(new SampleSpace());
  space->n_ = n;
  space->atoms_ = std::move(atoms);
  space->order_.resize(space->atoms_.size());
  std::iota(space->order_.begin(), space->order_.end(), 0);
  std::sort(space->order_.begin(), space->order_.end(), [&](int a, int b) {
    return space->atoms_[a].id < space->atoms_[b].id;
  });
  for (size_t i = 0; i < space->atoms_.size(); ++i)
    space->index_[space->atoms_[i].id] = static_cast<int>(i);
  return space;
}

int SampleSpace::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

bool SampleSpace::same_as(const SampleSpace& o) const {
  if (this == &o) return true;
  if (n_ != o.n_ || atoms_.size() != o.atoms_.size()) return false;
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].id != o.atoms_[i].id || atoms_[i].weight != o.atoms_[i].weight)
      return false;
  return true;
}

MetricField::MetricField(std::shared_ptr<const SampleSpace> space,
                         std::vector<ConePoint> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw std::invalid_argument("MetricField: null space");
  if (values_.size() != space_->size())
    throw std::invalid_argument("MetricField: one value per atom required");
  for (const ConePoint& v : values_)
    if (v.dim() != space_->dim())
      throw std::invalid_argument("MetricField: value dimension mismatch");
}

std::vector<double> field_dist_per_atom(const MetricField& f,
                                        const MetricField& g, Exec exec) {
  require_same_space(f, g);
  const int count = static_cast<int>(f.space().size());
  std::vector<double> d(count);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) d[i] = dist_cone(f.value(i), g.value(i));
  } else {
    for (int i = 0; i < count; ++i) d[i] = dist_cone(f.value(i), g.value(i));
  }
  return d;
}

double field_dist(const MetricField& f, const MetricField& g, Exec exec) {
  const std::vector<double> d = field_dist_per_atom(f, g, exec);
  const std::vector<Atom>& atoms = f.space().atoms();
  std::vector<double> terms(d.size());
  for (size_t i = 0; i < d.size(); ++i) terms[i] = atoms[i].weight * d[i] * d[i];
  return std::sqrt(compensated_sum(terms, f.space().order_by_id()));
}

MetricField field_geodesic(const MetricField& f, const MetricField& g, double s,
                           Exec exec) {
  require_same_space(f, g);
  const int count = static_cast<int>(f.space().size());
  std::vector<ConePoint> out(count, ConePoint::apex(f.space().dim()));
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i)
      out[i] = geodesic_cone(f.value(i), g.value(i), s);
  } else {
    for (int i = 0; i < count; ++i)
      out[i] = geodesic_cone(f.value(i), g.value(i), s);
  }
  return MetricField(f.space_ptr(), std::move(out));
}

MetricField field_mean(std::span<const MetricField> fields,
                       std::span<const double> weights, Exec exec) {
  if (fields.empty()) throw std::invalid_argument("field_mean: empty input");
  if (weights.size() != fields.size())
    throw std::invalid_argument("field_mean: weight count mismatch");
  for (size_t j = 1; j < fields.size(); ++j)
    require_same_space(fields[0], fields[j]);

  const int count = static_cast<int>(fields[0].space().size());
  const int k = static_cast<int>(fields.size());
  std::vector<ConePoint> out(count, ConePoint::apex(fields[0].space().dim()));
  std::vector<char> failed(count, 0);

  auto body = [&](int i) {
    std::vector<ConePoint> pts;
    pts.reserve(k);
    for (int j = 0; j < k; ++j) pts.push_back(fields[j].value(i));
    try {
      out[i] = frechet_mean(pts, weights);
    } catch (const convergence_error&) {
      failed[i] = 1;
    }
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) body(i);
  } else {
    for (int i = 0; i < count; ++i) body(i);
  }

  for (int idx : fields[0].space().order_by_id())
    if (failed[idx])
      throw convergence_error("field_mean: atom '" +
                              fields[0].space().atoms()[idx].id +
                              "' did not converge");
  return MetricField(fields[0].space_ptr(), std::move(out));
}

MetricField reindex(const MetricField& f,
                    const std::map<std::string, std::string>& bijection) {
  const SampleSpace& src = f.space();
  std::vector<Atom> atoms;
  atoms.reserve(src.size());
  std::set<std::string> targets;
  for (const Atom& a : src.atoms()) {
    auto it = bijection.find(a.id);
    if (it == bijection.end())
      throw std::invalid_argument("reindex: no image for atom '" + a.id + "'");
    if (!targets.insert(it->second).second)
      throw std::invalid_argument("reindex: not a bijection (image '" +
                                  it->second + "' repeats)");
    atoms.push_back({it->second, a.weight});
  }
  auto target = SampleSpace::create(src.dim(), std::move(atoms));
  return MetricField(target, f.values());
}

MetricField reindex(const MetricField& f,
                    const std::map<std::string, std::string>& bijection,
                    std::shared_ptr<const SampleSpace> target) {
  const SampleSpace& src = f.space();
  if (!target) throw std::invalid_argument("reindex: null target space");
  if (target->dim() != src.dim())
    throw std::invalid_argument("reindex: target dimension mismatch");
  if (target->size() != src.size())
    throw std::invalid_argument("reindex: atom counts differ");
  std::vector<ConePoint> out(target->size(), ConePoint::apex(src.dim()));
  std::vector<char> filled(target->size(), 0);
  for (size_t i = 0; i < src.size(); ++i) {
    const Atom& a = src.atoms()[i];
    auto it = bijection.find(a.id);
    if (it == bijection.end())
      throw std::invalid_argument("reindex: no image for atom '" + a.id + "'");
    const int j = target->index_of(it->second);
    if (j < 0)
      throw std::invalid_argument("reindex: image '" + it->second +
                                  "' is not in the target space");
    if (filled[j])
      throw std::invalid_argument("reindex: not a bijection (image '" +
                                  it->second + "' repeats)");
    if (target->atoms()[j].weight != a.weight)
      throw std::invalid_argument("reindex: weight mismatch at atom '" + a.id +
                                  "' -> '" + it->second + "'");
    out[j] = f.value(static_cast<int>(i));
    filled[j] = 1;
  }
  return MetricField(std::move(target), std::move(out));
}

}  // namespace spdcone
