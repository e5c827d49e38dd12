// spdcone: distances, geodesics, means, and verification suites for the
// cone completion of the SPD manifold and for L^2 fields of cone points.
//
// Exit codes: 0 success, 1 verification failure, 2 input error,
// 3 convergence failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdcone/harness.hpp"
#include "spdcone/json_io.hpp"
#include "spdcone/oracle.hpp"

using nlohmann::json;
using namespace spdcone;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitConvergenceFailure = 3;

struct GlobalFlags {
  int n = 0;
  uint64_t seed = 0;
  std::optional<double> tolerance;  // unset: per-suite default
  std::string output = "json";
  bool serial = false;
};

struct Input {
  enum class Kind { Point, Field };
  Kind kind;
  std::optional<ConePoint> point;
  std::optional<MetricField> field;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json load_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::invalid_argument("cannot open file '" + arg + "'");
  return json::parse(in);
}

// Dimension advertised by a raw document, or 0.
int advertised_n(const json& j) {
  if (!j.is_object()) return 0;
  if (j.contains("n") && j["n"].is_number_integer()) return j["n"].get<int>();
  if (j.contains("x1")) return advertised_n(j["x1"]);
  if (j.contains("matrix")) return advertised_n(j["matrix"]);
  return 0;
}

Input parse_input(const std::string& arg, int n_hint) {
  if (ends_with(arg, ".csv")) {
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("cannot open file '" + arg + "'");
    FieldValidation v = validate_field_csv(in);
    if (!v.field) {
      std::string msg = "invalid CSV field '" + arg + "'";
      for (const std::string& e : v.errors) msg += "; " + e;
      throw std::invalid_argument(msg);
    }
    return Input{Input::Kind::Field, std::nullopt, std::move(*v.field)};
  }
  const json j = load_json_arg(arg);
  if (j.is_object() && j.contains("atoms"))
    return Input{Input::Kind::Field, std::nullopt, parse_field(j)};
  return Input{Input::Kind::Point, parse_cone_point(j, n_hint), std::nullopt};
}

// Parses every argument before any computation; resolves the apex dimension
// from companion inputs or --n.
std::vector<Input> parse_inputs(const std::vector<std::string>& args,
                                const GlobalFlags& g) {
  int hint = g.n;
  std::vector<json> raws;
  for (const std::string& a : args) {
    if (ends_with(a, ".csv")) {
      raws.push_back(json());
      continue;
    }
    raws.push_back(load_json_arg(a));
    const int adv = advertised_n(raws.back());
    if (adv > 0) {
      if (hint > 0 && adv != hint)
        throw std::invalid_argument("inputs disagree on the dimension");
      hint = adv;
    }
  }
  std::vector<Input> inputs;
  for (const std::string& a : args) inputs.push_back(parse_input(a, hint));
  return inputs;
}

void emit(const json& j, const GlobalFlags& g) {
  if (g.output == "json") {
    std::cout << dump_json(j) << "\n";
    return;
  }
  // CSV projection: flat key/value rows; arrays of rows where natural.
  if (j.contains("samples") && j["samples"].is_array()) {
    std::cout << "s,cumulative_length,r\n";
    for (const json& s : j["samples"]) {
      std::string r = "";
      if (s.contains("point") && s["point"].contains("r"))
        r = format_double(s["point"]["r"].get<double>());
      std::cout << format_double(s["s"].get<double>()) << ","
                << format_double(s["cumulative_length"].get<double>()) << ","
                << r << "\n";
    }
    return;
  }
  if (j.contains("per_atom") && j["per_atom"].is_array()) {
    std::cout << "id,distance\n";
    for (const json& a : j["per_atom"])
      std::cout << a["id"].get<std::string>() << ","
                << format_double(a["distance"].get<double>()) << "\n";
    std::cout << "total," << format_double(j["distance"].get<double>()) << "\n";
    return;
  }
  std::cout << "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_number_float())
      std::cout << it.key() << "," << format_double(it.value().get<double>())
                << "\n";
    else if (it.value().is_primitive())
      std::cout << it.key() << "," << it.value().dump() << "\n";
  }
}

Exec exec_of(const GlobalFlags& g) {
  return g.serial ? Exec::Serial : Exec::Parallel;
}

int cmd_dist(const std::vector<std::string>& args, const GlobalFlags& g) {
  const std::vector<Input> in = parse_inputs(args, g);
  if (in[0].kind != in[1].kind)
    throw std::invalid_argument("dist: cannot mix a field with a point");
  json out;
  if (in[0].kind == Input::Kind::Field) {
    const MetricField& f = *in[0].field;
    const MetricField& h = *in[1].field;
    const double d = field_dist(f, h, exec_of(g));
    const std::vector<double> per = field_dist_per_atom(f, h, exec_of(g));
    json atoms = json::array();
    for (int idx : f.space().order_by_id())
      atoms.push_back(json{{"id", f.space().atoms()[idx].id},
                           {"distance", per[idx]}});
    out = json{{"kind", "field"}, {"distance", d}, {"per_atom", atoms}};
  } else {
    out = json{{"kind", "point"},
               {"distance", dist_cone(*in[0].point, *in[1].point)}};
  }
  emit(out, g);
  return kExitOk;
}

int cmd_geodesic(const std::vector<std::string>& args, const GlobalFlags& g,
                 int steps, bool midpoint_only) {
  if (steps < 1) throw std::invalid_argument("geodesic: --steps must be >= 1");
  const std::vector<Input> in = parse_inputs(args, g);
  if (in[0].kind != in[1].kind)
    throw std::invalid_argument("geodesic: cannot mix a field with a point");
  json out;
  if (in[0].kind == Input::Kind::Point) {
    const ConePoint& p = *in[0].point;
    const ConePoint& q = *in[1].point;
    const double d = dist_cone(p, q);
    if (midpoint_only) {
      out = json{{"kind", "point"},
                 {"distance", d},
                 {"midpoint", cone_point_to_json(geodesic_cone(p, q, 0.5))}};
    } else {
      json samples = json::array();
      double cum = 0.0;
      ConePoint prev = p;
      for (int k = 0; k <= steps; ++k) {
        const double s = static_cast<double>(k) / steps;
        const ConePoint gs = geodesic_cone(p, q, s);
        if (k > 0) cum += dist_cone(prev, gs);
        samples.push_back(json{{"s", s},
                               {"point", cone_point_to_json(gs)},
                               {"cumulative_length", cum}});
        prev = gs;
      }
      out = json{{"kind", "point"}, {"distance", d}, {"samples", samples}};
    }
  } else {
    const MetricField& f = *in[0].field;
    const MetricField& h = *in[1].field;
    const double d = field_dist(f, h, exec_of(g));
    if (midpoint_only) {
      out = json{{"kind", "field"},
                 {"distance", d},
                 {"midpoint", field_to_json(field_geodesic(f, h, 0.5, exec_of(g)))}};
    } else {
      json samples = json::array();
      double cum = 0.0;
      std::optional<MetricField> prev;
      for (int k = 0; k <= steps; ++k) {
        const double s = static_cast<double>(k) / steps;
        MetricField gs = field_geodesic(f, h, s, exec_of(g));
        if (k > 0) cum += field_dist(*prev, gs, exec_of(g));
        samples.push_back(json{{"s", s},
                               {"field", field_to_json(gs)},
                               {"cumulative_length", cum}});
        prev = std::move(gs);
      }
      out = json{{"kind", "field"}, {"distance", d}, {"samples", samples}};
    }
  }
  emit(out, g);
  return kExitOk;
}

int cmd_mean(const std::vector<std::string>& args, const GlobalFlags& g,
             const std::string& weights_csv) {
  const std::vector<Input> in = parse_inputs(args, g);
  const size_t k = in.size();
  std::vector<double> w;
  if (weights_csv.empty()) {
    w.assign(k, 1.0 / static_cast<double>(k));
  } else {
    std::stringstream ss(weights_csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) w.push_back(std::stod(cell));
    if (w.size() != k)
      throw std::invalid_argument("mean: need one weight per input");
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) throw std::invalid_argument("mean: negative weight");
      sum += x;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("mean: zero total weight");
    for (double& x : w) x /= sum;
  }
  for (size_t i = 1; i < k; ++i)
    if (in[i].kind != in[0].kind)
      throw std::invalid_argument("mean: cannot mix fields with points");

  json out;
  if (in[0].kind == Input::Kind::Point) {
    std::vector<ConePoint> pts;
    for (const Input& i : in) pts.push_back(*i.point);
    const ConePoint m = frechet_mean(pts, w);
    double residual = 0.0;
    double scale = 0.0;
    if (!m.is_apex()) {
      double t_rad = 0.0;
      SymMatrix t_ang = SymMatrix::zero(m.dim());
      for (size_t i = 0; i < k; ++i) {
        const ConeTangent lg = log_map(m, pts[i]);
        t_rad += w[i] * lg.radial();
        SymMatrix a = lg.angular();
        a *= w[i];
        t_ang += a;
        scale += w[i] * lg.norm();
      }
      residual = ConeTangent(m, t_rad, t_ang).norm();
    }
    out = json{{"kind", "point"},
               {"mean", cone_point_to_json(m)},
               {"residual", residual},
               {"scale", scale},
               {"residual_ok", residual <= 1e-7 * std::max(scale, 1e-300)}};
  } else {
    std::vector<MetricField> fields;
    for (const Input& i : in) fields.push_back(*i.field);
    const MetricField m = field_mean(fields, w, exec_of(g));
    double max_res = 0.0;
    json per = json::array();
    for (int idx : m.space().order_by_id()) {
      const ConePoint& mp = m.value(idx);
      double res = 0.0;
      if (!mp.is_apex()) {
        double t_rad = 0.0;
        SymMatrix t_ang = SymMatrix::zero(mp.dim());
        for (size_t j = 0; j < k; ++j) {
          const ConeTangent lg = log_map(mp, fields[j].value(idx));
          t_rad += w[j] * lg.radial();
          SymMatrix a = lg.angular();
          a *= w[j];
          t_ang += a;
        }
        res = ConeTangent(mp, t_rad, t_ang).norm();
      }
      max_res = std::max(max_res, res);
      per.push_back(json{{"id", m.space().atoms()[idx].id}, {"residual", res}});
    }
    out = json{{"kind", "field"},
               {"mean", field_to_json(m)},
               {"max_residual", max_res},
               {"per_atom", per}};
  }
  emit(out, g);
  return kExitOk;
}

SamplerConfig make_config(const GlobalFlags& g, int n, double apex_prob,
                          double anisotropy, bool heavy_tail, double lo,
                          double hi) {
  SamplerConfig cfg;
  cfg.n = n;
  cfg.seed = g.seed;
  cfg.apex_probability = apex_prob;
  cfg.anisotropy = anisotropy;
  cfg.heavy_tail = heavy_tail;
  cfg.log_det_lo = lo;
  cfg.log_det_hi = hi;
  return cfg;
}

int run_and_emit_suites(const std::vector<SuiteKind>& kinds,
                        const SamplerConfig& cfg, int64_t samples,
                        const SuiteOptions& opts, const GlobalFlags& g) {
  json reports = json::array();
  bool all_pass = true;
  for (SuiteKind kind : kinds) {
    const SuiteReport rep = run_suite(kind, cfg, samples, opts, exec_of(g));
    all_pass = all_pass && rep.pass();
    reports.push_back(rep.to_json());
  }
  emit(reports.size() == 1 ? reports[0] : json{{"suites", reports}}, g);
  return all_pass ? kExitOk : kExitVerificationFailure;
}

int cmd_info(const std::string& arg, const GlobalFlags& g) {
  const Input in = parse_inputs({arg}, g)[0];
  json out;
  if (in.kind == Input::Kind::Field) {
    const MetricField& f = *in.field;
    int apex_atoms = 0;
    for (const ConePoint& p : f.values()) apex_atoms += p.is_apex();
    double wsum = 0.0;
    for (const Atom& a : f.space().atoms()) wsum += a.weight;
    out = json{{"kind", "field"},
               {"n", f.space().dim()},
               {"atoms", f.space().size()},
               {"apex_atoms", apex_atoms},
               {"weight_sum", wsum}};
  } else {
    const ConePoint& p = *in.point;
    out = json{{"kind", "point"}, {"n", p.dim()}, {"apex", p.is_apex()}};
    if (!p.is_apex()) {
      out["r"] = p.radius();
      const SPDMatrix m = to_matrix(p);
      out["log_det"] = m.log_det();
      out["eigenvalues"] = m.eig().values;
    }
  }
  emit(out, g);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cone-completion geometry of the SPD manifold: distances, "
               "geodesics, means, and verification suites"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--n", g.n, "Dimension hint for inputs that omit it");
  app.add_option("--seed", g.seed, "Random seed for the check suites");
  app.add_option("--tolerance", g.tolerance,
                 "Violation tolerance override for the check suites");
  app.add_option("--output", g.output, "Output mode")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--serial", g.serial, "Disable parallel execution");

  // dist
  auto* dist = app.add_subcommand("dist", "Distance between two inputs");
  std::vector<std::string> dist_args;
  dist->add_option("inputs", dist_args, "Two points/matrices/fields")
      ->expected(2)
      ->required();

  // geodesic / midpoint
  auto* geo = app.add_subcommand("geodesic", "Sample the geodesic");
  std::vector<std::string> geo_args;
  int geo_steps = 8;
  geo->add_option("inputs", geo_args, "Two points/matrices/fields")
      ->expected(2)
      ->required();
  geo->add_option("--steps", geo_steps, "Number of segments (K >= 1)");

  auto* mid = app.add_subcommand("midpoint", "Geodesic midpoint (s = 1/2)");
  std::vector<std::string> mid_args;
  mid->add_option("inputs", mid_args, "Two points/matrices/fields")
      ->expected(2)
      ->required();

  // mean
  auto* mean = app.add_subcommand("mean", "Weighted Fréchet mean");
  std::vector<std::string> mean_args;
  std::string mean_weights;
  mean->add_option("inputs", mean_args, "k points or k fields")
      ->expected(-1)
      ->required();
  mean->add_option("--weights", mean_weights,
                   "Comma-separated weights (default: equal)");

  // cat0-check
  auto* cat0 = app.add_subcommand("cat0-check", "Randomized property suites");
  std::string suite = "cn_cone";
  int64_t samples = 1000;
  int cat0_n = 2;
  double apex_prob = 0.1, anisotropy = 1.0, lo = -2.0, hi = 2.0, epsilon = 1e-3;
  bool heavy_tail = false;
  int atoms = 16;
  cat0->add_option("--suite", suite, "Suite to run")
      ->check(CLI::IsMember({"cn_cone", "cn_field", "metric_axioms",
                             "geodesic_consistency", "completeness", "all"}));
  cat0->add_option("--samples", samples, "Iteration count");
  cat0->add_option("--n", cat0_n, "Matrix dimension");
  cat0->add_option("--apex-prob", apex_prob, "Apex sampling probability");
  cat0->add_option("--anisotropy", anisotropy, "Log-eigenvalue spread");
  cat0->add_flag("--heavy-tail", heavy_tail, "Cauchy-scaled log-eigenvalues");
  cat0->add_option("--log-det-lo", lo, "Lower log-determinant bound");
  cat0->add_option("--log-det-hi", hi, "Upper log-determinant bound");
  cat0->add_option("--atoms", atoms, "Atom count for field suites");
  cat0->add_option("--epsilon", epsilon, "Radius for the completeness suite");

  // oracle-check
  auto* ocheck = app.add_subcommand(
      "oracle-check", "Variational oracle vs. the closed-form distances");
  int64_t pairs = 100;
  int nodes = 128, budget = 3000, oracle_n = 2;
  std::string metric = "ebin";
  double olo = -2.0, ohi = 2.0, oanis = 1.0;
  ocheck->add_option("--pairs", pairs, "Number of random pairs");
  ocheck->add_option("--nodes", nodes, "Path segments");
  ocheck->add_option("--budget", budget, "Total shortening sweep budget");
  ocheck->add_option("--n", oracle_n, "Matrix dimension");
  ocheck->add_option("--metric", metric, "Metric to check")
      ->check(CLI::IsMember({"ebin", "affine"}));
  ocheck->add_option("--log-det-lo", olo, "Lower log-determinant bound");
  ocheck->add_option("--log-det-hi", ohi, "Upper log-determinant bound");
  ocheck->add_option("--anisotropy", oanis, "Log-eigenvalue spread");

  // validate
  auto* validate = app.add_subcommand("validate", "Validate a field document");
  std::string validate_arg;
  bool strict = false;
  validate->add_option("input", validate_arg, "Field JSON or CSV")->required();
  validate->add_flag("--strict", strict,
                     "Reject weight sums different from 1");

  // info
  auto* info = app.add_subcommand("info", "Describe an input");
  std::string info_arg;
  info->add_option("input", info_arg, "Point/matrix/field")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (dist->parsed()) return cmd_dist(dist_args, g);
    if (geo->parsed()) return cmd_geodesic(geo_args, g, geo_steps, false);
    if (mid->parsed()) return cmd_geodesic(mid_args, g, 2, true);
    if (mean->parsed()) return cmd_mean(mean_args, g, mean_weights);
    if (cat0->parsed()) {
      const SamplerConfig cfg =
          make_config(g, cat0_n, apex_prob, anisotropy, heavy_tail, lo, hi);
      SuiteOptions opts;
      opts.field_atoms = atoms;
      opts.epsilon = epsilon;
      if (g.tolerance) opts.tolerance = *g.tolerance;
      std::vector<SuiteKind> kinds;
      if (suite == "all")
        kinds = {SuiteKind::CnCone, SuiteKind::CnField, SuiteKind::MetricAxioms,
                 SuiteKind::GeodesicConsistency, SuiteKind::Completeness};
      else if (suite == "cn_cone")
        kinds = {SuiteKind::CnCone};
      else if (suite == "cn_field")
        kinds = {SuiteKind::CnField};
      else if (suite == "metric_axioms")
        kinds = {SuiteKind::MetricAxioms};
      else if (suite == "geodesic_consistency")
        kinds = {SuiteKind::GeodesicConsistency};
      else
        kinds = {SuiteKind::Completeness};
      return run_and_emit_suites(kinds, cfg, samples, opts, g);
    }
    if (ocheck->parsed()) {
      const SamplerConfig cfg =
          make_config(g, oracle_n, 0.0, oanis, false, olo, ohi);
      SuiteOptions opts;
      opts.oracle_nodes = nodes;
      opts.oracle_budget = budget;
      if (g.tolerance) opts.tolerance = *g.tolerance;
      const SuiteKind kind =
          metric == "affine" ? SuiteKind::OracleAffine : SuiteKind::OracleEquiv;
      return run_and_emit_suites({kind}, cfg, pairs, opts, g);
    }
    if (validate->parsed()) {
      FieldValidation v;
      if (ends_with(validate_arg, ".csv")) {
        std::ifstream in(validate_arg);
        if (!in)
          throw std::invalid_argument("cannot open file '" + validate_arg + "'");
        v = validate_field_csv(in, strict);
      } else {
        v = validate_field(load_json_arg(validate_arg), strict);
      }
      json out{{"valid", v.field.has_value()},
               {"errors", v.errors},
               {"warnings", v.warnings}};
      if (v.field) {
        out["n"] = v.field->space().dim();
        out["atoms"] = v.field->space().size();
      }
      emit(out, g);
      return v.field ? kExitOk : kExitInputError;
    }
    if (info->parsed()) return cmd_info(info_arg, g);
  } catch (const convergence_error& e) {
    std::cerr << dump_json(json{{"error", e.what()}}) << "\n";
    return kExitConvergenceFailure;
  } catch (const json::exception& e) {
    std::cerr << dump_json(json{{"error", e.what()}}) << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << dump_json(json{{"error", e.what()}}) << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
