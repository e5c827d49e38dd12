#include "spdcone/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <set>
#include <sstream>

namespace spdcone {

using nlohmann::json;

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double get_number(const json& j, const std::string& what) {
  require(j.is_number(), what + ": expected a number");
  return j.get<double>();
}

}  // namespace

json matrix_to_json(const SymMatrix& m) {
  const int n = m.dim();
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"n", n}, {"entries", std::move(rows)}};
}

SymMatrix parse_sym_matrix(const json& j) {
  require(j.is_object(), "matrix: expected an object");
  require(j.contains("n") && j["n"].is_number_integer(),
          "matrix: missing integer field 'n'");
  const int n = j["n"].get<int>();
  require(n >= 1, "matrix: n must be >= 1");
  require(j.contains("entries") && j["entries"].is_array() &&
              j["entries"].size() == static_cast<size_t>(n),
          "matrix: 'entries' must be an array of n rows");
  std::vector<double> e(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const json& row = j["entries"][i];
    require(row.is_array() && row.size() == static_cast<size_t>(n),
            "matrix: row " + std::to_string(i) + " must have n entries");
    for (int c = 0; c < n; ++c)
      e[static_cast<size_t>(i) * n + c] =
          get_number(row[c], "matrix entry");
  }
  // Schema-level symmetry tolerance is 1e-9 relative; symmetrize what passes.
  try {
    return SymMatrix::from_entries(n, e, 1e-9);
  } catch (const std::invalid_argument& ex) {
    throw std::invalid_argument(std::string("matrix: ") + ex.what());
  }
}

SPDMatrix parse_spd_matrix(const json& j) {
  try {
    return SPDMatrix(parse_sym_matrix(j));
  } catch (const std::invalid_argument& ex) {
    throw std::invalid_argument(ex.what());
  }
}

json cone_point_to_json(const ConePoint& p) {
  if (p.is_apex()) return json{{"apex", true}};
  return json{{"r", p.radius()}, {"x1", matrix_to_json(p.fiber().sym())}};
}

ConePoint parse_cone_point(const json& j, int n_hint) {
  require(j.is_object(), "cone point: expected an object");
  if (j.contains("apex")) {
    require(j["apex"].is_boolean() && j["apex"].get<bool>(),
            "cone point: 'apex' must be true");
    require(n_hint >= 1,
            "cone point: cannot determine the dimension of an apex; supply "
            "--n or a companion input");
    return ConePoint::apex(n_hint);
  }
  if (j.contains("r")) {
    require(j.contains("x1"), "cone point: ray form requires 'x1'");
    const double r = get_number(j["r"], "cone point 'r'");
    SPDMatrix x1 = parse_spd_matrix(j["x1"]);
    if (n_hint >= 1 && x1.dim() != n_hint)
      throw std::invalid_argument("cone point: dimension mismatch");
    return ConePoint::ray(r, UnitDetSPD(std::move(x1)));
  }
  if (j.contains("matrix")) {
    SPDMatrix m = parse_spd_matrix(j["matrix"]);
    if (n_hint >= 1 && m.dim() != n_hint)
      throw std::invalid_argument("cone point: dimension mismatch");
    return embed(m);
  }
  if (j.contains("entries")) {  // bare matrix literal
    SPDMatrix m = parse_spd_matrix(j);
    if (n_hint >= 1 && m.dim() != n_hint)
      throw std::invalid_argument("cone point: dimension mismatch");
    return embed(m);
  }
  throw std::invalid_argument(
      "cone point: expected one of {\"apex\"}, {\"r\",\"x1\"}, {\"matrix\"} "
      "or a matrix literal");
}

json field_to_json(const MetricField& f) {
  json atoms = json::array();
  const SampleSpace& s = f.space();
  for (size_t i = 0; i < s.size(); ++i)
    atoms.push_back(json{{"id", s.atoms()[i].id},
                         {"weight", s.atoms()[i].weight},
                         {"value", cone_point_to_json(f.value(static_cast<int>(i)))}});
  return json{{"n", s.dim()}, {"atoms", std::move(atoms)}};
}

FieldValidation validate_field(const json& doc, bool strict) {
  FieldValidation out;
  auto fail = [&out](const std::string& msg) { out.errors.push_back(msg); };

  if (!doc.is_object()) {
    fail("field: expected an object");
    return out;
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer() ||
      doc["n"].get<int>() < 1) {
    fail("field: missing integer field 'n'");
    return out;
  }
  const int n = doc["n"].get<int>();
  if (!doc.contains("atoms") || !doc["atoms"].is_array() ||
      doc["atoms"].empty()) {
    fail("field: 'atoms' must be a non-empty array");
    return out;
  }

  std::vector<Atom> atoms;
  std::vector<ConePoint> values;
  std::set<std::string> seen;
  for (size_t i = 0; i < doc["atoms"].size(); ++i) {
    const json& entry = doc["atoms"][i];
    const std::string label = "atom #" + std::to_string(i);
    if (!entry.is_object()) {
      fail(label + ": expected an object");
      continue;
    }
    if (!entry.contains("id") || !entry["id"].is_string()) {
      fail(label + ": missing string 'id'");
      continue;
    }
    const std::string id = entry["id"].get<std::string>();
    if (!seen.insert(id).second) {
      fail("atom '" + id + "': duplicate id");
      continue;
    }
    if (!entry.contains("weight") || !entry["weight"].is_number()) {
      fail("atom '" + id + "': missing numeric 'weight'");
      continue;
    }
    const double w = entry["weight"].get<double>();
    if (!(w > 0.0) || !std::isfinite(w)) {
      fail("atom '" + id + "': weight must be positive and finite");
      continue;
    }
    if (!entry.contains("value")) {
      fail("atom '" + id + "': missing value");
      continue;
    }
    try {
      ConePoint p = parse_cone_point(entry["value"], n);
      atoms.push_back({id, w});
      values.push_back(std::move(p));
    } catch (const std::exception& ex) {
      fail("atom '" + id + "': " + ex.what());
    }
  }
  if (!out.errors.empty()) return out;

  try {
    std::string warning;
    auto space = SampleSpace::create(n, std::move(atoms), strict, &warning);
    if (!warning.empty()) out.warnings.push_back("field: " + warning);
    out.field.emplace(std::move(space), std::move(values));
  } catch (const std::exception& ex) {
    fail(std::string("field: ") + ex.what());
  }
  return out;
}

MetricField parse_field(const json& doc, bool strict) {
  FieldValidation v = validate_field(doc, strict);
  if (!v.field) {
    std::string msg = "invalid field";
    for (const std::string& e : v.errors) msg += "; " + e;
    throw std::invalid_argument(msg);
  }
  return std::move(*v.field);
}

FieldValidation validate_field_csv(std::istream& in, bool strict) {
  FieldValidation out;
  json atoms = json::array();
  std::string line;
  int n = 0;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3) {
      out.errors.push_back("csv line " + std::to_string(lineno) +
                           ": expected id, weight, n^2 entries");
      continue;
    }
    // A non-numeric second column on the first line is a header; skip it.
    char* end = nullptr;
    std::strtod(cells[1].c_str(), &end);
    if (lineno == 1 && end == cells[1].c_str()) continue;

    const size_t k = cells.size() - 2;
    const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k))));
    if (static_cast<size_t>(dim) * dim != k || dim < 1) {
      out.errors.push_back("csv line " + std::to_string(lineno) + ": " +
                           std::to_string(k) + " entries is not a square count");
      continue;
    }
    if (n == 0) n = dim;
    json entries = json::array();
    bool ok = true;
    for (int i = 0; i < dim && ok; ++i) {
      json row = json::array();
      for (int j = 0; j < dim; ++j) {
        const std::string& c = cells[2 + static_cast<size_t>(i) * dim + j];
        char* e2 = nullptr;
        const double v = std::strtod(c.c_str(), &e2);
        if (e2 == c.c_str() || !std::isfinite(v)) {
          out.errors.push_back("csv line " + std::to_string(lineno) +
                               ": bad entry '" + c + "'");
          ok = false;
          break;
        }
        row.push_back(v);
      }
      entries.push_back(std::move(row));
    }
    if (!ok) continue;
    char* e3 = nullptr;
    const double w = std::strtod(cells[1].c_str(), &e3);
    atoms.push_back(json{{"id", cells[0]},
                         {"weight", w},
                         {"value", json{{"n", dim}, {"entries", entries}}}});
  }
  if (!out.errors.empty()) return out;
  if (atoms.empty() || n == 0) {
    out.errors.push_back("csv: no atoms found");
    return out;
  }
  FieldValidation v = validate_field(json{{"n", n}, {"atoms", atoms}}, strict);
  v.errors.insert(v.errors.begin(), out.errors.begin(), out.errors.end());
  return v;
}

json path_to_json(const DiscretePath& p) {
  json nodes = json::array();
  for (const SPDMatrix& m : p.nodes) nodes.push_back(matrix_to_json(m.sym()));
  return json{{"metric", p.kind == MetricKind::Affine ? "affine" : "ebin"},
              {"nodes", std::move(nodes)}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  const std::string pad(indent > 0 ? static_cast<size_t>(indent) * depth : 0, ' ');
  const std::string pad_in(indent > 0 ? static_cast<size_t>(indent) * (depth + 1) : 0,
                           ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad_in;
        out += json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += pad;
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) {
          out += ",";
          out += nl;
        }
        out += pad_in;
        dump_rec(j[i], indent, depth + 1, out);
      }
      out += nl;
      out += pad;
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

}  // namespace spdcone
