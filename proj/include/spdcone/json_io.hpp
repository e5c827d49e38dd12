// JSON and CSV schemas.
//
//   matrix     {"n": int, "entries": [[...], ...]}   row-major, symmetric to
//                                                    1e-9 relative or rejected
//   cone point {"apex": true} | {"r": float, "x1": matrix} | {"matrix": matrix}
//              (the last form is an SPD matrix embedded implicitly)
//   field      {"n": int, "atoms": [{"id": str, "weight": float,
//                                    "value": cone-point-or-matrix}, ...]}
//   CSV field  one row per atom: id, weight, n^2 matrix entries row-major
//
// All floating-point output is printed with 17 significant digits.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdcone/fields.hpp"
#include "spdcone/oracle.hpp"

namespace spdcone {

nlohmann::json matrix_to_json(const SymMatrix& m);
SymMatrix parse_sym_matrix(const nlohmann::json& j);
SPDMatrix parse_spd_matrix(const nlohmann::json& j);

nlohmann::json cone_point_to_json(const ConePoint& p);
/// `n_hint` resolves the dimension of a bare {"apex": true}; 0 means unknown.
ConePoint parse_cone_point(const nlohmann::json& j, int n_hint = 0);

nlohmann::json field_to_json(const MetricField& f);

struct FieldValidation {
  std::optional<MetricField> field;  // set iff errors is empty
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

/// Parses and validates a field document, collecting per-atom diagnostics
/// instead of throwing. Strict mode rejects weight sums differing from 1.
FieldValidation validate_field(const nlohmann::json& doc, bool strict = false);

/// validate_field that throws std::invalid_argument on any error.
MetricField parse_field(const nlohmann::json& doc, bool strict = false);

/// CSV import (matrices only; values are embedded).
FieldValidation validate_field_csv(std::istream& in, bool strict = false);

nlohmann::json path_to_json(const DiscretePath& p);

/// Serializer with doubles formatted to 17 significant digits ("%.17g");
/// indent < 0 emits a single line.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// "%.17g" for one value.
std::string format_double(double v);

}  // namespace spdcone
