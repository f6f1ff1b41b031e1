#pragma once

#include "slrkit/screen.hpp"
#include "slrkit/types.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slrkit::kg {

enum class Datatype { string, integer, decimal, boolean, year };

struct Object {
  bool is_id = false;
  std::string value;
  Datatype datatype = Datatype::string;  // literals only

  bool operator==(const Object&) const = default;
};

struct Statement {
  std::string subject;
  std::string predicate;
  Object object;

  bool operator==(const Statement&) const = default;
  bool operator<(const Statement& o) const;
};

inline constexpr std::string_view kTypePredicate = "type";
inline constexpr std::string_view kPaperClass = "Paper";

/// Datatype of a cell value. Four-digit values of a property named like "year"
/// are years; other whole numbers are integers.
Datatype infer_datatype(std::string_view property, std::string_view value);

/// Metadata statements (type, title, year, author) for every contribution, then
/// one statement per cell value. Sorted.
std::vector<Statement> emit_kg(const screen::ComparisonTable& comparison, const std::vector<Metadata>& metadata);

/// `subject<TAB>predicate<TAB>object`; literals print as JSON strings with `^^datatype`, ids as `<id>`.
std::string triples_text(const std::vector<Statement>& statements);
nlohmann::json statements_json(const std::vector<Statement>& statements);

struct PropertyShape {
  std::string path;
  bool required = false;
  long min = 0;
  std::optional<long> max;  // unbounded when absent
  std::optional<Datatype> datatype;
};

struct Shape {
  std::string target_class;
  std::vector<PropertyShape> properties;
};

/// JSON shape file; throws ConfigError when malformed.
std::vector<Shape> parse_shapes(std::string_view json_text);
const std::vector<Shape>& default_shapes();

struct ShapeViolation {
  std::string subject;
  std::string path;
  std::string kind;  // missing-required | cardinality | datatype
  std::string detail;
};

/// A missing required property is reported once, not also as a cardinality breach.
std::vector<ShapeViolation> validate_shapes(const std::vector<Statement>& statements, const std::vector<Shape>& shapes);

std::string to_string(Datatype d);
std::optional<Datatype> datatype_from_string(std::string_view s);
void to_json(nlohmann::json& j, const ShapeViolation& v);

}  // namespace slrkit::kg
