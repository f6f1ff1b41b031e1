#include "slrkit/shapes.hpp"

#include "slrkit/embedded_data.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/unicode.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <tuple>

namespace slrkit::kg {

using nlohmann::json;

bool Statement::operator<(const Statement& o) const {
  return std::tie(subject, predicate, object.is_id, object.value, object.datatype) <
         std::tie(o.subject, o.predicate, o.object.is_id, o.object.value, o.object.datatype);
}

std::string to_string(Datatype d) {
  switch (d) {
    case Datatype::string: return "string";
    case Datatype::integer: return "integer";
    case Datatype::decimal: return "decimal";
    case Datatype::boolean: return "boolean";
    case Datatype::year: return "year";
  }
  return {};
}

std::optional<Datatype> datatype_from_string(std::string_view s) {
  for (const auto d : {Datatype::string, Datatype::integer, Datatype::decimal, Datatype::boolean, Datatype::year}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

Datatype infer_datatype(std::string_view property, std::string_view value) {
  static const std::regex integer(R"(^[+-]?[0-9]+$)");
  static const std::regex decimal(R"(^[+-]?([0-9]+\.[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?$)");
  static const std::regex year(R"(^[0-9]{4}$)");
  const std::string v(value);
  if (v == "true" || v == "false") return Datatype::boolean;
  if (std::regex_match(v, year) && unicode::fold(property).find("year") != std::string::npos) return Datatype::year;
  if (std::regex_match(v, integer)) return Datatype::integer;
  if (std::regex_match(v, decimal)) return Datatype::decimal;
  return Datatype::string;
}

std::vector<Statement> emit_kg(const screen::ComparisonTable& comparison, const std::vector<Metadata>& metadata) {
  std::map<std::string, const Metadata*> meta;
  for (const auto& m : metadata) meta[m.id] = &m;
  std::vector<Statement> out;
  for (const auto& doc : comparison.contributions) {
    out.push_back({doc, std::string(kTypePredicate), {true, std::string(kPaperClass), Datatype::string}});
    const auto it = meta.find(doc);
    if (it == meta.end()) continue;
    const Metadata& m = *it->second;
    out.push_back({doc, "title", {false, m.title, Datatype::string}});
    if (m.year) out.push_back({doc, "year", {false, std::to_string(*m.year), Datatype::year}});
    for (const auto& a : m.authors) out.push_back({doc, "author", {false, a, Datatype::string}});
  }
  for (const auto& [key, cell] : comparison.cells) {
    for (const auto& v : cell) {
      out.push_back({key.second, key.first, {false, v.value, infer_datatype(key.first, v.value)}});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string triples_text(const std::vector<Statement>& statements) {
  std::string out;
  const auto clean = [](const std::string& s) {
    std::string r = s;
    std::replace(r.begin(), r.end(), '\t', ' ');
    std::replace(r.begin(), r.end(), '\n', ' ');
    return r;
  };
  for (const auto& s : statements) {
    out += clean(s.subject) + "\t" + clean(s.predicate) + "\t";
    if (s.object.is_id) {
      out += "<" + clean(s.object.value) + ">";
    } else {
      out += json(s.object.value).dump() + "^^" + to_string(s.object.datatype);
    }
    out += "\n";
  }
  return out;
}

json statements_json(const std::vector<Statement>& statements) {
  json arr = json::array();
  for (const auto& s : statements) {
    json obj = s.object.is_id ? json{{"id", s.object.value}}
                              : json{{"value", s.object.value}, {"datatype", to_string(s.object.datatype)}};
    arr.push_back({{"subject", s.subject}, {"predicate", s.predicate}, {"object", obj}});
  }
  return arr;
}

std::vector<Shape> parse_shapes(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("shape file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ConfigError("shape file must hold a JSON array");
  std::vector<Shape> out;
  for (const auto& s : doc) {
    if (!s.is_object() || !s.contains("target_class") || !s["target_class"].is_string()) {
      throw ConfigError("shape without target_class");
    }
    Shape shape;
    shape.target_class = s["target_class"].get<std::string>();
    for (const auto& p : s.value("properties", json::array())) {
      if (!p.is_object() || !p.contains("path") || !p["path"].is_string()) {
        throw ConfigError("shape '" + shape.target_class + "': property without path");
      }
      PropertyShape ps;
      ps.path = p["path"].get<std::string>();
      const std::string where = "shape '" + shape.target_class + "', property '" + ps.path + "': ";
      ps.required = p.value("required", false);
      const auto min = p.value("min", json(nullptr));
      const auto max = p.value("max", json(nullptr));
      if (!min.is_null() && !min.is_number_integer()) throw ConfigError(where + "min must be an integer");
      if (!max.is_null() && !max.is_number_integer()) throw ConfigError(where + "max must be an integer");
      ps.min = min.is_null() ? (ps.required ? 1 : 0) : min.get<long>();
      if (!max.is_null()) ps.max = max.get<long>();
      if (ps.min < 0 || (ps.max && *ps.max < ps.min)) throw ConfigError(where + "need 0 <= min <= max");
      if (ps.required && ps.max && *ps.max < 1) throw ConfigError(where + "required property with max 0");
      if (p.contains("datatype") && !p["datatype"].is_null()) {
        const auto name = p["datatype"].is_string() ? p["datatype"].get<std::string>() : std::string();
        ps.datatype = datatype_from_string(name);
        if (!ps.datatype) throw ConfigError(where + "unknown datatype '" + name + "'");
      }
      shape.properties.push_back(std::move(ps));
    }
    out.push_back(std::move(shape));
  }
  return out;
}

const std::vector<Shape>& default_shapes() {
  static const std::vector<Shape> shapes = [] {
    const auto text = data::embedded_file("shapes_default.json");
    if (!text) throw IntegrityError("default shapes missing from build", {});
    return parse_shapes(*text);
  }();
  return shapes;
}

std::vector<ShapeViolation> validate_shapes(const std::vector<Statement>& statements, const std::vector<Shape>& shapes) {
  std::map<std::string, std::map<std::string, std::vector<const Object*>>> by_subject;
  std::map<std::string, std::vector<std::string>> classes;
  for (const auto& s : statements) {
    by_subject[s.subject][s.predicate].push_back(&s.object);
    if (s.predicate == kTypePredicate && s.object.is_id) classes[s.object.value].push_back(s.subject);
  }
  std::vector<ShapeViolation> out;
  for (const auto& shape : shapes) {
    auto subjects = classes[shape.target_class];
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
    for (const auto& subject : subjects) {
      const auto& props = by_subject[subject];
      for (const auto& ps : shape.properties) {
        const auto it = props.find(ps.path);
        const long count = it == props.end() ? 0 : static_cast<long>(it->second.size());
        if (ps.required && count == 0) {
          out.push_back({subject, ps.path, "missing-required", "required property '" + ps.path + "' is absent"});
          continue;
        }
        if (count < ps.min || (ps.max && count > *ps.max)) {
          out.push_back({subject, ps.path, "cardinality",
                         std::to_string(count) + " values, allowed [" + std::to_string(ps.min) + ", " +
                             (ps.max ? std::to_string(*ps.max) : std::string("*")) + "]"});
        }
        if (!ps.datatype || count == 0) continue;
        for (const auto* o : it->second) {
          const bool ok = !o->is_id && (o->datatype == *ps.datatype ||
                                        (*ps.datatype == Datatype::decimal && o->datatype == Datatype::integer));
          if (!ok) {
            out.push_back({subject, ps.path, "datatype",
                           "value '" + o->value + "' is " + (o->is_id ? std::string("an id") : to_string(o->datatype)) +
                               ", expected " + to_string(*ps.datatype)});
          }
        }
      }
    }
  }
  return out;
}

void to_json(json& j, const ShapeViolation& v) {
  j = json{{"subject", v.subject}, {"path", v.path}, {"kind", v.kind}, {"detail", v.detail}};
}

}  // namespace slrkit::kg
