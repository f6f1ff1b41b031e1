#include "slrkit/screen.hpp"

#include "slrkit/errors.hpp"
#include "slrkit/unicode.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <sstream>

namespace slrkit::screen {

using nlohmann::json;

namespace {

const std::map<std::string, Op>& op_names() {
  static const std::map<std::string, Op> names{
      {"<", Op::lt},         {"<=", Op::le},  {"≤", Op::le}, {"=", Op::eq},          {"==", Op::eq},
      {">=", Op::ge},        {"≥", Op::ge}, {">", Op::gt},   {"contains", Op::contains}, {"in", Op::in_set},
      {"in-set", Op::in_set}};
  return names;
}

bool numeric_op(Op op) { return op == Op::lt || op == Op::le || op == Op::eq || op == Op::ge || op == Op::gt; }

bool compare(double lhs, Op op, double rhs) {
  switch (op) {
    case Op::lt: return lhs < rhs;
    case Op::le: return lhs <= rhs;
    case Op::eq: return lhs == rhs;
    case Op::ge: return lhs >= rhs;
    case Op::gt: return lhs > rhs;
    default: return false;
  }
}

std::vector<std::string> string_values(const json& v) {
  std::vector<std::string> out;
  if (v.is_string()) out.push_back(v.get<std::string>());
  if (v.is_array()) {
    for (const auto& e : v) {
      if (e.is_string()) out.push_back(e.get<std::string>());
    }
  }
  return out;
}

std::optional<CriterionKind> kind_from(const std::string& s) {
  if (s == "include") return CriterionKind::include;
  if (s == "exclude") return CriterionKind::exclude;
  return std::nullopt;
}

std::string criterion_error(const Criterion& c, const std::string& msg) {
  return "criterion '" + c.id + "': " + msg;
}

}  // namespace

std::string to_string(Decision d) {
  switch (d) {
    case Decision::included: return "included";
    case Decision::excluded: return "excluded";
    case Decision::deferred: return "deferred";
  }
  return {};
}

Decision decision_from_string(std::string_view s) {
  if (s == "included" || s == "include") return Decision::included;
  if (s == "excluded" || s == "exclude") return Decision::excluded;
  if (s == "deferred" || s == "defer") return Decision::deferred;
  throw ValidationError({"unknown decision '" + std::string(s) + "'"});
}

std::string to_string(Role r) {
  switch (r) {
    case Role::data_evidence: return "data-evidence";
    case Role::claim_evidence: return "claim-evidence";
    case Role::note: return "note";
  }
  return {};
}

Role role_from_string(std::string_view s) {
  if (s == "data-evidence") return Role::data_evidence;
  if (s == "claim-evidence") return Role::claim_evidence;
  if (s == "note") return Role::note;
  throw ValidationError({"unknown annotation role '" + std::string(s) + "'"});
}

std::string to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::open: return "open";
    case ClaimStatus::conflicted: return "conflicted";
    case ClaimStatus::resolved: return "resolved";
  }
  return {};
}

std::string to_string(Op op) {
  switch (op) {
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::eq: return "=";
    case Op::ge: return ">=";
    case Op::gt: return ">";
    case Op::contains: return "contains";
    case Op::in_set: return "in-set";
  }
  return {};
}

std::string to_string(Field f) {
  switch (f) {
    case Field::year: return "year";
    case Field::venue: return "venue";
    case Field::keyword: return "keyword";
    case Field::relevance: return "relevance";
    case Field::language: return "language";
  }
  return {};
}

// ---------------------------------------------------------------------------
// criteria

std::vector<Criterion> parse_criteria(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("criteria file is not valid JSON: ") + e.what()});
  }
  if (doc.is_object() && doc.contains("criteria")) doc = doc["criteria"];
  if (!doc.is_array()) throw ValidationError({"criteria file must hold a JSON array"});

  std::vector<Criterion> out;
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "criterion #" + std::to_string(i + 1);
    if (!item.is_object()) {
      errors.push_back(where + ": not an object");
      continue;
    }
    Criterion c;
    c.id = item.value("id", "");
    if (c.id.empty()) errors.push_back(where + ": missing id");
    const std::string label = c.id.empty() ? where : "criterion '" + c.id + "'";
    if (const auto k = kind_from(item.value("kind", ""))) {
      c.kind = *k;
    } else {
      errors.push_back(label + ": kind must be include or exclude");
    }
    std::string field = item.value("field", "");
    if (field.rfind("relevance(", 0) == 0 && field.back() == ')') {
      c.rq_id = field.substr(10, field.size() - 11);
      field = "relevance";
    }
    if (item.contains("rq")) c.rq_id = item.value("rq", "");
    static const std::map<std::string, Field> fields{{"year", Field::year},
                                                     {"venue", Field::venue},
                                                     {"keyword", Field::keyword},
                                                     {"relevance", Field::relevance},
                                                     {"language", Field::language},
                                                     {"language-tag", Field::language}};
    if (const auto it = fields.find(field); it != fields.end()) {
      c.field = it->second;
    } else {
      errors.push_back(label + ": unknown field '" + field + "'");
    }
    const std::string op = item.value("op", "");
    if (const auto it = op_names().find(op); it != op_names().end()) {
      c.op = it->second;
    } else {
      errors.push_back(label + ": unknown op '" + op + "'");
    }
    c.value = item.contains("value") ? item["value"] : json();
    c.rationale = item.value("rationale", "");
    out.push_back(std::move(c));
  }
  for (auto& v : validate(out)) errors.push_back(std::move(v));
  if (!errors.empty()) throw ValidationError(errors);
  return out;
}

std::vector<Criterion> load_criteria(const std::filesystem::path& path) {
  return parse_criteria(read_utf8_file(path));
}

std::vector<std::string> validate(const std::vector<Criterion>& criteria) {
  std::vector<std::string> v;
  std::set<std::string> ids;
  for (const auto& c : criteria) {
    if (!c.id.empty() && !ids.insert(c.id).second) v.push_back(criterion_error(c, "duplicate id"));
    if (trim(c.rationale).empty()) v.push_back(criterion_error(c, "rationale is empty"));
    const auto all_strings = [&] {
      return c.value.is_array() && !c.value.empty() &&
             std::all_of(c.value.begin(), c.value.end(), [](const json& e) { return e.is_string(); });
    };
    const std::string bad_op = "op '" + to_string(c.op) + "' does not apply to field " + to_string(c.field);
    switch (c.field) {
      case Field::year:
        if (numeric_op(c.op)) {
          if (!c.value.is_number_integer()) v.push_back(criterion_error(c, "year value must be an integer"));
        } else if (c.op == Op::in_set) {
          if (!c.value.is_array() || c.value.empty() ||
              !std::all_of(c.value.begin(), c.value.end(), [](const json& e) { return e.is_number_integer(); })) {
            v.push_back(criterion_error(c, "year set must be a non-empty array of integers"));
          }
        } else {
          v.push_back(criterion_error(c, bad_op));
        }
        break;
      case Field::relevance:
        if (c.rq_id.empty()) v.push_back(criterion_error(c, "relevance criterion needs an rq"));
        if (!numeric_op(c.op)) {
          v.push_back(criterion_error(c, bad_op));
        } else if (!c.value.is_number()) {
          v.push_back(criterion_error(c, "relevance value must be a number"));
        }
        break;
      case Field::venue:
      case Field::keyword:
      case Field::language: {
        const bool op_ok = c.op == Op::in_set || (c.field == Field::venue && (c.op == Op::eq || c.op == Op::contains)) ||
                           (c.field == Field::keyword && c.op == Op::contains) ||
                           (c.field == Field::language && c.op == Op::eq);
        if (!op_ok) {
          v.push_back(criterion_error(c, bad_op));
        } else if (c.op == Op::in_set ? !all_strings() : !(c.value.is_string() && !c.value.get<std::string>().empty())) {
          v.push_back(criterion_error(c, c.op == Op::in_set ? "set must be a non-empty array of strings"
                                                            : "value must be a non-empty string"));
        }
        break;
      }
    }
  }
  return v;
}

bool matches(const Criterion& c, const Document& doc, const std::map<std::string, query::Ranking>& rankings,
             const textproc::PipelineConfig& config) {
  switch (c.field) {
    case Field::year: {
      if (!doc.meta.year) return false;
      if (c.op == Op::in_set) {
        return std::any_of(c.value.begin(), c.value.end(), [&](const json& e) { return e.get<int>() == *doc.meta.year; });
      }
      return compare(*doc.meta.year, c.op, c.value.get<double>());
    }
    case Field::relevance: {
      const auto it = rankings.find(c.rq_id);
      if (it == rankings.end()) throw ConfigError(criterion_error(c, "unknown rq '" + c.rq_id + "'"));
      const auto* s = it->second.find(doc.id());
      return s && compare(s->score, c.op, c.value.get<double>());
    }
    case Field::venue:
    case Field::language: {
      const auto& field = c.field == Field::venue ? doc.meta.venue : doc.meta.language;
      if (!field) return false;
      const std::string have = unicode::fold(*field);
      if (c.op == Op::contains) return have.find(unicode::fold(c.value.get<std::string>())) != std::string::npos;
      const auto wanted = string_values(c.value);
      return std::any_of(wanted.begin(), wanted.end(), [&](const auto& w) { return unicode::fold(w) == have; });
    }
    case Field::keyword: {
      std::set<std::string> terms;
      if (doc.bow()) {
        for (const auto& [t, n] : doc.bow()->counts) terms.insert(t);
      }
      for (const auto& k : doc.meta.keywords) terms.insert(textproc::normalize_term(k, config));
      const auto wanted = string_values(c.value);
      return std::any_of(wanted.begin(), wanted.end(), [&](const auto& w) {
        const auto t = textproc::normalize_term(w, config);
        return !t.empty() && terms.count(t);
      });
    }
  }
  return false;
}

std::vector<DecisionRecord> apply_criteria(const std::vector<Document>& corpus, const std::vector<Criterion>& criteria,
                                           const std::map<std::string, query::Ranking>& rankings,
                                           const textproc::PipelineConfig& config, const ApplyOptions& options) {
  if (auto v = validate(criteria); !v.empty()) throw ValidationError(v);
  std::vector<std::string> unknown;
  for (const auto& c : criteria) {
    if (c.field == Field::relevance && !rankings.count(c.rq_id)) {
      unknown.push_back(criterion_error(c, "relevance criterion references unknown rq '" + c.rq_id + "'"));
    }
  }
  if (!unknown.empty()) throw ConfigError(join(unknown, "; "));

  std::vector<const Document*> docs;
  for (const auto& d : corpus) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(), [](const auto* a, const auto* b) { return a->id() < b->id(); });

  std::vector<DecisionRecord> out;
  for (const auto* doc : docs) {
    DecisionRecord r{doc->id(), Decision::deferred, "none", options.actor, options.timestamp, {}};
    bool decided = false;
    for (const auto kind : {CriterionKind::exclude, CriterionKind::include}) {
      for (const auto& c : criteria) {
        if (decided || c.kind != kind || !matches(c, *doc, rankings, config)) continue;
        r.decision = kind == CriterionKind::exclude ? Decision::excluded : Decision::included;
        r.source = c.id;
        r.note = c.rationale;
        decided = true;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// decisions

DecisionLog::DecisionLog(std::vector<DecisionRecord> history) : history_(std::move(history)) {}

void DecisionLog::append(DecisionRecord record) { history_.push_back(std::move(record)); }

std::optional<DecisionRecord> DecisionLog::effective(const std::string& doc_id) const {
  std::optional<DecisionRecord> last;
  std::optional<DecisionRecord> last_manual;
  for (const auto& r : history_) {
    if (r.doc_id != doc_id) continue;
    last = r;
    if (r.manual()) last_manual = r;
  }
  return last_manual ? last_manual : last;
}

std::map<std::string, DecisionRecord> DecisionLog::effective_all() const {
  std::map<std::string, DecisionRecord> out;
  for (const auto& r : history_) {
    const auto it = out.find(r.doc_id);
    if (it == out.end()) {
      out.emplace(r.doc_id, r);
    } else if (r.manual() || !it->second.manual()) {
      it->second = r;
    }
  }
  return out;
}

DecisionRecord record_decision(DecisionLog& log, const std::set<std::string>& known_ids, const std::string& doc_id,
                               Decision decision, const std::string& actor, const std::string& note,
                               std::string timestamp) {
  if (!known_ids.count(doc_id)) throw NotFoundError("unknown document '" + doc_id + "'");
  if (timestamp.empty()) timestamp = utc_now_iso8601();
  if (!is_iso8601_utc(timestamp)) throw ValidationError({"timestamp '" + timestamp + "' is not ISO-8601 UTC"});
  DecisionRecord r{doc_id, decision, "manual", actor.empty() ? "anonymous" : actor, timestamp, note};
  log.append(r);
  return r;
}

std::vector<DecisionRecord> parse_decisions_jsonl(std::string_view text) {
  std::vector<DecisionRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line).get<DecisionRecord>());
    } catch (const json::exception& e) {
      throw IntegrityError("decision log line " + std::to_string(n) + ": " + e.what(), {std::to_string(n)});
    }
  }
  return out;
}

std::string decisions_jsonl(const std::vector<DecisionRecord>& records) {
  std::string out;
  for (const auto& r : records) out += json(r).dump() + "\n";
  return out;
}

DecisionCounts count_decisions(const std::vector<std::string>& doc_ids, const DecisionLog& log) {
  const auto eff = log.effective_all();
  DecisionCounts c;
  for (const auto& id : doc_ids) {
    const auto it = eff.find(id);
    const Decision d = it == eff.end() ? Decision::deferred : it->second.decision;
    if (d == Decision::included) ++c.included;
    if (d == Decision::excluded) ++c.excluded;
    if (d == Decision::deferred) ++c.deferred;
  }
  return c;
}

// ---------------------------------------------------------------------------
// partitions

PartitionSpec parse_partition_spec(const std::string& name, std::string_view text) {
  PartitionSpec spec;
  spec.name = name;
  const auto parts = split(text, ':');
  if (parts.size() == 2 && trim(parts[0]) == "facet") {
    spec.kind = PartitionSpec::Kind::facet;
    spec.facet = std::string(trim(parts[1]));
    if (spec.facet != "venue" && spec.facet != "year" && spec.facet != "language") {
      throw ConfigError("partition '" + name + "': unknown facet '" + spec.facet + "'");
    }
    return spec;
  }
  if (parts.size() == 3 && trim(parts[0]) == "band") {
    spec.kind = PartitionSpec::Kind::band;
    spec.rq_id = std::string(trim(parts[1]));
    for (const auto& e : split_list(parts[2], ",")) {
      try {
        spec.edges.push_back(std::stod(e));
      } catch (const std::exception&) {
        throw ConfigError("partition '" + name + "': bad band edge '" + e + "'");
      }
    }
    for (std::size_t i = 1; i < spec.edges.size(); ++i) {
      if (!(spec.edges[i - 1] < spec.edges[i])) {
        throw ConfigError("partition '" + name + "': band edges must be strictly increasing");
      }
    }
    return spec;
  }
  throw ConfigError("partition '" + name + "': expected 'band:<rq>:<edges>' or 'facet:<field>'");
}

Partition partition(const std::vector<Metadata>& included, const PartitionSpec& spec,
                    const std::map<std::string, query::Ranking>& rankings) {
  Partition p{spec.name, spec, {}};
  if (spec.kind == PartitionSpec::Kind::facet) {
    for (const auto& m : included) {
      std::optional<std::string> v;
      if (spec.facet == "venue") v = m.venue;
      if (spec.facet == "language") v = m.language;
      if (spec.facet == "year" && m.year) v = std::to_string(*m.year);
      p.assignment[m.id] = v && !v->empty() ? *v : "unknown";
    }
    return p;
  }
  if (spec.edges.size() < 2) throw ConfigError("partition '" + spec.name + "': need at least two band edges");
  for (std::size_t i = 1; i < spec.edges.size(); ++i) {
    if (!(spec.edges[i - 1] < spec.edges[i])) {
      throw ConfigError("partition '" + spec.name + "': band edges must be strictly increasing");
    }
  }
  const auto it = rankings.find(spec.rq_id);
  if (it == rankings.end()) throw ConfigError("partition '" + spec.name + "': unknown rq '" + spec.rq_id + "'");
  for (const auto& m : included) {
    const auto* s = it->second.find(m.id);
    const double score = s ? s->score : 0.0;
    std::string label = "unbanded";
    for (std::size_t i = 0; i + 1 < spec.edges.size(); ++i) {
      const bool last = i + 2 == spec.edges.size();
      if (score >= spec.edges[i] && (score < spec.edges[i + 1] || (last && score == spec.edges[i + 1]))) {
        label = "band" + std::to_string(i);
        break;
      }
    }
    p.assignment[m.id] = label;
  }
  return p;
}

// ---------------------------------------------------------------------------
// annotations

std::string Annotation::value_text() const {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

std::string Annotation::locus() const {
  if (span) return "span:" + std::to_string(span->start) + "-" + std::to_string(span->end);
  if (chapter) return "chapter:" + std::to_string(*chapter);
  return "doc";
}

std::vector<Annotation> parse_annotations(std::string_view text) {
  std::vector<Annotation> out;
  const auto t = trim(text);
  if (t.empty()) return out;
  try {
    if (t.front() == '[') {
      for (const auto& item : json::parse(t)) out.push_back(item.get<Annotation>());
      return out;
    }
    std::istringstream in{std::string(t)};
    std::string line;
    while (std::getline(in, line)) {
      if (!trim(line).empty()) out.push_back(json::parse(line).get<Annotation>());
    }
  } catch (const json::exception& e) {
    throw ValidationError({std::string("annotation file: ") + e.what()});
  }
  return out;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  try {
    return parse_annotations(read_utf8_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError({path.string() + ": " + e.what()});
  }
}

std::string annotations_json(const std::vector<Annotation>& annotations) { return json(annotations).dump(2) + "\n"; }

std::vector<std::string> validate(const std::vector<Annotation>& annotations, const std::vector<Document>& corpus) {
  std::map<std::string, const Document*> docs;
  for (const auto& d : corpus) docs[d.id()] = &d;
  std::vector<std::string> v;
  for (const auto& a : annotations) {
    const std::string label = "annotation '" + a.id + "': ";
    if (a.actor.empty() || a.id.rfind(a.actor + "/", 0) != 0 || a.id.size() == a.actor.size() + 1) {
      v.push_back(label + "id must have the form <actor>/<serial>");
    }
    if (trim(a.property).empty()) v.push_back(label + "property is empty");
    if (!a.value.is_string() && !a.value.is_number()) v.push_back(label + "value must be a string or number");
    if (!a.timestamp.empty() && !is_iso8601_utc(a.timestamp)) v.push_back(label + "timestamp is not ISO-8601 UTC");
    const auto it = docs.find(a.doc_id);
    if (it == docs.end()) {
      v.push_back(label + "unknown document '" + a.doc_id + "'");
      continue;
    }
    const Document& d = *it->second;
    if (a.span) {
      const std::size_t size = d.raw_text ? d.raw_text->size() : 0;
      if (a.span->start > a.span->end || a.span->end > size) {
        v.push_back(label + "span " + a.locus().substr(5) + " outside document bounds [0, " + std::to_string(size) + ")");
      }
    }
    if (a.chapter && (*a.chapter < 0 || static_cast<std::size_t>(*a.chapter) >= d.chapters.size())) {
      v.push_back(label + "chapter " + std::to_string(*a.chapter) + " does not exist");
    }
  }
  return v;
}

MergeResult merge_annotations(const std::vector<std::vector<Annotation>>& streams) {
  std::map<std::string, Annotation> by_id;
  std::set<std::string> collisions;
  for (const auto& stream : streams) {
    for (const auto& a : stream) {
      const auto [it, inserted] = by_id.emplace(a.id, a);
      if (!inserted && !(it->second == a)) collisions.insert(a.id);
    }
  }
  if (!collisions.empty()) {
    std::vector<std::string> ids(collisions.begin(), collisions.end());
    throw IntegrityError("annotation id collision with different content: " + join(ids, ", "), ids);
  }
  MergeResult r;
  for (auto& [id, a] : by_id) r.merged.push_back(a);
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const Annotation*>> groups;
  for (const auto& a : r.merged) groups[{a.doc_id, a.locus(), a.property}].push_back(&a);
  for (const auto& [key, members] : groups) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (members[i]->value_text() != members[j]->value_text()) {
          r.conflicts.push_back({members[i]->id, members[j]->id, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
        }
      }
    }
  }
  std::sort(r.conflicts.begin(), r.conflicts.end(),
            [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return r;
}

// ---------------------------------------------------------------------------
// comparison

const std::vector<CellValue>* ComparisonTable::cell(const std::string& property, const std::string& doc_id) const {
  const auto it = cells.find({property, doc_id});
  return it == cells.end() ? nullptr : &it->second;
}

ComparisonTable build_comparison(const std::vector<Annotation>& annotations, const std::vector<std::string>& properties,
                                 const std::vector<std::string>& doc_ids) {
  if (properties.empty()) throw ConfigError("comparison needs at least one property");
  std::set<std::string> props;
  for (const auto& p : properties) {
    if (!props.insert(p).second) throw ConfigError("duplicate comparison property '" + p + "'");
  }
  ComparisonTable t;
  t.properties = properties;
  t.contributions = doc_ids;
  const std::set<std::string> docs(doc_ids.begin(), doc_ids.end());
  std::set<std::string> seen;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::set<std::string>>> cells;
  for (const auto& a : annotations) {
    if (a.role == Role::note || !props.count(a.property) || !docs.count(a.doc_id)) continue;
    seen.insert(a.property);
    cells[{a.property, a.doc_id}][a.value_text()].insert(a.id);
  }
  for (const auto& [key, values] : cells) {
    auto& cell = t.cells[key];
    for (const auto& [value, sources] : values) cell.push_back({value, {sources.begin(), sources.end()}});
  }
  for (const auto& p : properties) {
    if (!seen.count(p)) t.warnings.push_back("property '" + p + "' is not annotated in any contribution");
  }
  return t;
}

std::vector<Conflict> detect_conflicts(const ComparisonTable& table, const std::vector<Resolution>& resolutions) {
  std::vector<Conflict> out;
  for (const auto& p : table.properties) {
    for (const auto& d : table.contributions) {
      const auto* cell = table.cell(p, d);
      if (!cell || cell->size() < 2) continue;
      Conflict c{p, d, {}, {}, std::nullopt};
      for (const auto& v : *cell) {
        c.values.push_back(v.value);
        c.sources.insert(c.sources.end(), v.sources.begin(), v.sources.end());
      }
      std::sort(c.sources.begin(), c.sources.end());
      for (const auto& r : resolutions) {
        if (r.property == p && r.contribution == d) c.resolution = r;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Resolution> parse_resolutions(std::string_view json_text) {
  std::vector<Resolution> out;
  if (trim(json_text).empty()) return out;
  try {
    for (const auto& r : json::parse(json_text)) {
      out.push_back({r.at("property").get<std::string>(), r.at("contribution").get<std::string>(),
                     r.at("chosen").get<std::string>(), r.value("note", ""), r.value("actor", ""),
                     r.value("timestamp", "")});
    }
  } catch (const json::exception& e) {
    throw ValidationError({std::string("resolutions file: ") + e.what()});
  }
  return out;
}

std::map<std::string, std::vector<std::pair<std::string, long>>> pattern_summary(const ComparisonTable& table) {
  std::map<std::string, std::map<std::string, long>> counts;
  for (const auto& [key, cell] : table.cells) {
    for (const auto& v : cell) ++counts[key.first][v.value];
  }
  std::map<std::string, std::vector<std::pair<std::string, long>>> out;
  for (const auto& [property, hist] : counts) {
    auto& row = out[property];
    row.assign(hist.begin(), hist.end());
    std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  }
  return out;
}

// ---------------------------------------------------------------------------
// claims

std::vector<Claim> parse_claims(std::string_view json_text) {
  std::vector<Claim> out;
  if (trim(json_text).empty()) return out;
  try {
    for (const auto& c : json::parse(json_text)) {
      Claim claim;
      claim.id = c.at("id").get<std::string>();
      claim.statement = c.value("statement", "");
      claim.evidence = c.value("evidence", std::vector<std::string>{});
      claim.warrant = c.value("warrant", "");
      const std::string status = c.value("status", "open");
      if (status == "open") claim.status = ClaimStatus::open;
      else if (status == "conflicted") claim.status = ClaimStatus::conflicted;
      else if (status == "resolved") claim.status = ClaimStatus::resolved;
      else throw ValidationError({"claim '" + claim.id + "': unknown status '" + status + "'"});
      claim.resolution_note = c.value("resolution_note", "");
      claim.rq_id = c.value("rq", "");
      out.push_back(std::move(claim));
    }
  } catch (const json::exception& e) {
    throw ValidationError({std::string("claims file: ") + e.what()});
  }
  return out;
}

std::vector<ClaimViolation> validate_claims(const std::vector<Claim>& claims, const std::vector<Annotation>& annotations,
                                            const std::vector<Conflict>& conflicts,
                                            const std::set<std::string>& excluded_docs) {
  std::map<std::string, const Annotation*> by_id;
  for (const auto& a : annotations) by_id[a.id] = &a;
  std::set<std::pair<std::string, std::string>> open_conflicts;
  for (const auto& c : conflicts) {
    if (!c.resolution) open_conflicts.insert({c.property, c.contribution});
  }
  std::vector<ClaimViolation> out;
  for (const auto& c : claims) {
    if (c.evidence.empty()) out.push_back({c.id, "empty-evidence", "claim cites no evidence"});
    if (trim(c.warrant).empty()) out.push_back({c.id, "empty-warrant", "warrant is empty"});
    for (const auto& e : c.evidence) {
      const auto it = by_id.find(e);
      if (it == by_id.end()) {
        out.push_back({c.id, "dangling-evidence", "evidence '" + e + "' does not resolve"});
        continue;
      }
      const Annotation& a = *it->second;
      if (excluded_docs.count(a.doc_id)) {
        out.push_back({c.id, "excluded-evidence", "evidence '" + e + "' is on excluded document '" + a.doc_id + "'"});
      }
      if (open_conflicts.count({a.property, a.doc_id})) {
        out.push_back({c.id, "conflicted-evidence",
                       "evidence '" + e + "' sits in unresolved conflict (" + a.property + ", " + a.doc_id + ")"});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const Criterion& c) {
  j = json{{"id", c.id},
           {"kind", c.kind == CriterionKind::include ? "include" : "exclude"},
           {"field", to_string(c.field)},
           {"op", to_string(c.op)},
           {"value", c.value},
           {"rationale", c.rationale}};
  if (c.field == Field::relevance) j["rq"] = c.rq_id;
}

void to_json(json& j, const DecisionRecord& r) {
  j = json{{"doc_id", r.doc_id}, {"decision", to_string(r.decision)}, {"source", r.source},
           {"actor", r.actor},   {"timestamp", r.timestamp},           {"note", r.note}};
}

void from_json(const json& j, DecisionRecord& r) {
  r.doc_id = j.at("doc_id").get<std::string>();
  r.decision = decision_from_string(j.at("decision").get<std::string>());
  r.source = j.value("source", "manual");
  r.actor = j.value("actor", "");
  r.timestamp = j.value("timestamp", "");
  r.note = j.value("note", "");
}

void to_json(json& j, const Partition& p) {
  json spec;
  if (p.spec.kind == PartitionSpec::Kind::band) {
    spec = {{"kind", "band"}, {"rq", p.spec.rq_id}, {"edges", p.spec.edges}};
  } else {
    spec = {{"kind", "facet"}, {"field", p.spec.facet}};
  }
  j = json{{"name", p.name}, {"spec", spec}, {"assignment", p.assignment}};
}

void to_json(json& j, const Annotation& a) {
  j = json{{"id", a.id},       {"doc_id", a.doc_id}, {"property", a.property},
           {"value", a.value}, {"role", to_string(a.role)}, {"actor", a.actor},
           {"timestamp", a.timestamp}};
  if (a.chapter) j["chapter"] = *a.chapter;
  if (a.span) j["span"] = {a.span->start, a.span->end};
}

void from_json(const json& j, Annotation& a) {
  a.id = j.at("id").get<std::string>();
  a.doc_id = j.at("doc_id").get<std::string>();
  a.property = j.at("property").get<std::string>();
  a.value = j.at("value");
  a.role = role_from_string(j.value("role", "note"));
  a.actor = j.value("actor", "");
  a.timestamp = j.value("timestamp", "");
  a.chapter.reset();
  a.span.reset();
  if (j.contains("chapter") && !j["chapter"].is_null()) a.chapter = j["chapter"].get<int>();
  if (j.contains("span") && !j["span"].is_null()) {
    const auto& s = j["span"];
    if (!s.is_array() || s.size() != 2) throw ValidationError({"annotation '" + a.id + "': span must be [start, end]"});
    a.span = CharSpan{s[0].get<std::size_t>(), s[1].get<std::size_t>()};
  }
}

void to_json(json& j, const AnnotationConflict& c) {
  j = json{{"a", c.a}, {"b", c.b}, {"doc_id", c.doc_id}, {"locus", c.locus}, {"property", c.property}};
}

void to_json(json& j, const ComparisonTable& t) {
  json cells = json::array();
  for (const auto& p : t.properties) {
    for (const auto& d : t.contributions) {
      const auto* cell = t.cell(p, d);
      if (!cell) continue;
      json values = json::array();
      for (const auto& v : *cell) values.push_back({{"value", v.value}, {"sources", v.sources}});
      cells.push_back({{"property", p}, {"contribution", d}, {"values", values}});
    }
  }
  j = json{{"properties", t.properties}, {"contributions", t.contributions}, {"cells", cells}, {"warnings", t.warnings}};
}

void to_json(json& j, const Conflict& c) {
  j = json{{"property", c.property}, {"contribution", c.contribution}, {"values", c.values}, {"sources", c.sources}};
  if (c.resolution) {
    j["resolution"] = {{"chosen", c.resolution->chosen},
                       {"note", c.resolution->note},
                       {"actor", c.resolution->actor},
                       {"timestamp", c.resolution->timestamp}};
  } else {
    j["resolution"] = nullptr;
  }
}

void to_json(json& j, const Claim& c) {
  j = json{{"id", c.id},         {"statement", c.statement},     {"evidence", c.evidence},
           {"warrant", c.warrant}, {"status", to_string(c.status)}, {"resolution_note", c.resolution_note},
           {"rq", c.rq_id}};
}

void to_json(json& j, const ClaimViolation& v) {
  j = json{{"claim_id", v.claim_id}, {"kind", v.kind}, {"detail", v.detail}};
}

}  // namespace slrkit::screen
