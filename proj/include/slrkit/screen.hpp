#pragma once

#include "slrkit/query.hpp"
#include "slrkit/textproc.hpp"
#include "slrkit/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slrkit::screen {

// --- criteria ---

enum class CriterionKind { include, exclude };
enum class Field { year, venue, keyword, relevance, language };
enum class Op { lt, le, eq, ge, gt, contains, in_set };

struct Criterion {
  std::string id;
  CriterionKind kind = CriterionKind::include;
  Field field = Field::year;
  std::string rq_id;  // relevance only
  Op op = Op::eq;
  nlohmann::json value;
  std::string rationale;
};

/// JSON array of criteria (see docs/formats.md). Throws ValidationError with every problem.
std::vector<Criterion> parse_criteria(std::string_view json_text);
std::vector<Criterion> load_criteria(const std::filesystem::path& path);
std::vector<std::string> validate(const std::vector<Criterion>& criteria);

/// Keyword values are compared in pipeline-normalized form against the bag and metadata keywords.
bool matches(const Criterion& c, const Document& doc, const std::map<std::string, query::Ranking>& rankings,
             const textproc::PipelineConfig& config);

// --- decisions ---

enum class Decision { included, excluded, deferred };

struct DecisionRecord {
  std::string doc_id;
  Decision decision = Decision::deferred;
  std::string source;  // criterion id, "none", or "manual"
  std::string actor;
  std::string timestamp;
  std::string note;

  bool manual() const { return source == "manual"; }
  bool operator==(const DecisionRecord&) const = default;
};

struct ApplyOptions {
  std::string actor = "criteria";
  std::string timestamp = "1970-01-01T00:00:00Z";
};

/// Exclude criteria first, then include; no match gives deferred with source "none".
/// Throws ConfigError for relevance criteria on unknown RQs.
std::vector<DecisionRecord> apply_criteria(const std::vector<Document>& corpus, const std::vector<Criterion>& criteria,
                                           const std::map<std::string, query::Ranking>& rankings,
                                           const textproc::PipelineConfig& config, const ApplyOptions& options = {});

/// Append-only history. The effective decision of a document is its last manual
/// record, or its last record if none is manual.
class DecisionLog {
 public:
  DecisionLog() = default;
  explicit DecisionLog(std::vector<DecisionRecord> history);

  void append(DecisionRecord record);
  const std::vector<DecisionRecord>& history() const { return history_; }
  std::optional<DecisionRecord> effective(const std::string& doc_id) const;
  std::map<std::string, DecisionRecord> effective_all() const;

 private:
  std::vector<DecisionRecord> history_;
};

/// Throws NotFoundError for unknown documents. Empty timestamp means now.
DecisionRecord record_decision(DecisionLog& log, const std::set<std::string>& known_ids, const std::string& doc_id,
                               Decision decision, const std::string& actor, const std::string& note,
                               std::string timestamp = {});

std::vector<DecisionRecord> parse_decisions_jsonl(std::string_view text);
std::string decisions_jsonl(const std::vector<DecisionRecord>& records);

struct DecisionCounts {
  long included = 0;
  long excluded = 0;
  long deferred = 0;
};

/// Documents without any record count as deferred.
DecisionCounts count_decisions(const std::vector<std::string>& doc_ids, const DecisionLog& log);

// --- partitions ---

struct PartitionSpec {
  std::string name;
  enum class Kind { band, facet } kind = Kind::band;
  std::string rq_id;          // band
  std::vector<double> edges;  // band, strictly increasing
  std::string facet;          // facet: venue | year | language
};

/// `band:RQ1:0,0.2,1` or `facet:venue`.
PartitionSpec parse_partition_spec(const std::string& name, std::string_view text);

struct Partition {
  std::string name;
  PartitionSpec spec;
  std::map<std::string, std::string> assignment;
};

/// Label `band<i>` for score in [edge_i, edge_{i+1}) (last band closed), "unbanded"
/// outside the edges; facet label is the field value or "unknown".
Partition partition(const std::vector<Metadata>& included, const PartitionSpec& spec,
                    const std::map<std::string, query::Ranking>& rankings);

// --- annotations ---

enum class Role { data_evidence, claim_evidence, note };

struct Annotation {
  std::string id;  // actor/serial
  std::string doc_id;
  std::optional<int> chapter;
  std::optional<CharSpan> span;
  std::string property;
  nlohmann::json value;  // string or number
  Role role = Role::note;
  std::string actor;
  std::string timestamp;

  std::string value_text() const;
  /// "chapter:3", "span:10-20" or "doc".
  std::string locus() const;
  bool operator==(const Annotation&) const = default;
};

/// Accepts a JSON array or JSON lines.
std::vector<Annotation> parse_annotations(std::string_view text);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);
std::string annotations_json(const std::vector<Annotation>& annotations);

/// Violations against the corpus: unknown document, span or chapter out of bounds,
/// empty property, id not scoped by its actor.
std::vector<std::string> validate(const std::vector<Annotation>& annotations, const std::vector<Document>& corpus);

struct AnnotationConflict {
  std::string a;  // annotation ids, a < b
  std::string b;
  std::string doc_id;
  std::string locus;
  std::string property;
};

struct MergeResult {
  std::vector<Annotation> merged;  // sorted by id
  std::vector<AnnotationConflict> conflicts;
};

/// Union by id; equal ids with different content throw IntegrityError.
MergeResult merge_annotations(const std::vector<std::vector<Annotation>>& streams);

// --- comparison ---

struct CellValue {
  std::string value;
  std::vector<std::string> sources;  // annotation ids
};

struct ComparisonTable {
  std::vector<std::string> properties;
  std::vector<std::string> contributions;
  std::map<std::pair<std::string, std::string>, std::vector<CellValue>> cells;  // (property, doc id)
  std::vector<std::string> warnings;

  const std::vector<CellValue>* cell(const std::string& property, const std::string& doc_id) const;
};

/// Evidence annotations only; notes are not comparison values. Values in a cell are
/// sorted and equal values share one entry.
ComparisonTable build_comparison(const std::vector<Annotation>& annotations, const std::vector<std::string>& properties,
                                 const std::vector<std::string>& doc_ids);

struct Resolution {
  std::string property;
  std::string contribution;
  std::string chosen;
  std::string note;
  std::string actor;
  std::string timestamp;
};

struct Conflict {
  std::string property;
  std::string contribution;
  std::vector<std::string> values;
  std::vector<std::string> sources;
  std::optional<Resolution> resolution;
};

std::vector<Conflict> detect_conflicts(const ComparisonTable& table, const std::vector<Resolution>& resolutions = {});
std::vector<Resolution> parse_resolutions(std::string_view json_text);

/// Per property: value and count, by count descending then value.
std::map<std::string, std::vector<std::pair<std::string, long>>> pattern_summary(const ComparisonTable& table);

// --- claims ---

enum class ClaimStatus { open, conflicted, resolved };

struct Claim {
  std::string id;
  std::string statement;
  std::vector<std::string> evidence;
  std::string warrant;
  ClaimStatus status = ClaimStatus::open;
  std::string resolution_note;
  std::string rq_id;
};

std::vector<Claim> parse_claims(std::string_view json_text);

struct ClaimViolation {
  std::string claim_id;
  std::string kind;  // dangling-evidence | empty-evidence | empty-warrant | conflicted-evidence | excluded-evidence
  std::string detail;
};

std::vector<ClaimViolation> validate_claims(const std::vector<Claim>& claims, const std::vector<Annotation>& annotations,
                                            const std::vector<Conflict>& conflicts = {},
                                            const std::set<std::string>& excluded_docs = {});

// --- names and serialization ---

std::string to_string(Decision d);
std::string to_string(Role r);
std::string to_string(ClaimStatus s);
std::string to_string(Op op);
std::string to_string(Field f);
Decision decision_from_string(std::string_view s);
Role role_from_string(std::string_view s);

void to_json(nlohmann::json& j, const Criterion& c);
void to_json(nlohmann::json& j, const DecisionRecord& r);
void from_json(const nlohmann::json& j, DecisionRecord& r);
void to_json(nlohmann::json& j, const Partition& p);
void to_json(nlohmann::json& j, const Annotation& a);
void from_json(const nlohmann::json& j, Annotation& a);
void to_json(nlohmann::json& j, const AnnotationConflict& c);
void to_json(nlohmann::json& j, const ComparisonTable& t);
void to_json(nlohmann::json& j, const Conflict& c);
void to_json(nlohmann::json& j, const Claim& c);
void to_json(nlohmann::json& j, const ClaimViolation& v);

}  // namespace slrkit::screen
