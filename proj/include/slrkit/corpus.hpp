#pragma once

#include "slrkit/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slrkit::corpus {

enum class BibFormat { bibtex, csl_json };

/// Infers the format from the extension: `.bib` or `.json`.
BibFormat format_from_path(const std::filesystem::path& path);

struct ParseReport {
  std::vector<std::string> warnings;
  std::vector<std::string> skipped;  // one message per entry that was dropped
};

struct Bibliography {
  std::vector<Metadata> entries;
  ParseReport report;
};

/// Parses a bibliography file. Entry order is preserved and ids are assigned.
/// Throws IngestError if the file is unreadable or not UTF-8.
Bibliography parse_bibliography(const std::filesystem::path& path, BibFormat format);
Bibliography parse_bibtex(std::string_view text);
Bibliography parse_csl_json(std::string_view text);

/// Strips resolver prefixes and lowercases. Returns nullopt unless the result
/// looks like `10.<digits>/<suffix>`.
std::optional<std::string> normalize_doi(std::string_view raw);

/// Lowercase ASCII slug of the title with `-` separators, followed by `-<year>`.
std::string slug_id(std::string_view title, std::optional<int> year);

/// Sets Metadata::id for every entry, appending `-2`, `-3`, ... on collisions.
void assign_ids(std::vector<Metadata>& entries);

/// Splits text at heading lines (markdown `#`, numbered `1.` / `1.1`, or all caps).
/// Spans of the returned chapters partition [0, raw.size()).
std::vector<Chapter> segment_chapters(std::string_view raw);

/// Raw slice covered by a chapter.
std::string_view chapter_text(std::string_view raw, const Chapter& chapter);

/// Documents with text read from `<corpus_dir>/<id>.txt`, or `<citation_key>.txt`, when present.
std::vector<Document> load_corpus(std::vector<Metadata> entries, const std::filesystem::path& corpus_dir);

// --- duplicates ---

std::string normalize_title(std::string_view title);
double trigram_jaccard(std::string_view a, std::string_view b);

enum class DuplicateEvidenceKind { doi_match, title_exact, title_fuzzy };

struct DuplicateEvidence {
  std::string a;
  std::string b;
  DuplicateEvidenceKind kind = DuplicateEvidenceKind::doi_match;
  double score = 1.0;
};

struct DuplicateGroup {
  std::vector<std::string> members;  // sorted
  std::vector<DuplicateEvidence> evidence;
};

struct DuplicateReport {
  std::vector<DuplicateGroup> groups;  // sorted by first member
};

inline constexpr double kDefaultFuzzyThreshold = 0.9;

DuplicateReport detect_duplicates(const std::vector<Document>& corpus,
                                  double fuzzy_threshold = kDefaultFuzzyThreshold);

// --- coverage gaps ---

struct RqKeywords {
  std::string rq_id;
  std::vector<std::string> terms;  // post-pipeline forms
};

struct GapReport {
  std::vector<std::pair<std::string, std::vector<std::string>>> keyword_gaps;     // rq id -> terms
  std::vector<std::pair<std::string, std::vector<std::string>>> missing_metadata;  // doc id -> fields
};

GapReport coverage_report(const std::vector<Document>& corpus, const std::vector<RqKeywords>& rqs);

// --- serialization ---

void to_json(nlohmann::json& j, const Metadata& m);
void from_json(const nlohmann::json& j, Metadata& m);
void to_json(nlohmann::json& j, const Chapter& c);
void from_json(const nlohmann::json& j, Chapter& c);
void to_json(nlohmann::json& j, const ParseReport& r);
void to_json(nlohmann::json& j, const DuplicateReport& r);
void to_json(nlohmann::json& j, const GapReport& r);
std::string to_string(DuplicateEvidenceKind kind);

}  // namespace slrkit::corpus

namespace slrkit {
using corpus::from_json;
using corpus::to_json;
}  // namespace slrkit
