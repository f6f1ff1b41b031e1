#pragma once

#include "slrkit/corpus.hpp"
#include "slrkit/query.hpp"
#include "slrkit/screen.hpp"
#include "slrkit/vectorize.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace slrkit::emit {

struct OutputFile {
  std::string path;  // relative
  std::string contents;
};

/// Writes every file under `root`; failures are collected per file and returned.
std::vector<std::string> write_files(const std::filesystem::path& root, const std::vector<OutputFile>& files);

/// Documents that may appear in exports: everything not effectively excluded.
std::set<std::string> exportable_ids(const std::vector<Document>& corpus, const screen::DecisionLog& log);

// --- vault ---

struct FrontMatter {
  std::string id;
  std::string title;
  std::vector<std::string> authors;
  std::optional<int> year;
  std::optional<std::string> venue;
  std::optional<std::string> doi;
  std::string decision;
  std::map<std::string, double> scores;  // rounded to 4 decimals

  bool operator==(const FrontMatter&) const = default;
};

double round4(double x);
std::string emit_front_matter(const FrontMatter& fm);
/// Parses the leading `---` block of a note; throws Error when absent or malformed.
FrontMatter parse_front_matter(std::string_view note);

struct VaultOptions {
  int k = 5;
  double sim_threshold = 0.1;
};

/// `<id>.md` per exportable document and `<rq>.md` per research question.
std::vector<OutputFile> emit_vault(const std::vector<Document>& corpus, const std::vector<query::ResearchQuestion>& rqs,
                                   const std::vector<query::Ranking>& rankings,
                                   const vectorize::SimilarityMatrix& similarity, const screen::DecisionLog& decisions,
                                   const VaultOptions& options = {});

// --- graph ---

/// {nodes: [{id, label, relevance, average}], links: [{source, target, similarity}]}
nlohmann::json emit_graph(const std::vector<Document>& corpus, const vectorize::SimilarityMatrix& similarity,
                          const std::vector<query::Ranking>& rankings, const screen::DecisionLog& decisions,
                          double edge_threshold = 0.2);

// --- comparison ---

std::string comparison_markdown(const screen::ComparisonTable& table);
/// RFC 4180 with CRLF line ends.
std::string comparison_csv(const screen::ComparisonTable& table);
std::string patterns_markdown(const std::map<std::string, std::vector<std::pair<std::string, long>>>& patterns);

// --- report ---

struct ReportInputs {
  std::vector<query::ResearchQuestion> rqs;
  std::vector<screen::Criterion> criteria;
  std::vector<std::string> doc_ids;
  screen::DecisionLog decisions;
  std::map<std::string, screen::ComparisonTable> comparisons;  // by rq id
  std::vector<screen::Annotation> annotations;
  std::vector<screen::Claim> claims;
  std::vector<screen::ClaimViolation> claim_violations;
  std::vector<screen::Conflict> conflicts;
  std::vector<screen::Partition> partitions;
  std::optional<corpus::GapReport> gaps;
};

std::string emit_report_skeleton(const ReportInputs& in);

}  // namespace slrkit::emit
