#pragma once

#include "slrkit/textproc.hpp"
#include "slrkit/types.hpp"
#include "slrkit/vectorize.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slrkit::query {

/// `surface` fields keep the text as written; the others are pipeline-normalized.
struct Keyword {
  std::string surface;
  std::string term;
  double weight = 1.0;
  std::vector<std::string> synonym_surfaces;
  std::vector<std::string> synonyms;
  std::vector<std::string> context_surfaces;
  std::vector<std::string> context;
};

struct ResearchQuestion {
  std::string id;
  std::string text;
  std::string scope_note;
  std::string perspective_note;
  std::vector<Keyword> keywords;
};

/// Parses the RQ file format (see docs/rq_format.md). Throws ValidationError
/// listing every problem found.
std::vector<ResearchQuestion> parse_research_questions(std::string_view text,
                                                       const textproc::PipelineConfig& config);
std::vector<ResearchQuestion> load_research_questions(const std::filesystem::path& path,
                                                      const textproc::PipelineConfig& config);

/// Inverse of parse_research_questions for the surface fields.
std::string format_research_questions(const std::vector<ResearchQuestion>& rqs);

/// Returns every invariant violation; empty when valid.
std::vector<std::string> validate(const std::vector<ResearchQuestion>& rqs);

/// Replaces keyword weights. Keys match a keyword's surface form or normalized term.
/// Throws ValidationError for unknown keywords or non-positive weights.
void apply_weights(ResearchQuestion& rq, const std::map<std::string, double>& weights);

std::string compile_boolean_query(const ResearchQuestion& rq);

struct Contribution {
  std::string term;
  double contribution = 0.0;  // normalized weight times blended match
};

struct RelevanceScore {
  std::string rq_id;
  std::string doc_id;
  double score = 0.0;
  int rank = 0;
  std::vector<Contribution> contributions;
};

struct Ranking {
  std::string rq_id;
  double alpha = 0.0;
  std::vector<std::string> warnings;
  std::vector<RelevanceScore> scores;  // descending, ties by doc id

  const RelevanceScore* find(const std::string& doc_id) const;
};

struct EmbeddingInputs {
  const vectorize::EmbeddingModel* model = nullptr;
  const std::map<std::string, DocVector>* docs = nullptr;
};

/// Weighted keyword match over the documents in `tfidf`. alpha > 0 blends in
/// embedding cosine and requires `embeddings`.
Ranking rank_documents(const ResearchQuestion& rq, const vectorize::TermIndex& index,
                       const std::map<std::string, DocVector>& tfidf, const EmbeddingInputs& embeddings = {},
                       double alpha = 0.0);

struct KeywordSuggestion {
  std::string term;
  double weight = 0.0;
};

/// Terms by mean tf-idf weight over the seed documents, rescaled so the first is 1.
std::vector<KeywordSuggestion> suggest_keywords(const std::vector<std::string>& seed_doc_ids,
                                                const std::map<std::string, DocVector>& tfidf, int top_n = 20);

void to_json(nlohmann::json& j, const Keyword& k);
void to_json(nlohmann::json& j, const ResearchQuestion& rq);
void to_json(nlohmann::json& j, const Ranking& r);
Ranking ranking_from_json(const nlohmann::json& j);
/// Columns rq_id, doc_id, score, rank.
std::string rankings_csv(const std::vector<Ranking>& rankings);

}  // namespace slrkit::query
