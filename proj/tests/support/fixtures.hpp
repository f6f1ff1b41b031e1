#pragma once

// In-memory fixtures shared by unit and acceptance tests.

#include "slrkit/screen.hpp"
#include "slrkit/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace slrkit::fixtures {

/// Twenty titles; d01/d02, d03/d04, d05/d06, d07/d08 and d09/d10 are planted duplicates.
inline std::vector<std::pair<std::string, std::string>> duplicate_titles() {
  return {
      {"d01", "Automated screening of randomized controlled trials in software engineering"},
      {"d02", "Automated screening of randomised controlled trials in software engineering"},
      {"d03", "A knowledge graph approach to comparing scholarly contributions"},
      {"d04", "A knowledge-graph approach to comparing scholarly contributions."},
      {"d05", "Measuring reviewer agreement during title and abstract screening"},
      {"d06", "Measuring reviewer agreement during title and abstract screenings"},
      {"d07", "Word embeddings for query expansion in evidence retrieval systems"},
      {"d08", "Word embedding for query expansion in evidence retrieval systems"},
      {"d09", "Crowdsourcing citation screening for large systematic reviews"},
      {"d10", "Crowd-sourcing citation screening for large systematic reviews"},
      {"d11", "Topic models for mapping research fields"},
      {"d12", "Active learning stopping criteria"},
      {"d13", "Duplicate record detection in bibliographic databases"},
      {"d14", "Reporting guidelines for literature surveys"},
      {"d15", "Search strategies in medical informatics"},
      {"d16", "Language models as research assistants"},
      {"d17", "Open peer review at scale"},
      {"d18", "Citation networks and gap analysis"},
      {"d19", "Automated screening of clinical trials"},
      {"d20", "Knowledge graphs for research software"},
  };
}

inline std::vector<Document> documents_from_titles(const std::vector<std::pair<std::string, std::string>>& titles) {
  std::vector<Document> docs;
  for (const auto& [id, title] : titles) {
    Metadata m;
    m.id = id;
    m.title = title;
    docs.emplace_back(m);
  }
  return docs;
}

/// Four short documents used by the tf-idf, similarity and ranking oracles.
inline std::vector<std::pair<std::string, std::string>> toy_texts() {
  return {
      {"t1", "Screening tools rank abstracts. Screening with text mining saves reviewer time."},
      {"t2", "Text mining extracts terms from abstracts; term weights rank documents for the review."},
      {"t3", "Knowledge graphs describe contributions. A graph links papers, methods and results."},
      {"t4", "Reviewer time is scarce, so the review team screens abstracts in pairs."},
  };
}


/// Recommendation-systems comparison: three contributions, four properties, one empty column cell each.
inline std::vector<screen::Annotation> recsys_annotations() {
  const auto a = [](std::string id, std::string doc, std::string property, std::string value) {
    screen::Annotation x;
    x.id = std::move(id);
    x.actor = x.id.substr(0, x.id.find('/'));
    x.doc_id = std::move(doc);
    x.chapter = 0;
    x.property = std::move(property);
    x.value = std::move(value);
    x.role = screen::Role::data_evidence;
    x.timestamp = "2024-05-01T09:00:00Z";
    return x;
  };
  const std::string cf = "collaborative-filtering-2019", ka = "knowledge-aware-recsys-2021",
                    sb = "session-based-recsys-2022";
  return {a("ann/1", cf, "approach", "matrix factorization"), a("ann/2", cf, "dataset", "MovieLens"),
          a("ann/3", cf, "metric", "RMSE"),                    a("ann/4", ka, "approach", "graph neural network"),
          a("ann/5", ka, "dataset", "MovieLens"),              a("ann/6", ka, "dataset", "Amazon"),
          a("ann/7", ka, "metric", "NDCG | HR"),               a("ann/8", ka, "cold start", "partial"),
          a("ann/9", sb, "approach", "recurrent network"),     a("ann/10", sb, "metric", "MRR@20"),
          a("ann/11", sb, "cold start", "yes")};
}

inline std::vector<std::string> recsys_properties() { return {"approach", "dataset", "metric", "cold start"}; }

inline std::vector<std::string> recsys_contributions() {
  return {"collaborative-filtering-2019", "knowledge-aware-recsys-2021", "session-based-recsys-2022"};
}

}  // namespace slrkit::fixtures
