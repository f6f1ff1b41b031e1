#pragma once

#include "slrkit/types.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace slrkit::vectorize {

/// Members (including the canonical term) are merged into `canonical`.
struct SynonymSet {
  std::string canonical;
  std::vector<std::string> members;
};

/// Lines of the form `canonical: member, member, ...`; `#` starts a comment.
/// Terms are returned as written; callers normalize them.
std::vector<SynonymSet> parse_synonym_sets(std::string_view text);

struct TermIndex {
  std::vector<std::string> vocabulary;  // sorted
  std::map<std::string, long> df;
  long n_docs = 0;
  std::map<std::string, std::string> synonym_merges;  // member -> canonical

  const std::string& canonical(const std::string& term) const;
  BagOfWords merge(const BagOfWords& bag) const;
  bool contains(const std::string& term) const { return df.count(term) > 0; }
  /// ln((1 + N) / (1 + df)) + 1
  double idf(const std::string& term) const;
};

using Bags = std::map<std::string, BagOfWords>;

/// Throws ConfigError if a term appears in two synonym sets, Error if `bags` is empty.
TermIndex build_index(const Bags& bags, const std::vector<SynonymSet>& synonym_sets = {});

struct TfidfResult {
  std::map<std::string, DocVector> vectors;
  std::vector<std::string> empty_docs;  // zero vectors
};

/// tf = count / total_tokens, weight = tf * idf, L2-normalized.
TfidfResult tfidf_vectors(const TermIndex& index, const Bags& bags);

double cosine(const DocVector& a, const DocVector& b);

// --- embeddings ---

struct CooccurrenceMatrix {
  std::vector<std::string> vocabulary;  // sorted
  Eigen::SparseMatrix<double> counts;   // symmetric
  Eigen::VectorXd marginals;            // row sums
  double total = 0.0;
};

/// Symmetric counts of pairs at distance 1..window inside each token list.
CooccurrenceMatrix build_cooccurrence(const std::vector<std::vector<std::string>>& corpus_tokens, int window);

/// max(0, ln(n(w,c) T / (n(w) n(c)))) over the stored entries.
Eigen::SparseMatrix<double> ppmi(const CooccurrenceMatrix& cooc);

struct EmbeddingOptions {
  int window = 5;
  int k = 50;
  std::uint64_t seed = 0;
  int oversampling = 10;
  int power_iterations = 4;
};

struct EmbeddingModel {
  int k = 0;
  int window = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary;
  Eigen::MatrixXd vectors;  // vocabulary.size() x k
  std::vector<std::string> warnings;

  std::optional<Eigen::VectorXd> vector(const std::string& term) const;
  std::optional<Eigen::Index> row(const std::string& term) const;
};

/// PPMI over windowed co-occurrences, factorized by seeded randomized SVD;
/// word vector = U_k * sqrt(S_k). k is clamped to the vocabulary size with a warning.
EmbeddingModel build_embeddings(const std::vector<std::vector<std::string>>& corpus_tokens,
                                const EmbeddingOptions& options = {});

struct DocEmbeddings {
  std::map<std::string, DocVector> vectors;
  std::vector<std::string> flagged;  // no embedded terms
};

/// Dimension key for embedding-space DocVectors, e.g. "e007".
std::string dimension_key(Eigen::Index i);

/// Normalized sum of tfidf(t, d) * word_vector(t); terms without vectors are skipped.
DocEmbeddings doc_embeddings(const EmbeddingModel& model, const std::map<std::string, DocVector>& tfidf);

/// Upper-triangular cosine matrix over documents sorted by id.
struct SimilarityMatrix {
  std::vector<std::string> ids;
  std::map<std::pair<std::string, std::string>, double> pairs;  // key.first < key.second
  std::set<std::string> zero_vectors;

  /// Symmetric lookup; 1 on the diagonal for non-zero vectors, 0 for zero vectors.
  double get(const std::string& a, const std::string& b) const;
};

SimilarityMatrix similarity_matrix(const std::map<std::string, DocVector>& vectors);

struct SynonymSuggestion {
  std::string a;
  std::string b;
  double cosine = 0.0;
};

/// All term pairs with cosine >= min_cosine, highest first (ties lexicographic). Advisory only.
std::vector<SynonymSuggestion> suggest_synonyms(const EmbeddingModel& model, double min_cosine = 0.7);

// --- serialization ---

void to_json(nlohmann::json& j, const DocVector& v);
void from_json(const nlohmann::json& j, DocVector& v);
void to_json(nlohmann::json& j, const TermIndex& idx);
void from_json(const nlohmann::json& j, TermIndex& idx);
void to_json(nlohmann::json& j, const EmbeddingModel& m);
void from_json(const nlohmann::json& j, EmbeddingModel& m);
nlohmann::json similarity_json(const SimilarityMatrix& m, std::string_view space);
SimilarityMatrix similarity_from_json(const nlohmann::json& j);

}  // namespace slrkit::vectorize

namespace slrkit {
using vectorize::from_json;
using vectorize::to_json;
}  // namespace slrkit
