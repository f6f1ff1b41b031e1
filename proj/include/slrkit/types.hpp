#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slrkit {

/// One bibliographic record. Fields that could not be parsed stay empty.
struct Metadata {
  std::string id;
  std::string citation_key;
  std::string title;
  std::vector<std::string> authors;
  std::optional<int> year;
  std::optional<std::string> venue;
  std::optional<std::string> doi;
  std::optional<std::string> language;
  std::vector<std::string> keywords;

  bool operator==(const Metadata&) const = default;
};

/// Half-open byte range into a document's raw text.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const CharSpan&) const = default;
};

/// A heading-delimited section. `heading` is empty for the level-0 preamble.
struct Chapter {
  std::string heading;
  int level = 0;
  std::string body;
  CharSpan span;

  bool operator==(const Chapter&) const = default;
};

struct BagOfWords {
  std::map<std::string, long> counts;
  long total_tokens = 0;

  bool operator==(const BagOfWords&) const = default;
};

/// Sparse vector keyed by term (tf-idf) or by dimension label (embeddings).
struct DocVector {
  std::map<std::string, double> weights;
  double norm = 0.0;

  bool is_zero() const { return norm == 0.0; }
  double get(const std::string& key) const {
    const auto it = weights.find(key);
    return it == weights.end() ? 0.0 : it->second;
  }
  bool operator==(const DocVector&) const = default;
};

/// A bibliographic record plus the artifacts the pipeline attaches to it, in order:
/// bag-of-words, then tf-idf vector, then embedding.
class Document {
 public:
  Document() = default;
  explicit Document(Metadata meta, std::optional<std::string> raw_text = std::nullopt);

  Metadata meta;
  std::optional<std::string> raw_text;
  std::vector<Chapter> chapters;

  const std::string& id() const { return meta.id; }

  const std::optional<BagOfWords>& bow() const { return bow_; }
  const std::optional<DocVector>& tfidf() const { return tfidf_; }
  const std::optional<DocVector>& embedding() const { return embedding_; }

  /// Each attach throws if the preceding stage has not run.
  void attach_bow(BagOfWords bow);
  void attach_tfidf(DocVector v);
  void attach_embedding(DocVector v);

 private:
  std::optional<BagOfWords> bow_;
  std::optional<DocVector> tfidf_;
  std::optional<DocVector> embedding_;
};

}  // namespace slrkit
