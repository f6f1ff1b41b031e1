#include "slrkit/types.hpp"

#include "slrkit/errors.hpp"

namespace slrkit {

Document::Document(Metadata m, std::optional<std::string> text)
    : meta(std::move(m)), raw_text(std::move(text)) {}

void Document::attach_bow(BagOfWords bow) {
  if (!raw_text) throw Error("document " + meta.id + " has no text; cannot attach bag-of-words");
  bow_ = std::move(bow);
  tfidf_.reset();
  embedding_.reset();
}

void Document::attach_tfidf(DocVector v) {
  if (!bow_) throw Error("document " + meta.id + ": tf-idf requires a bag-of-words");
  tfidf_ = std::move(v);
  embedding_.reset();
}

void Document::attach_embedding(DocVector v) {
  if (!tfidf_) throw Error("document " + meta.id + ": embedding requires a tf-idf vector");
  embedding_ = std::move(v);
}

}  // namespace slrkit
