#include "slrkit/vectorize.hpp"

#include "slrkit/errors.hpp"
#include "slrkit/svd.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace slrkit::vectorize {

using nlohmann::json;

std::vector<SynonymSet> parse_synonym_sets(std::string_view text) {
  std::vector<SynonymSet> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto colon = t.find(':');
    if (colon == std::string_view::npos) {
      errors.push_back("synonyms line " + std::to_string(line_no) + ": expected 'canonical: member, ...'");
      continue;
    }
    SynonymSet set;
    set.canonical = std::string(trim(t.substr(0, colon)));
    set.members = split_list(t.substr(colon + 1), ",");
    if (set.canonical.empty()) {
      errors.push_back("synonyms line " + std::to_string(line_no) + ": empty canonical term");
      continue;
    }
    out.push_back(std::move(set));
  }
  if (!errors.empty()) throw ConfigError(join(errors, "; "));
  return out;
}

const std::string& TermIndex::canonical(const std::string& term) const {
  const auto it = synonym_merges.find(term);
  return it == synonym_merges.end() ? term : it->second;
}

BagOfWords TermIndex::merge(const BagOfWords& bag) const {
  if (synonym_merges.empty()) return bag;
  BagOfWords out;
  out.total_tokens = bag.total_tokens;
  for (const auto& [term, count] : bag.counts) out.counts[canonical(term)] += count;
  return out;
}

double TermIndex::idf(const std::string& term) const {
  const auto it = df.find(term);
  const double d = it == df.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + d)) + 1.0;
}

TermIndex build_index(const Bags& bags, const std::vector<SynonymSet>& synonym_sets) {
  if (bags.empty()) throw Error("build_index: no bags");
  TermIndex index;
  std::map<std::string, std::size_t> owner;
  std::vector<std::string> overlaps;
  for (std::size_t s = 0; s < synonym_sets.size(); ++s) {
    const auto& set = synonym_sets[s];
    std::set<std::string> terms(set.members.begin(), set.members.end());
    terms.insert(set.canonical);
    for (const auto& t : terms) {
      const auto [it, inserted] = owner.emplace(t, s);
      if (!inserted) {
        overlaps.push_back("'" + t + "' appears in synonym sets '" + synonym_sets[it->second].canonical + "' and '" +
                           set.canonical + "'");
        continue;
      }
      if (t != set.canonical) index.synonym_merges[t] = set.canonical;
    }
  }
  if (!overlaps.empty()) throw ConfigError("overlapping synonym sets: " + join(overlaps, "; "));

  index.n_docs = static_cast<long>(bags.size());
  for (const auto& [id, bag] : bags) {
    for (const auto& [term, count] : index.merge(bag).counts) {
      if (count > 0) ++index.df[term];
    }
  }
  for (const auto& [term, d] : index.df) index.vocabulary.push_back(term);
  return index;
}

TfidfResult tfidf_vectors(const TermIndex& index, const Bags& bags) {
  TfidfResult out;
  for (const auto& [id, bag] : bags) {
    const BagOfWords merged = index.merge(bag);
    DocVector v;
    if (merged.total_tokens > 0) {
      const double total = static_cast<double>(merged.total_tokens);
      double sq = 0.0;
      for (const auto& [term, count] : merged.counts) {
        if (count <= 0) continue;
        const double w = (static_cast<double>(count) / total) * index.idf(term);
        v.weights[term] = w;
        sq += w * w;
      }
      const double norm = std::sqrt(sq);
      if (norm > 0) {
        for (auto& [term, w] : v.weights) w /= norm;
        v.norm = 1.0;
      } else {
        v.weights.clear();
      }
    }
    if (v.norm == 0.0) out.empty_docs.push_back(id);
    out.vectors.emplace(id, std::move(v));
  }
  return out;
}

double cosine(const DocVector& a, const DocVector& b) {
  const DocVector& small = a.weights.size() <= b.weights.size() ? a : b;
  const DocVector& large = &small == &a ? b : a;
  double dot = 0.0;
  for (const auto& [key, w] : small.weights) {
    const auto it = large.weights.find(key);
    if (it != large.weights.end()) dot += w * it->second;
  }
  const auto norm = [](const DocVector& v) {
    double sq = 0.0;
    for (const auto& [k, w] : v.weights) sq += w * w;
    return std::sqrt(sq);
  };
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// embeddings

CooccurrenceMatrix build_cooccurrence(const std::vector<std::vector<std::string>>& corpus_tokens, int window) {
  if (window < 1) throw ConfigError("co-occurrence window must be >= 1");
  CooccurrenceMatrix m;
  std::set<std::string> vocab;
  for (const auto& doc : corpus_tokens) vocab.insert(doc.begin(), doc.end());
  m.vocabulary.assign(vocab.begin(), vocab.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < m.vocabulary.size(); ++i) index[m.vocabulary[i]] = static_cast<int>(i);

  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& doc : corpus_tokens) {
    std::vector<int> ids;
    ids.reserve(doc.size());
    for (const auto& t : doc) ids.push_back(index[t]);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t d = 1; d <= static_cast<std::size_t>(window) && i + d < ids.size(); ++d) {
        triplets.emplace_back(ids[i], ids[i + d], 1.0);
        triplets.emplace_back(ids[i + d], ids[i], 1.0);
      }
    }
  }
  const auto v = static_cast<Eigen::Index>(m.vocabulary.size());
  m.counts.resize(v, v);
  m.counts.setFromTriplets(triplets.begin(), triplets.end());
  m.counts.makeCompressed();
  m.marginals = Eigen::VectorXd::Zero(v);
  for (int k = 0; k < m.counts.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.counts, k); it; ++it) m.marginals(it.row()) += it.value();
  }
  m.total = m.marginals.sum();
  return m;
}

Eigen::SparseMatrix<double> ppmi(const CooccurrenceMatrix& cooc) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < cooc.counts.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(cooc.counts, k); it; ++it) {
      const double denom = cooc.marginals(it.row()) * cooc.marginals(it.col());
      if (it.value() <= 0 || denom <= 0) continue;
      const double pmi = std::log(it.value() * cooc.total / denom);
      if (pmi > 0) triplets.emplace_back(it.row(), it.col(), pmi);
    }
  }
  Eigen::SparseMatrix<double> out(cooc.counts.rows(), cooc.counts.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

std::optional<Eigen::Index> EmbeddingModel::row(const std::string& term) const {
  const auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term);
  if (it == vocabulary.end() || *it != term) return std::nullopt;
  return static_cast<Eigen::Index>(it - vocabulary.begin());
}

std::optional<Eigen::VectorXd> EmbeddingModel::vector(const std::string& term) const {
  const auto r = row(term);
  if (!r) return std::nullopt;
  return Eigen::VectorXd(vectors.row(*r).transpose());
}

EmbeddingModel build_embeddings(const std::vector<std::vector<std::string>>& corpus_tokens,
                                const EmbeddingOptions& options) {
  if (options.k < 1) throw ConfigError("embedding rank k must be >= 1");
  EmbeddingModel model;
  model.window = options.window;
  model.seed = options.seed;
  const CooccurrenceMatrix cooc = build_cooccurrence(corpus_tokens, options.window);
  model.vocabulary = cooc.vocabulary;
  const auto v = static_cast<int>(cooc.vocabulary.size());
  model.k = std::min(options.k, v);
  if (model.k < options.k) {
    model.warnings.push_back("vocabulary size " + std::to_string(v) + " is smaller than k=" +
                             std::to_string(options.k) + "; k clamped to " + std::to_string(model.k));
  }
  if (model.k == 0) {
    model.vectors.resize(0, 0);
    return model;
  }
  const Eigen::SparseMatrix<double> p = ppmi(cooc);
  const linalg::Svd svd =
      linalg::randomized_svd(p, {model.k, options.oversampling, options.power_iterations, options.seed});
  model.vectors = svd.u * svd.s.cwiseSqrt().asDiagonal();
  return model;
}

std::string dimension_key(Eigen::Index i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "e%03ld", static_cast<long>(i));
  return buf;
}

DocEmbeddings doc_embeddings(const EmbeddingModel& model, const std::map<std::string, DocVector>& tfidf) {
  DocEmbeddings out;
  for (const auto& [id, tv] : tfidf) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.k);
    bool any = false;
    for (const auto& [term, w] : tv.weights) {
      if (const auto r = model.row(term)) {
        acc += w * model.vectors.row(*r).transpose();
        any = true;
      }
    }
    DocVector dv;
    const double norm = acc.norm();
    if (!any || norm == 0.0) {
      out.flagged.push_back(id);
    } else {
      for (Eigen::Index i = 0; i < acc.size(); ++i) dv.weights[dimension_key(i)] = acc(i) / norm;
      dv.norm = 1.0;
    }
    out.vectors.emplace(id, std::move(dv));
  }
  return out;
}

double SimilarityMatrix::get(const std::string& a, const std::string& b) const {
  if (a == b) return zero_vectors.count(a) ? 0.0 : 1.0;
  const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  const auto it = pairs.find(key);
  return it == pairs.end() ? 0.0 : it->second;
}

SimilarityMatrix similarity_matrix(const std::map<std::string, DocVector>& vectors) {
  SimilarityMatrix m;
  std::vector<const DocVector*> vs;
  for (const auto& [id, v] : vectors) {
    m.ids.push_back(id);
    vs.push_back(&v);
    if (v.is_zero()) m.zero_vectors.insert(id);
  }
  std::vector<std::pair<std::size_t, std::size_t>> todo;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) todo.emplace_back(i, j);
  }
  std::vector<double> values(todo.size());
  parallel_for(todo.size(), [&](std::size_t p) { values[p] = cosine(*vs[todo[p].first], *vs[todo[p].second]); });
  for (std::size_t p = 0; p < todo.size(); ++p) m.pairs.emplace(std::make_pair(m.ids[todo[p].first], m.ids[todo[p].second]), values[p]);
  return m;
}

std::vector<SynonymSuggestion> suggest_synonyms(const EmbeddingModel& model, double min_cosine) {
  std::vector<SynonymSuggestion> out;
  const auto n = static_cast<Eigen::Index>(model.vocabulary.size());
  if (n == 0 || model.k == 0) return out;
  const Eigen::VectorXd norms = model.vectors.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double c = 0.0;
      if (norms(i) > 0 && norms(j) > 0) {
        c = std::clamp(model.vectors.row(i).dot(model.vectors.row(j)) / (norms(i) * norms(j)), -1.0, 1.0);
      }
      if (c >= min_cosine) {
        out.push_back({model.vocabulary[static_cast<std::size_t>(i)], model.vocabulary[static_cast<std::size_t>(j)], c});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.cosine != y.cosine) return x.cosine > y.cosine;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const DocVector& v) { j = json{{"weights", v.weights}, {"norm", v.norm}}; }

void from_json(const json& j, DocVector& v) {
  v.weights = j.at("weights").get<std::map<std::string, double>>();
  v.norm = j.at("norm").get<double>();
}

void to_json(json& j, const TermIndex& idx) {
  j = json{{"vocabulary", idx.vocabulary}, {"df", idx.df}, {"n_docs", idx.n_docs}, {"synonym_merges", idx.synonym_merges}};
}

void from_json(const json& j, TermIndex& idx) {
  idx.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  idx.df = j.at("df").get<std::map<std::string, long>>();
  idx.n_docs = j.at("n_docs").get<long>();
  idx.synonym_merges = j.at("synonym_merges").get<std::map<std::string, std::string>>();
}

void to_json(json& j, const EmbeddingModel& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.vectors.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.vectors.cols(); ++c) row.push_back(m.vectors(r, c));
    rows.push_back(std::move(row));
  }
  j = json{{"vocabulary", m.vocabulary}, {"k", m.k}, {"seed", m.seed}, {"window", m.window},
           {"vectors", rows}, {"warnings", m.warnings}};
}

void from_json(const json& j, EmbeddingModel& m) {
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.k = j.at("k").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.window = j.value("window", 5);
  m.warnings = j.value("warnings", std::vector<std::string>{});
  const auto& rows = j.at("vectors");
  m.vectors.resize(static_cast<Eigen::Index>(rows.size()), m.k);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != static_cast<std::size_t>(m.k)) throw IntegrityError("embedding row has wrong length", {m.vocabulary.at(r)});
    for (int c = 0; c < m.k; ++c) m.vectors(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)].get<double>();
  }
}

json similarity_json(const SimilarityMatrix& m, std::string_view space) {
  json pairs = json::array();
  for (const auto& [key, c] : m.pairs) pairs.push_back({{"a", key.first}, {"b", key.second}, {"cosine", c}});
  return json{{"space", space}, {"ids", m.ids}, {"pairs", pairs}, {"zero_vectors", m.zero_vectors}};
}

SimilarityMatrix similarity_from_json(const json& j) {
  SimilarityMatrix m;
  m.ids = j.at("ids").get<std::vector<std::string>>();
  for (const auto& p : j.at("pairs")) {
    m.pairs.emplace(std::make_pair(p.at("a").get<std::string>(), p.at("b").get<std::string>()), p.at("cosine").get<double>());
  }
  m.zero_vectors = j.value("zero_vectors", std::set<std::string>{});
  return m;
}

}  // namespace slrkit::vectorize
