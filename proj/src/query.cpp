#include "slrkit/query.hpp"

#include "slrkit/errors.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace slrkit::query {

using nlohmann::json;

namespace {

struct Parser {
  const textproc::PipelineConfig& config;
  std::vector<ResearchQuestion> out;
  std::vector<std::string> errors;
  int line_no = 0;

  void error(const std::string& msg) { errors.push_back("line " + std::to_string(line_no) + ": " + msg); }

  std::string normalize(const std::string& surface, const std::string& what) {
    std::string t = textproc::normalize_term(surface, config);
    if (t.empty()) error(what + " '" + surface + "' is empty after normalization");
    return t;
  }

  void run(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    ResearchQuestion* rq = nullptr;
    Keyword* kw = nullptr;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          error("unterminated section header");
          continue;
        }
        out.push_back({});
        rq = &out.back();
        kw = nullptr;
        rq->id = std::string(trim(t.substr(1, t.size() - 2)));
        if (rq->id.empty()) error("empty research question id");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) {
        error("expected 'key = value'");
        continue;
      }
      const std::string key = ascii_lower(trim(t.substr(0, eq)));
      const std::string value(trim(t.substr(eq + 1)));
      if (!rq) {
        error("'" + key + "' outside a [RQ] section");
        continue;
      }
      if (key == "text") {
        rq->text = value;
      } else if (key == "scope") {
        rq->scope_note = value;
      } else if (key == "perspective") {
        rq->perspective_note = value;
      } else if (key == "keyword") {
        rq->keywords.push_back({});
        kw = &rq->keywords.back();
        kw->surface = value;
        kw->term = normalize(value, "keyword");
      } else if (key == "weight" || key == "synonyms" || key == "context") {
        if (!kw) {
          error("'" + key + "' before any keyword");
          continue;
        }
        if (key == "weight") {
          try {
            std::size_t used = 0;
            kw->weight = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
          } catch (const std::exception&) {
            error("weight '" + value + "' is not a number");
          }
        } else {
          auto& surfaces = key == "synonyms" ? kw->synonym_surfaces : kw->context_surfaces;
          auto& terms = key == "synonyms" ? kw->synonyms : kw->context;
          for (auto& s : split_list(value, ",")) {
            terms.push_back(normalize(s, key == "synonyms" ? "synonym" : "context term"));
            surfaces.push_back(std::move(s));
          }
        }
      } else {
        error("unknown key '" + key + "'");
      }
    }
  }
};

std::string quote(const std::string& surface) {
  std::string s;
  for (const char c : surface) {
    if (c != '"') s += c;
  }
  return "\"" + s + "\"";
}

std::string render_group(const Keyword& k) {
  std::vector<std::string> parts{quote(k.surface)};
  for (const auto& s : k.synonym_surfaces) parts.push_back(quote(s));
  if (parts.size() == 1) return parts.front();
  return "(" + join(parts, " OR ") + ")";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

Eigen::VectorXd dense(const DocVector& v, int k) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) out(i) = v.get(vectorize::dimension_key(i));
  return out;
}

}  // namespace

std::vector<ResearchQuestion> parse_research_questions(std::string_view text, const textproc::PipelineConfig& config) {
  Parser p{config, {}, {}};
  p.run(text);
  for (auto& v : validate(p.out)) p.errors.push_back(std::move(v));
  if (!p.errors.empty()) throw ValidationError(p.errors);
  return p.out;
}

std::vector<ResearchQuestion> load_research_questions(const std::filesystem::path& path,
                                                      const textproc::PipelineConfig& config) {
  try {
    return parse_research_questions(read_utf8_file(path), config);
  } catch (const ValidationError& e) {
    std::vector<std::string> v;
    for (const auto& s : e.violations()) v.push_back(path.string() + ": " + s);
    throw ValidationError(v);
  }
}

std::string format_research_questions(const std::vector<ResearchQuestion>& rqs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < rqs.size(); ++i) {
    const auto& rq = rqs[i];
    if (i) out << "\n";
    out << "[" << rq.id << "]\n";
    out << "text = " << rq.text << "\n";
    if (!rq.scope_note.empty()) out << "scope = " << rq.scope_note << "\n";
    if (!rq.perspective_note.empty()) out << "perspective = " << rq.perspective_note << "\n";
    for (const auto& k : rq.keywords) {
      out << "keyword = " << k.surface << "\n";
      out << "  weight = " << json(k.weight).dump() << "\n";
      if (!k.synonym_surfaces.empty()) out << "  synonyms = " << join(k.synonym_surfaces, ", ") << "\n";
      if (!k.context_surfaces.empty()) out << "  context = " << join(k.context_surfaces, ", ") << "\n";
    }
  }
  return out.str();
}

std::vector<std::string> validate(const std::vector<ResearchQuestion>& rqs) {
  std::vector<std::string> v;
  std::set<std::string> ids;
  for (const auto& rq : rqs) {
    if (!rq.id.empty() && !ids.insert(rq.id).second) v.push_back(rq.id + ": duplicate id");
    if (rq.keywords.empty()) v.push_back(rq.id + ": zero keywords");
    std::set<std::string> terms;
    for (const auto& k : rq.keywords) {
      if (!(k.weight > 0) || !std::isfinite(k.weight)) {
        v.push_back(rq.id + ": keyword '" + k.surface + "' has non-positive weight " + json(k.weight).dump());
      }
      if (!k.term.empty() && !terms.insert(k.term).second) {
        v.push_back(rq.id + ": duplicate keyword '" + k.surface + "'");
      }
    }
  }
  return v;
}

void apply_weights(ResearchQuestion& rq, const std::map<std::string, double>& weights) {
  std::vector<std::string> errors;
  std::vector<std::pair<Keyword*, double>> updates;
  for (const auto& [key, w] : weights) {
    const auto it = std::find_if(rq.keywords.begin(), rq.keywords.end(),
                                 [&](const Keyword& k) { return k.surface == key || k.term == key; });
    if (it == rq.keywords.end()) {
      errors.push_back(rq.id + ": unknown keyword '" + key + "'");
    } else if (!(w > 0) || !std::isfinite(w)) {
      errors.push_back(rq.id + ": keyword '" + it->surface + "' has non-positive weight " + json(w).dump());
    } else {
      updates.emplace_back(&*it, w);
    }
  }
  if (!errors.empty()) throw ValidationError(errors);
  for (auto& [k, w] : updates) k->weight = w;
}

std::string compile_boolean_query(const ResearchQuestion& rq) {
  if (rq.keywords.empty()) return {};
  std::vector<const Keyword*> order;
  std::vector<double> weights;
  for (const auto& k : rq.keywords) {
    order.push_back(&k);
    weights.push_back(k.weight);
  }
  std::stable_sort(order.begin(), order.end(), [](const Keyword* a, const Keyword* b) {
    if (a->weight != b->weight) return a->weight > b->weight;
    return a->surface < b->surface;
  });
  const double m = median(weights);
  std::vector<std::string> mandatory;
  std::vector<std::string> optional;
  for (const auto* k : order) (k->weight >= m ? mandatory : optional).push_back(render_group(*k));
  std::string q = join(mandatory, " AND ");
  if (optional.size() == 1) q += " AND " + optional.front();
  if (optional.size() > 1) q += " AND (" + join(optional, " OR ") + ")";
  return q;
}

const RelevanceScore* Ranking::find(const std::string& doc_id) const {
  for (const auto& s : scores) {
    if (s.doc_id == doc_id) return &s;
  }
  return nullptr;
}

Ranking rank_documents(const ResearchQuestion& rq, const vectorize::TermIndex& index,
                       const std::map<std::string, DocVector>& tfidf, const EmbeddingInputs& embeddings,
                       double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (alpha > 0.0 && (!embeddings.model || !embeddings.docs)) throw ConfigError("alpha > 0 requires embeddings");
  if (const auto v = validate({rq}); !v.empty()) throw ValidationError(v);

  Ranking ranking;
  ranking.rq_id = rq.id;
  ranking.alpha = alpha;

  double total_weight = 0.0;
  for (const auto& k : rq.keywords) total_weight += k.weight;

  struct Prepared {
    std::string term;
    double share = 0.0;
    std::vector<std::string> group;
    std::vector<std::string> context;
    std::optional<Eigen::VectorXd> word_vector;
  };
  std::vector<Prepared> keywords;
  for (const auto& k : rq.keywords) {
    Prepared p;
    p.term = k.term;
    p.share = k.weight / total_weight;
    std::set<std::string> group;
    group.insert(index.canonical(k.term));
    for (const auto& s : k.synonyms) group.insert(index.canonical(s));
    for (const auto& t : group) {
      if (index.contains(t)) p.group.push_back(t);
    }
    if (p.group.empty()) {
      ranking.warnings.push_back("keyword '" + k.surface + "' (" + k.term +
                                 ") has no term in the vocabulary and contributes 0");
    }
    for (const auto& c : k.context) p.context.push_back(index.canonical(c));
    if (alpha > 0.0) {
      p.word_vector = embeddings.model->vector(k.term);
      for (std::size_t i = 0; !p.word_vector && i < k.synonyms.size(); ++i) {
        p.word_vector = embeddings.model->vector(k.synonyms[i]);
      }
      if (p.word_vector && p.word_vector->norm() == 0.0) p.word_vector.reset();
    }
    keywords.push_back(std::move(p));
  }

  for (const auto& [doc_id, vec] : tfidf) {
    RelevanceScore rs;
    rs.rq_id = rq.id;
    rs.doc_id = doc_id;
    std::optional<Eigen::VectorXd> doc_emb;
    if (alpha > 0.0) {
      const auto it = embeddings.docs->find(doc_id);
      if (it != embeddings.docs->end() && !it->second.is_zero()) doc_emb = dense(it->second, embeddings.model->k);
    }
    double score = 0.0;
    for (const auto& k : keywords) {
      double s = 0.0;
      if (!k.group.empty()) {
        for (const auto& t : k.group) s = std::max(s, vec.get(t));
        const bool gated = !k.context.empty() && std::none_of(k.context.begin(), k.context.end(), [&](const auto& c) {
          return vec.weights.count(c) > 0;
        });
        if (alpha > 0.0) {
          double e = 0.0;
          if (k.word_vector && doc_emb) {
            const double c = std::clamp(k.word_vector->dot(*doc_emb) / (k.word_vector->norm() * doc_emb->norm()), -1.0, 1.0);
            e = (1.0 + c) / 2.0;
          }
          s = (1.0 - alpha) * s + alpha * e;
        }
        if (gated) s = 0.0;
      }
      const double contribution = k.share * s;
      rs.contributions.push_back({k.term, contribution});
      score += contribution;
    }
    rs.score = std::clamp(score, 0.0, 1.0);
    ranking.scores.push_back(std::move(rs));
  }
  std::stable_sort(ranking.scores.begin(), ranking.scores.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  for (std::size_t i = 0; i < ranking.scores.size(); ++i) ranking.scores[i].rank = static_cast<int>(i) + 1;
  return ranking;
}

std::vector<KeywordSuggestion> suggest_keywords(const std::vector<std::string>& seed_doc_ids,
                                                const std::map<std::string, DocVector>& tfidf, int top_n) {
  if (seed_doc_ids.empty()) throw Error("suggest_keywords: empty seed set");
  if (top_n < 1) throw ConfigError("suggest_keywords: top_n must be >= 1");
  std::map<std::string, double> sums;
  for (const auto& id : seed_doc_ids) {
    const auto it = tfidf.find(id);
    if (it == tfidf.end()) throw NotFoundError("seed document '" + id + "' has no tf-idf vector");
    for (const auto& [term, w] : it->second.weights) sums[term] += w;
  }
  const double n = static_cast<double>(seed_doc_ids.size());
  std::vector<KeywordSuggestion> out;
  for (const auto& [term, s] : sums) {
    if (s > 0) out.push_back({term, s / n});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.term < b.term;
  });
  if (out.size() > static_cast<std::size_t>(top_n)) out.resize(static_cast<std::size_t>(top_n));
  if (!out.empty()) {
    const double top = out.front().weight;
    for (auto& s : out) s.weight /= top;
    out.front().weight = 1.0;
  }
  return out;
}

void to_json(json& j, const Keyword& k) {
  j = json{{"surface", k.surface},           {"term", k.term},         {"weight", k.weight},
           {"synonyms", k.synonym_surfaces}, {"synonym_terms", k.synonyms}, {"context", k.context_surfaces},
           {"context_terms", k.context}};
}

void to_json(json& j, const ResearchQuestion& rq) {
  j = json{{"id", rq.id},
           {"text", rq.text},
           {"scope", rq.scope_note},
           {"perspective", rq.perspective_note},
           {"keywords", rq.keywords},
           {"boolean_query", compile_boolean_query(rq)}};
}

void to_json(json& j, const Ranking& r) {
  json scores = json::array();
  for (const auto& s : r.scores) {
    json contributions = json::array();
    for (const auto& c : s.contributions) contributions.push_back({{"term", c.term}, {"contribution", c.contribution}});
    scores.push_back({{"doc_id", s.doc_id}, {"rank", s.rank}, {"score", s.score}, {"contributions", contributions}});
  }
  j = json{{"rq_id", r.rq_id}, {"alpha", r.alpha}, {"warnings", r.warnings}, {"scores", scores}};
}

Ranking ranking_from_json(const json& j) {
  Ranking r;
  r.rq_id = j.at("rq_id").get<std::string>();
  r.alpha = j.at("alpha").get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& s : j.at("scores")) {
    RelevanceScore rs;
    rs.rq_id = r.rq_id;
    rs.doc_id = s.at("doc_id").get<std::string>();
    rs.rank = s.at("rank").get<int>();
    rs.score = s.at("score").get<double>();
    for (const auto& c : s.at("contributions")) {
      rs.contributions.push_back({c.at("term").get<std::string>(), c.at("contribution").get<double>()});
    }
    r.scores.push_back(std::move(rs));
  }
  return r;
}

std::string rankings_csv(const std::vector<Ranking>& rankings) {
  std::string out = "rq_id,doc_id,score,rank\r\n";
  for (const auto& r : rankings) {
    for (const auto& s : r.scores) {
      out += csv_field(r.rq_id) + "," + csv_field(s.doc_id) + "," + format_fixed(s.score, 6) + "," + std::to_string(s.rank) + "\r\n";
    }
  }
  return out;
}

}  // namespace slrkit::query
