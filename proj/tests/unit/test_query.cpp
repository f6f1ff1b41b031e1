#include "slrkit/errors.hpp"
#include "slrkit/query.hpp"
#include "slrkit/textproc.hpp"
#include "slrkit/util.hpp"
#include "slrkit/vectorize.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace slrkit;
using namespace slrkit::query;

namespace {

const textproc::PipelineConfig kConfig;

struct Toy {
  vectorize::TermIndex index;
  std::map<std::string, DocVector> tfidf;
  oracle::Counts counts;
};

Toy toy() {
  std::vector<Document> docs;
  for (const auto& [id, text] : fixtures::toy_texts()) {
    docs.emplace_back(Metadata{}, text);
    docs.back().meta.id = id;
  }
  textproc::attach_bags(docs, kConfig, textproc::build_lexicons(docs, kConfig));
  vectorize::Bags bags;
  Toy t;
  for (const auto& d : docs) {
    bags[d.id()] = *d.bow();
    t.counts[d.id()] = d.bow()->counts;
  }
  t.index = vectorize::build_index(bags);
  t.tfidf = vectorize::tfidf_vectors(t.index, bags).vectors;
  return t;
}

std::vector<oracle::OracleKeyword> oracle_keywords(const ResearchQuestion& rq) {
  std::vector<oracle::OracleKeyword> out;
  for (const auto& k : rq.keywords) {
    oracle::OracleKeyword o;
    o.group.push_back(k.term);
    o.group.insert(o.group.end(), k.synonyms.begin(), k.synonyms.end());
    o.context = k.context;
    o.weight = k.weight;
    out.push_back(o);
  }
  return out;
}

std::vector<std::string> violations_of(std::string_view text) {
  try {
    parse_research_questions(text, kConfig);
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

ResearchQuestion rq_from(std::string_view text) { return parse_research_questions(text, kConfig).at(0); }

}  // namespace

TEST_CASE("research question parsing") {
  const auto rq = rq_from("[RQ7]\ntext = Q?\nkeyword = reviews\n  weight = 2.0\nkeyword = automation\n  weight = 1\n");
  CHECK(rq.id == "RQ7");
  REQUIRE(rq.keywords.size() == 2);
  CHECK(rq.keywords[0].term == "review");
  CHECK(rq.keywords[0].surface == "reviews");
  CHECK(rq.keywords[0].weight == 2.0);
  CHECK(rq.keywords[1].term == textproc::stem("automation"));

  const auto fixture = load_research_questions(testing::fixture("project/rqs.txt"), kConfig);
  REQUIRE(fixture.size() == 2);
  CHECK(fixture[0].id == "RQ1");
  CHECK(fixture[1].id == "RQ2");
  CHECK(fixture[0].keywords[3].context == std::vector<std::string>{"citat"});
  CHECK(fixture[0].keywords[0].term == "systemat_review");
}

TEST_CASE("parse errors are collected") {
  const auto v = violations_of("[RQ1]\nkeyword = review\n  weight = -1\nkeyword = the\n[RQ2]\ntext = empty\n[RQ1]\nkeyword = x1\n");
  REQUIRE(v.size() >= 4);
  auto has = [&](std::string_view needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
  };
  CHECK(has("non-positive weight"));
  CHECK(has("RQ2"));
  CHECK(has("duplicate"));
  CHECK(has("'the'"));
}

TEST_CASE("format and parse round-trip") {
  const auto rqs = load_research_questions(testing::fixture("project/rqs.txt"), kConfig);
  const auto again = parse_research_questions(format_research_questions(rqs), kConfig);
  REQUIRE(again.size() == rqs.size());
  for (std::size_t i = 0; i < rqs.size(); ++i) {
    CHECK(nlohmann::json(again[i]) == nlohmann::json(rqs[i]));
  }
}

TEST_CASE("boolean query rendering") {
  CHECK(compile_boolean_query(rq_from("[Q]\nkeyword = automation\n  synonyms = automated\n")) ==
        R"(("automation" OR "automated"))");
  CHECK(compile_boolean_query(rq_from("[Q]\nkeyword = screening\nkeyword = automation\n")) ==
        R"("automation" AND "screening")");
  // Weights 3, 2, 1: median 2, so the weight-1 group is the only optional group.
  CHECK(compile_boolean_query(rq_from("[Q]\n"
                                      "keyword = screening\n  weight = 1\n"
                                      "keyword = automation\n  weight = 3\n  synonyms = automated\n"
                                      "keyword = systematic review\n  weight = 2\n")) ==
        R"(("automation" OR "automated") AND "systematic review" AND "screening")");
  // Weights 4, 3, 1, 1: median 2, two optional groups.
  CHECK(compile_boolean_query(rq_from("[Q]\n"
                                      "keyword = topic models\n  weight = 1\n"
                                      "keyword = automation\n  weight = 4\n"
                                      "keyword = embeddings\n  weight = 1\n  synonyms = vectors\n"
                                      "keyword = screening\n  weight = 3\n")) ==
        R"("automation" AND "screening" AND (("embeddings" OR "vectors") OR "topic models"))");
}

TEST_CASE("weights") {
  auto rq = rq_from("[Q]\nkeyword = screening\nkeyword = text mining\n");
  apply_weights(rq, {{"screening", 3.0}, {"text_mine", 2.0}});
  CHECK(rq.keywords[0].weight == 3.0);
  CHECK(rq.keywords[1].weight == 2.0);
  CHECK_THROWS_AS(apply_weights(rq, {{"screening", 0.0}}), ValidationError);
  CHECK_THROWS_AS(apply_weights(rq, {{"unknown", 1.0}}), ValidationError);
  CHECK(rq.keywords[0].weight == 3.0);
}

TEST_CASE("ranking equals the exhaustive oracle") {
  const auto t = toy();
  const auto expected_tfidf = oracle::tfidf(t.counts);
  for (const auto* text : {"[Q]\nkeyword = screening\n  weight = 2\nkeyword = text mining\n",
                           "[Q]\nkeyword = abstracts\nkeyword = graph\n  weight = 3\n  context = papers\n",
                           "[Q]\nkeyword = reviewer\n  synonyms = review\nkeyword = time\n  context = banana\n"}) {
    const auto rq = rq_from(text);
    const auto ranking = rank_documents(rq, t.index, t.tfidf);
    const auto expected = oracle::rank(oracle_keywords(rq), expected_tfidf);
    REQUIRE(ranking.scores.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(ranking.scores[i].doc_id == expected[i].first);
      CHECK(std::abs(ranking.scores[i].score - expected[i].second) < 1e-12);
      CHECK(ranking.scores[i].rank == static_cast<int>(i) + 1);
    }
  }
}

TEST_CASE("ranking invariants") {
  const auto t = toy();
  std::mt19937 rng(2);
  const std::vector<std::string> vocab{"screening", "abstracts", "review", "graph", "time", "terms", "zebra"};
  for (int round = 0; round < 100; ++round) {
    std::string text = "[Q]\n";
    std::set<std::string> used;
    for (int i = 0; i < 3; ++i) {
      const auto& w = vocab[rng() % vocab.size()];
      if (!used.insert(w).second) continue;
      text += "keyword = " + w + "\n  weight = " + std::to_string(1 + rng() % 5) + "\n";
      if (rng() % 3 == 0) text += "  context = " + vocab[rng() % vocab.size()] + "\n";
    }
    const auto rq = rq_from(text);
    const auto r = rank_documents(rq, t.index, t.tfidf);

    auto scaled = rq;
    for (auto& k : scaled.keywords) k.weight *= 2.5;
    const auto r2 = rank_documents(scaled, t.index, t.tfidf);

    auto ungated = rq;
    for (auto& k : ungated.keywords) k.context.clear();
    const auto r3 = rank_documents(ungated, t.index, t.tfidf);

    for (std::size_t i = 0; i < r.scores.size(); ++i) {
      const auto& s = r.scores[i];
      CHECK((s.score >= 0.0 && s.score <= 1.0));
      double sum = 0;
      for (const auto& c : s.contributions) sum += c.contribution;
      CHECK(std::abs(sum - s.score) < 1e-9);
      CHECK(r2.scores[i].doc_id == s.doc_id);
      CHECK(std::abs(r2.scores[i].score - s.score) < 1e-12);
      const auto* open = r3.find(s.doc_id);
      for (std::size_t c = 0; c < s.contributions.size(); ++c) {
        const double gated = s.contributions[c].contribution, plain = open->contributions[c].contribution;
        CHECK((gated == plain || gated == 0.0));
      }
      if (i > 0) {
        const auto& p = r.scores[i - 1];
        CHECK((p.score > s.score || (p.score == s.score && p.doc_id < s.doc_id)));
      }
    }
  }
}

TEST_CASE("ranking edge cases") {
  const auto t = toy();
  const auto single = rank_documents(rq_from("[Q]\nkeyword = abstracts\n"), t.index, t.tfidf);
  for (std::size_t i = 1; i < single.scores.size(); ++i) {
    CHECK(t.tfidf.at(single.scores[i - 1].doc_id).get("abstract") >= t.tfidf.at(single.scores[i].doc_id).get("abstract"));
  }
  const auto unknown = rank_documents(rq_from("[Q]\nkeyword = zebra\nkeyword = graph\n"), t.index, t.tfidf);
  REQUIRE(unknown.warnings.size() == 1);
  CHECK(unknown.warnings[0].find("zebra") != std::string::npos);
  CHECK(unknown.find("t1")->score == 0.0);
  CHECK_THROWS_AS(rank_documents(rq_from("[Q]\nkeyword = graph\n"), t.index, t.tfidf, {}, 1.5), ConfigError);
  CHECK_THROWS_AS(rank_documents(rq_from("[Q]\nkeyword = graph\n"), t.index, t.tfidf, {}, 0.5), ConfigError);
}

TEST_CASE("embedding blend") {
  const auto t = toy();
  std::vector<std::vector<std::string>> tokens;
  for (const auto& [id, c] : t.counts) {
    std::vector<std::string> s;
    for (const auto& [term, n] : c) s.insert(s.end(), static_cast<std::size_t>(n), term);
    tokens.push_back(s);
  }
  vectorize::EmbeddingOptions o;
  o.k = 4;
  const auto model = vectorize::build_embeddings(tokens, o);
  const auto docs = vectorize::doc_embeddings(model, t.tfidf).vectors;
  const auto rq = rq_from("[Q]\nkeyword = screening\n");
  const auto r = rank_documents(rq, t.index, t.tfidf, {&model, &docs}, 1.0);
  const auto w = *model.vector("screen");
  for (const auto& s : r.scores) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(o.k);
    for (int i = 0; i < o.k; ++i) d(i) = docs.at(s.doc_id).get(vectorize::dimension_key(i));
    const double cos = d.norm() == 0 ? 0.0 : w.dot(d) / (w.norm() * d.norm());
    CHECK(std::abs(s.score - (1.0 + cos) / 2.0) < 1e-9);
  }
}

TEST_CASE("keyword suggestions") {
  DocVector s1, s2;
  s1.weights = {{"a", 0.8}, {"b", 0.6}};
  s1.norm = 1.0;
  s2.weights = {{"a", 0.6}, {"c", 0.8}};
  s2.norm = 1.0;
  const std::map<std::string, DocVector> tfidf{{"s1", s1}, {"s2", s2}};
  // Means: a 0.7, c 0.4, b 0.3.
  const auto out = suggest_keywords({"s1", "s2"}, tfidf);
  REQUIRE(out.size() == 3);
  CHECK(out[0].term == "a");
  CHECK(out[0].weight == 1.0);
  CHECK(out[1].term == "c");
  CHECK(out[1].weight == doctest::Approx(0.4 / 0.7).epsilon(1e-12));
  CHECK(out[2].term == "b");
  CHECK(out[2].weight == doctest::Approx(0.3 / 0.7).epsilon(1e-12));
  const auto one = suggest_keywords({"s1"}, tfidf, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].term == "a");
  CHECK_THROWS_AS(suggest_keywords({}, tfidf), Error);
  CHECK_THROWS_AS(suggest_keywords({"missing"}, tfidf), Error);
}

TEST_CASE("ranking serialization") {
  const auto t = toy();
  const auto r = rank_documents(rq_from("[RQ1]\nkeyword = screening\n"), t.index, t.tfidf);
  const auto back = ranking_from_json(nlohmann::json(r));
  CHECK(nlohmann::json(back) == nlohmann::json(r));
  const auto csv = rankings_csv({r});
  const auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"rq_id", "doc_id", "score", "rank"});
  CHECK(rows[1][1] == r.scores[0].doc_id);
  CHECK(rows[1][3] == "1");
}
