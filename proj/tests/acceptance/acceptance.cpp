// One PASS/FAIL line per acceptance criterion; exits non-zero when any fails.

#include "slrkit/assess.hpp"
#include "slrkit/corpus.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/export.hpp"
#include "slrkit/project.hpp"
#include "slrkit/query.hpp"
#include "slrkit/screen.hpp"
#include "slrkit/shapes.hpp"
#include "slrkit/svd.hpp"
#include "slrkit/textproc.hpp"
#include "slrkit/util.hpp"
#include "slrkit/vectorize.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>

using namespace slrkit;
namespace fs = std::filesystem;

namespace {

constexpr const char* kCatalogChecksum = "f4ca8dca39b7416ed6350bd876b8be3c10b0b586b02c482e4e95391936f63012";
constexpr double kTfidfTolerance = 1e-9;
constexpr double kSelfSimilarityTolerance = 1e-9;

class Failures {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && messages_.size() < 5) messages_.push_back(what);
    if (!ok) ++count_;
  }
  int count() const { return count_; }
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  int count_ = 0;
  std::vector<std::string> messages_;
};

struct Criterion {
  std::string name;
  double limit_seconds;
  std::function<void(Failures&)> body;
};

const textproc::PipelineConfig kConfig;

vectorize::Bags toy_bags() {
  std::vector<Document> docs;
  for (const auto& [id, text] : fixtures::toy_texts()) {
    docs.emplace_back(Metadata{}, text);
    docs.back().meta.id = id;
  }
  textproc::attach_bags(docs, kConfig, textproc::build_lexicons(docs, kConfig));
  vectorize::Bags bags;
  for (const auto& d : docs) bags[d.id()] = *d.bow();
  return bags;
}

oracle::Counts counts_of(const vectorize::Bags& bags) {
  oracle::Counts out;
  for (const auto& [id, b] : bags) out[id] = b.counts;
  return out;
}

std::vector<std::vector<std::string>> vehicle_corpus() {
  std::vector<std::vector<std::string>> corpus;
  const std::vector<std::string> road{"drive", "road", "engine", "park", "fuel"};
  const std::vector<std::string> food{"eat", "ripe", "peel", "fruit", "sweet"};
  for (int i = 0; i < 40; ++i) {
    corpus.push_back({road[i % 5], i % 2 ? "car" : "automobile", road[(i + 2) % 5]});
    corpus.push_back({food[i % 5], "banana", food[(i + 1) % 5]});
  }
  return corpus;
}

std::map<std::string, std::string> stage_files(const fs::path& run) {
  std::map<std::string, std::string> out;
  const auto manifest = project::manifest_from_json(nlohmann::json::parse(read_file(run / "manifest.json")));
  for (const auto& f : manifest.files) out[f.path] = read_file(run / f.path);
  return out;
}

void catalog(Failures& f) {
  const auto& c = assess::load_catalog();
  f.expect(c.entries.size() == 65, "65 requirements");
  f.expect(c.task_ids().size() == 8, "8 tasks");
  f.expect(c.stages() == std::vector<std::string>{"I", "II", "III", "IV"}, "4 stages");
  f.expect(c.text_checksum() == kCatalogChecksum, "catalog text checksum");
}

void tfidf(Failures& f) {
  const auto bags = toy_bags();
  f.expect(bags.size() == 4, "four fixture documents");
  const auto got = vectorize::tfidf_vectors(vectorize::build_index(bags), bags).vectors;
  const auto expected = oracle::tfidf(counts_of(bags));
  f.expect(got.size() == expected.size(), "vector count");
  for (const auto& [id, weights] : expected) {
    const auto& v = got.at(id);
    f.expect(v.weights.size() == weights.size(), id + " support");
    for (const auto& [t, w] : weights) f.expect(std::abs(v.get(t) - w) <= kTfidfTolerance, id + "/" + t);
  }
}

void similarity(Failures& f) {
  const auto bags = toy_bags();
  const auto vectors = vectorize::tfidf_vectors(vectorize::build_index(bags), bags).vectors;
  const auto m = vectorize::similarity_matrix(vectors);
  const auto expected = oracle::tfidf(counts_of(bags));
  for (const auto& [a, va] : expected) {
    for (const auto& [b, vb] : expected) {
      if (a == b) continue;
      f.expect(m.get(a, b) == m.get(b, a), "symmetry " + a + "," + b);
      f.expect(std::abs(m.get(a, b) - oracle::cosine(va, vb)) <= kTfidfTolerance, "oracle " + a + "," + b);
    }
    f.expect(std::abs(vectorize::cosine(vectors.at(a), vectors.at(a)) - 1.0) <= kSelfSimilarityTolerance,
             "self similarity " + a);
  }

  std::mt19937 rng(13);
  std::normal_distribution<double> g;
  std::map<std::string, DocVector> random;
  for (int d = 0; d < 40; ++d) {
    DocVector v;
    double sq = 0;
    for (int i = 0; i < 8; ++i) {
      if (rng() % 3 == 0) continue;
      const double w = g(rng);
      v.weights[vectorize::dimension_key(i)] = w;
      sq += w * w;
    }
    v.norm = std::sqrt(sq);
    random["v" + std::to_string(d)] = v;
  }
  const auto r = vectorize::similarity_matrix(random);
  for (const auto& [a, va] : random) {
    for (const auto& [b, vb] : random) {
      const double s = r.get(a, b);
      f.expect(s == r.get(b, a), "random symmetry");
      f.expect(s >= -1.0 - 1e-12 && s <= 1.0 + 1e-12, "random range");
    }
    if (va.norm > 0) f.expect(std::abs(vectorize::cosine(va, va) - 1.0) <= kSelfSimilarityTolerance, "random self");
  }
}

void embeddings(Failures& f) {
  std::mt19937 rng(17);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::vector<std::string>> corpus(5);
    for (auto& s : corpus) {
      for (int i = 0; i < 20; ++i) s.push_back(std::string(1, static_cast<char>('a' + rng() % 8)));
    }
    const Eigen::MatrixXd p(vectorize::ppmi(vectorize::build_cooccurrence(corpus, 1 + static_cast<int>(rng() % 4))));
    f.expect(p.minCoeff() >= 0.0, "ppmi non-negative");
  }

  std::vector<std::vector<std::string>> sentences(60);
  std::mt19937 words(29);
  for (auto& s : sentences) {
    for (int i = 0; i < 12; ++i) s.push_back("w" + std::to_string(words() % 30));
  }
  for (int w = 0; w < 30; ++w) sentences.push_back({"w" + std::to_string(w), "w" + std::to_string((w + 1) % 30)});
  const auto cooc = vectorize::build_cooccurrence(sentences, 2);
  f.expect(cooc.vocabulary.size() == 30, "30 term ppmi fixture");
  const Eigen::MatrixXd ppmi30(vectorize::ppmi(cooc));
  double previous = std::numeric_limits<double>::infinity();
  for (int k : {2, 4, 8}) {
    linalg::RandomizedSvdOptions o;
    o.rank = k;
    o.seed = 5;
    const double err = linalg::reconstruction_error(ppmi30, linalg::randomized_svd(ppmi30, o));
    f.expect(err <= previous + 1e-9, "error non-increasing at k=" + std::to_string(k));
    previous = err;
  }

  vectorize::EmbeddingOptions o;
  o.window = 2;
  o.k = 4;
  o.seed = 42;
  const auto model = vectorize::build_embeddings(vehicle_corpus(), o);
  const auto suggestions = vectorize::suggest_synonyms(model, 0.5);
  f.expect(!suggestions.empty() && suggestions[0].a == "automobile" && suggestions[0].b == "car",
           "planted pair ranks first");
  const auto again = vectorize::build_embeddings(vehicle_corpus(), o);
  f.expect(model.vectors.size() == again.vectors.size() &&
               std::memcmp(model.vectors.data(), again.vectors.data(),
                           sizeof(double) * static_cast<std::size_t>(model.vectors.size())) == 0,
           "seeded runs bitwise equal");
}

void ranking(Failures& f) {
  const auto bags = toy_bags();
  const auto index = vectorize::build_index(bags);
  const auto tfidf = vectorize::tfidf_vectors(index, bags).vectors;
  const auto expected_tfidf = oracle::tfidf(counts_of(bags));

  std::mt19937 rng(2);
  const std::vector<std::string> vocab{"screening", "abstracts", "review", "graph", "time", "terms", "text mining"};
  for (int round = 0; round < 100; ++round) {
    std::string text = "[Q]\n";
    std::set<std::string> used;
    for (int i = 0; i < 3; ++i) {
      const auto& w = vocab[rng() % vocab.size()];
      if (!used.insert(w).second) continue;
      text += "keyword = " + w + "\n  weight = " + std::to_string(1 + rng() % 5) + "\n";
      if (rng() % 3 == 0) text += "  context = " + vocab[rng() % vocab.size()] + "\n";
    }
    const auto rq = query::parse_research_questions(text, kConfig).at(0);
    const auto r = query::rank_documents(rq, index, tfidf);

    std::vector<oracle::OracleKeyword> keywords;
    for (const auto& k : rq.keywords) {
      oracle::OracleKeyword ok;
      ok.group.push_back(k.term);
      ok.group.insert(ok.group.end(), k.synonyms.begin(), k.synonyms.end());
      ok.context = k.context;
      ok.weight = k.weight;
      keywords.push_back(ok);
    }
    const auto expected = oracle::rank(keywords, expected_tfidf);
    f.expect(r.scores.size() == expected.size(), "score count");
    for (std::size_t i = 0; i < expected.size() && i < r.scores.size(); ++i) {
      f.expect(r.scores[i].doc_id == expected[i].first, "oracle order");
      f.expect(std::abs(r.scores[i].score - expected[i].second) < 1e-12, "oracle score");
    }

    auto scaled = rq;
    for (auto& k : scaled.keywords) k.weight *= 3.0;
    const auto r2 = query::rank_documents(scaled, index, tfidf);
    auto ungated = rq;
    for (auto& k : ungated.keywords) k.context.clear();
    const auto r3 = query::rank_documents(ungated, index, tfidf);
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
      f.expect(r2.scores[i].doc_id == r.scores[i].doc_id, "scaling keeps order");
      const auto* open = r3.find(r.scores[i].doc_id);
      for (std::size_t c = 0; c < r.scores[i].contributions.size(); ++c) {
        const double gated = r.scores[i].contributions[c].contribution;
        const double plain = open->contributions[c].contribution;
        f.expect(gated == plain || gated == 0.0, "gating only zeroes");
      }
    }
  }
}

void duplicates(Failures& f) {
  const auto titles = fixtures::duplicate_titles();
  f.expect(titles.size() == 20, "20 documents");
  const auto report = corpus::detect_duplicates(fixtures::documents_from_titles(titles));
  const std::set<std::set<std::string>> planted{
      {"d01", "d02"}, {"d03", "d04"}, {"d05", "d06"}, {"d07", "d08"}, {"d09", "d10"}};
  std::set<std::set<std::string>> got;
  for (const auto& g : report.groups) got.insert(std::set<std::string>(g.members.begin(), g.members.end()));
  f.expect(report.groups.size() == 5, "5 groups");
  f.expect(got == planted, "no false groups");
}

void acronyms(Failures& f) {
  const std::string raw = "Systematic Review Automation (SRA) is growing. SRA helps reviewers.";
  const auto [table, expanded] =
      textproc::detect_and_expand_acronyms(raw, textproc::normalize_and_tokenize(raw, kConfig), kConfig, "d");
  f.expect(table.entries.size() == 1 && table.entries.count("sra") &&
               table.entries.at("sra").long_form_tokens ==
                   std::vector<std::string>{"systematic", "review", "automation"},
           "SRA table");
  f.expect(std::count(expanded.begin(), expanded.end(), "sra") == 0, "SRA expanded");

  const auto kg = textproc::find_acronym_definitions("We use KG (knowledge graph) exports.");
  f.expect(kg.size() == 1 && kg[0].acronym == "KG" && kg[0].long_form == "knowledge graph", "acronym first");

  const std::string many =
      "Systematic Review Automation (SRA) and Machine Learning (ML) meet. A Knowledge Graph (KG) stores "
      "Natural Language Processing (NLP) output. Later, Key Generation (KG) means something else.";
  const auto [t4, e4] =
      textproc::detect_and_expand_acronyms(many, textproc::normalize_and_tokenize(many, kConfig), kConfig, "d");
  f.expect(t4.entries.size() == 4, "four entries");
  f.expect(t4.warnings.size() == 1, "ambiguous KG warned");

  f.expect(textproc::find_acronym_definitions("banana (SRA)").empty(), "initials rejected");
  f.expect(!textproc::match_long_form("SRA", "banana"), "long form rejected");
  f.expect(textproc::find_acronym_definitions("Quick Brown (XYZ) fox").empty(), "mismatched initials rejected");
}

void screening(Failures& f) {
  const auto criteria = screen::parse_criteria(R"j([
    {"id": "I1", "kind": "include", "field": "relevance(RQ1)", "op": ">=", "value": 0.3, "rationale": "r"},
    {"id": "E1", "kind": "exclude", "field": "year", "op": "<", "value": 2010, "rationale": "r"},
    {"id": "I2", "kind": "include", "field": "keyword", "op": "contains", "value": "knowledge graphs", "rationale": "r"}
  ])j");
  std::mt19937 rng(31);
  for (int round = 0; round < 50; ++round) {
    std::vector<Document> corpus;
    query::Ranking ranking;
    ranking.rq_id = "RQ1";
    std::map<std::string, double> scores;
    for (int i = 0; i < 12; ++i) {
      Metadata m;
      m.id = "d" + std::to_string(i);
      m.title = m.id;
      if (rng() % 5) m.year = 2000 + static_cast<int>(rng() % 25);
      if (rng() % 2) m.keywords.push_back(rng() % 2 ? "Knowledge Graph" : "screening");
      if (rng() % 4) {
        scores[m.id] = static_cast<double>(rng() % 100) / 100.0;
        ranking.scores.push_back({"RQ1", m.id, scores[m.id], 0, {}});
      }
      corpus.emplace_back(m);
    }
    const auto records = screen::apply_criteria(corpus, criteria, {{"RQ1", ranking}}, kConfig);
    std::map<std::string, screen::DecisionRecord> by_id;
    for (const auto& r : records) by_id[r.doc_id] = r;
    for (const auto& d : corpus) {
      const bool e1 = d.meta.year && *d.meta.year < 2010;
      const bool i1 = scores.count(d.id()) && scores.at(d.id()) >= 0.3;
      const bool i2 = !d.meta.keywords.empty() && d.meta.keywords[0] == "Knowledge Graph";
      const auto expected = e1 ? screen::Decision::excluded
                               : (i1 || i2) ? screen::Decision::included
                                            : screen::Decision::deferred;
      f.expect(by_id.count(d.id()) && by_id.at(d.id()).decision == expected, "truth table " + d.id());
    }
  }

  const std::vector<std::string> ids{"a", "b", "c", "d"};
  for (int round = 0; round < 100; ++round) {
    std::vector<screen::DecisionRecord> history;
    for (int i = 0; i < 20; ++i) {
      screen::DecisionRecord r;
      r.doc_id = ids[rng() % ids.size()];
      r.decision = static_cast<screen::Decision>(rng() % 3);
      r.source = rng() % 2 ? "manual" : "I1";
      r.actor = "x";
      r.timestamp = "2024-01-01T00:00:" + std::string(i < 10 ? "0" : "") + std::to_string(i) + "Z";
      history.push_back(r);
    }
    const screen::DecisionLog log(screen::parse_decisions_jsonl(screen::decisions_jsonl(history)));
    std::map<std::string, screen::DecisionRecord> last, last_manual;
    for (const auto& r : history) {
      last[r.doc_id] = r;
      if (r.source == "manual") last_manual[r.doc_id] = r;
    }
    for (const auto& id : ids) {
      const auto eff = log.effective(id);
      if (!last.count(id)) {
        f.expect(!eff, "replay absent");
        continue;
      }
      f.expect(eff && *eff == (last_manual.count(id) ? last_manual.at(id) : last.at(id)), "replay " + id);
    }
  }

  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = project::load_config(root);
  for (const auto stage : project::all_stages()) project::run_stage(stage, config);
  const auto log = project::load_decision_log(config);
  std::vector<std::string> excluded;
  for (const auto& d : project::ingest(config).docs) {
    const auto e = log.effective(d.id());
    if (e && e->decision == screen::Decision::excluded) excluded.push_back(d.id());
  }
  f.expect(!excluded.empty(), "fixture has an excluded document");
  const auto synth = *project::latest_run(root, project::Stage::synthesize);
  const auto report = *project::latest_run(root, project::Stage::report);
  std::vector<fs::path> exports{report / "graph.json", report / "report.md", synth / "kg.tsv", synth / "kg.json"};
  for (const auto& e : fs::recursive_directory_iterator(report / "vault")) exports.push_back(e.path());
  for (const auto& e : fs::recursive_directory_iterator(synth / "comparisons")) exports.push_back(e.path());
  for (const auto& id : excluded) {
    for (const auto& p : exports) {
      f.expect(read_file(p).find(id) == std::string::npos, id + " in " + p.filename().string());
    }
  }
}

void export_determinism(Failures& f) {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = project::load_config(root);
  for (const auto stage : project::all_stages()) project::run_stage(stage, config);
  std::map<std::string, std::map<std::string, std::string>> first;
  const std::vector<project::Stage> rerun{project::Stage::select, project::Stage::evaluate, project::Stage::analyze,
                                          project::Stage::synthesize, project::Stage::report};
  for (const auto stage : rerun) first[project::to_string(stage)] = stage_files(*project::latest_run(root, stage));
  for (const auto stage : rerun) project::run_stage(stage, config);
  for (const auto stage : rerun) {
    f.expect(stage_files(*project::latest_run(root, stage)) == first[project::to_string(stage)],
             project::to_string(stage) + " artifacts identical");
  }

  const auto report = *project::latest_run(root, project::Stage::report);
  const auto docs = project::ingest(config).docs;
  const auto log = project::load_decision_log(config);
  const auto rankings = project::rank_all(project::load_rqs(config), project::load_select(config), config.alpha);
  int notes = 0;
  for (const auto& d : docs) {
    const auto path = report / "vault" / (d.id() + ".md");
    if (!fs::exists(path)) continue;
    ++notes;
    const auto e = log.effective(d.id());
    emit::FrontMatter expected{d.id(), d.meta.title, d.meta.authors, d.meta.year, d.meta.venue, d.meta.doi,
                               e ? screen::to_string(e->decision) : std::string("deferred"), {}};
    for (const auto& r : rankings) {
      const auto* s = r.find(d.id());
      expected.scores[r.rq_id] = emit::round4(s ? s->score : 0.0);
    }
    f.expect(emit::parse_front_matter(read_file(path)) == expected, "front matter " + d.id());
  }
  f.expect(notes > 0, "vault notes present");
  f.expect(read_file(report / "report.md") == read_file(testing::golden("report_fixture.md")), "report golden");

  const auto table = screen::build_comparison(fixtures::recsys_annotations(), fixtures::recsys_properties(),
                                              fixtures::recsys_contributions());
  f.expect(emit::comparison_markdown(table) == read_file(testing::golden("comparison_recsys.md")),
           "comparison golden");
}

kg::Statement literal(std::string s, std::string p, std::string v, kg::Datatype d = kg::Datatype::string) {
  return {std::move(s), std::move(p), {false, std::move(v), d}};
}

kg::Statement paper(std::string s) {
  return {std::move(s), std::string(kg::kTypePredicate), {true, std::string(kg::kPaperClass), kg::Datatype::string}};
}

void shapes(Failures& f) {
  const std::vector<kg::Statement> planted{
      paper("ok"),       literal("ok", "title", "T"),      literal("ok", "year", "2020", kg::Datatype::year),
      paper("untitled"), paper("twice"),                   literal("twice", "title", "A"),
      literal("twice", "title", "B"),                      paper("badyear"),
      literal("badyear", "title", "T"),                    literal("badyear", "year", "soon")};
  const auto v = kg::validate_shapes(planted, kg::default_shapes());
  std::set<std::tuple<std::string, std::string, std::string>> got;
  for (const auto& x : v) got.insert({x.subject, x.path, x.kind});
  f.expect(v.size() == 3, "exactly 3 violations");
  f.expect(got == std::set<std::tuple<std::string, std::string, std::string>>{{"untitled", "title", "missing-required"},
                                                                             {"twice", "title", "cardinality"},
                                                                             {"badyear", "year", "datatype"}},
           "planted violations");

  std::vector<Metadata> meta;
  int year = 2019;
  for (const auto& id : fixtures::recsys_contributions()) {
    Metadata m;
    m.id = id;
    m.title = "Paper " + id;
    m.year = year++;
    m.authors = {"A. Author"};
    meta.push_back(m);
  }
  const auto table = screen::build_comparison(fixtures::recsys_annotations(), fixtures::recsys_properties(),
                                              fixtures::recsys_contributions());
  f.expect(kg::validate_shapes(kg::emit_kg(table, meta), kg::default_shapes()).empty(), "valid kg conforms");
}

void likert(Failures& f) {
  std::mt19937 rng(81);
  for (int round = 0; round < 200; ++round) {
    std::vector<double> v(1 + rng() % 30);
    for (auto& x : v) x = 1 + static_cast<double>(rng() % 9);
    const auto got = assess::box_stats(v);
    const auto expected = oracle::box(v);
    f.expect(got.q1 == expected.q1 && got.median == expected.median && got.q3 == expected.q3, "quartiles");
    f.expect(got.whisker_low == expected.low && got.whisker_high == expected.high, "whiskers");
    f.expect(got.outliers == expected.outliers, "outliers");

    std::vector<assess::LikertResponse> responses;
    for (double x : v) {
      assess::LikertResponse r;
      r.respondent = "r";
      r.tool = "t";
      r.answers.fill(assess::kNoAnswer);
      r.answers[4] = static_cast<int>(x);
      responses.push_back(r);
    }
    const auto base = assess::aggregate_likert(responses, 5);
    auto padded = responses;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 5); ++i) {
      assess::LikertResponse r;
      r.respondent = "a10";
      r.tool = "t";
      r.answers.fill(assess::kNoAnswer);
      padded.insert(padded.begin() + static_cast<long>(rng() % (padded.size() + 1)), r);
    }
    const auto with_a10 = assess::aggregate_likert(padded, 5);
    f.expect(with_a10.n == base.n && with_a10.q1 == base.q1 && with_a10.median == base.median &&
                 with_a10.q3 == base.q3 && with_a10.whisker_low == base.whisker_low &&
                 with_a10.whisker_high == base.whisker_high && with_a10.outliers == base.outliers,
             "A10 answers change nothing");
  }
}

void end_to_end(Failures& f) {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const std::string cli = SLRKIT_CLI_PATH;
  f.expect(!cli.empty(), "cli built");
  if (cli.empty()) return;
  const std::string cmd = "\"" + cli + "\" --project \"" + root.string() + "\" --stage all > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  f.expect(rc == 0, "exit code " + std::to_string(rc));
  for (const auto stage : project::all_stages()) {
    f.expect(project::latest_run(root, stage).has_value(), project::to_string(stage) + " run present");
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"catalog fidelity", 1.0, catalog},
      {"tf-idf oracle equivalence", 1.0, tfidf},
      {"similarity properties", 1.0, similarity},
      {"embedding checks", 10.0, embeddings},
      {"ranking oracle", 1.0, ranking},
      {"duplicate detection", 1.0, duplicates},
      {"acronym extraction", 1.0, acronyms},
      {"screening soundness", 5.0, screening},
      {"export determinism and round-trip", 10.0, export_determinism},
      {"shape validation", 1.0, shapes},
      {"likert aggregation", 5.0, likert},
      {"end-to-end", 30.0, end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Failures f;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(f);
    } catch (const std::exception& e) {
      f.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.limit_seconds;
    const bool ok = f.count() == 0 && in_time;
    if (!ok) ++failed;
    std::printf("%s  %-36s %8.3f s  (limit %.0f s)", ok ? "PASS" : "FAIL", c.name.c_str(), seconds, c.limit_seconds);
    if (f.count() > 0) std::printf("  %d failed checks", f.count());
    if (!in_time) std::printf("  over time limit");
    std::printf("\n");
    for (const auto& m : f.messages()) std::printf("      %s\n", m.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
