#include "slrkit/errors.hpp"
#include "slrkit/textproc.hpp"
#include "slrkit/util.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace slrkit;
using namespace slrkit::textproc;

namespace {

PipelineConfig with_stopwords(std::set<std::string> stop) {
  PipelineConfig c;
  c.stopwords = std::move(stop);
  return c;
}

}  // namespace

TEST_CASE("tokenization examples") {
  const PipelineConfig config;
  CHECK(normalize_and_tokenize("Tf\xe2\x80\x93Idf, e.g. \xe2\x80\x98ranking\xe2\x80\x99!", config) ==
        std::vector<std::string>{"tf", "idf", "ranking"});
  CHECK(normalize_and_tokenize("", config).empty());
  CHECK(normalize_and_tokenize("2023 1,200 x9", config) == std::vector<std::string>{"x9"});
}

TEST_CASE("57-word paragraph matches the hand tokenization") {
  const auto raw = read_file(testing::fixture("text/paragraph.txt"));
  const std::vector<std::string> expected{
      "systematic", "reviews", "srs", "summarise", "evidence", "in", "teams", "used", "semi-automated",
      "tools", "each", "tool", "ranks", "abstracts", "by", "tf-idf", "weights", "flags", "near-duplicate",
      "records", "and", "exports", "knowledge_graph", "reviewers", "read", "every", "included", "paper",
      "automation", "assists", "it", "does", "not", "decide", "caf\xc3\xa9", "in", "z\xc3\xbcrich", "hosted",
      "the", "first", "workshop", "where", "groups", "compared", "screening", "workloads", "across",
      "projects", "and", "disciplines"};
  CHECK(normalize_and_tokenize(raw, PipelineConfig{}) == expected);
}

TEST_CASE("tokenization is idempotent") {
  const PipelineConfig config;
  std::mt19937 rng(3);
  const std::vector<std::string> pieces{"Word", "caf\xc3\xa9", "tf-idf", "a_b", "42", "x", "\xef\xac\x81nd", ",", ".",
                                        "(SRA)", "\xe2\x80\x94", "R2D2", "--", "__"};
  for (int round = 0; round < 300; ++round) {
    std::string raw;
    for (int i = 0; i < 12; ++i) raw += pieces[rng() % pieces.size()] + (rng() % 3 ? " " : "");
    const auto once = normalize_and_tokenize(raw, config);
    CHECK(normalize_and_tokenize(join(once, " "), config) == once);
  }
}

TEST_CASE("acronym definitions") {
  const PipelineConfig config;
  SUBCASE("long form first") {
    const std::string raw = "Systematic Review Automation (SRA) is growing. SRA helps reviewers.";
    const auto tokens = normalize_and_tokenize(raw, config);
    const auto [table, expanded] = detect_and_expand_acronyms(raw, tokens, config, "d");
    REQUIRE(table.entries.size() == 1);
    CHECK(table.entries.at("sra").long_form_tokens == std::vector<std::string>{"systematic", "review", "automation"});
    CHECK(std::count(expanded.begin(), expanded.end(), "sra") == 0);
    CHECK(std::count(expanded.begin(), expanded.end(), "automation") == 3);
  }
  SUBCASE("acronym first") {
    const auto defs = find_acronym_definitions("We use KG (knowledge graph) exports.");
    REQUIRE(defs.size() == 1);
    CHECK(defs[0].acronym == "KG");
    CHECK(defs[0].long_form == "knowledge graph");
  }
  SUBCASE("initials must match") {
    CHECK(find_acronym_definitions("banana (SRA)").empty());
    CHECK_FALSE(match_long_form("SRA", "banana"));
  }
  SUBCASE("four definitions, one ambiguous") {
    const std::string raw =
        "Systematic Review Automation (SRA) and Machine Learning (ML) meet. A Knowledge Graph (KG) stores "
        "Natural Language Processing (NLP) output. Later, Key Generation (KG) means something else.";
    const auto tokens = normalize_and_tokenize(raw, config);
    const auto [table, expanded] = detect_and_expand_acronyms(raw, tokens, config, "d");
    CHECK(table.entries.size() == 4);
    REQUIRE(table.warnings.size() == 1);
    CHECK(table.warnings[0].find("kg") != std::string::npos);
    CHECK(table.entries.at("kg").long_form_tokens == std::vector<std::string>{"knowledge", "graph"});
  }
}

TEST_CASE("acronym expansion only substitutes acronym tokens") {
  const PipelineConfig config;
  AcronymTable table;
  table.add(find_acronym_definitions("Systematic Review Automation (SRA), Machine Learning (ML)"), "d", config);
  std::mt19937 rng(9);
  const std::vector<std::string> vocab{"sra", "ml", "review", "screen", "data"};
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> tokens;
    for (int i = 0; i < 10; ++i) tokens.push_back(vocab[rng() % vocab.size()]);
    const auto out = expand_acronyms(tokens, table);
    std::size_t expected = 0;
    for (const auto& t : tokens) expected += t == "sra" ? 3 : t == "ml" ? 2 : 1;
    CHECK(out.size() == expected);
  }
}

TEST_CASE("multiword pmi") {
  PipelineConfig config = with_stopwords({});
  std::vector<std::vector<std::string>> corpus;
  int filler = 0;
  for (int d = 0; d < 5; ++d) {
    std::vector<std::string> doc{"machine", "learning"};
    for (int i = 0; i < 19; ++i) doc.push_back("w" + std::to_string(filler++));
    corpus.push_back(doc);
  }
  // n(ab) = n(a) = n(b) = 5, W = 5 * 20 = 100, pmi = ln 20.
  config.multiword_pmi_threshold = 2.9;
  auto lex = detect_multiwords(corpus, config);
  REQUIRE(lex.entries.size() == 1);
  const auto& e = lex.entries.at({"machine", "learning"});
  CHECK(e.count == 5);
  CHECK(e.pmi == doctest::Approx(std::log(20.0)).epsilon(1e-12));
  CHECK(apply_multiwords(corpus[0], lex).front() == "machine_learning");
  config.multiword_pmi_threshold = 3.0;
  CHECK(detect_multiwords(corpus, config).entries.empty());
}

TEST_CASE("multiword gates") {
  PipelineConfig config = with_stopwords({"of"});
  config.multiword_pmi_threshold = 0.0;
  CHECK(detect_multiwords({{"rare", "pair", "x", "y"}}, config).entries.empty());
  CHECK(detect_multiwords({}, config).entries.empty());
  CHECK(detect_multiwords({{"one"}}, config).entries.empty());
  config.multiword_min_count = 1;
  const auto lex = detect_multiwords({{"review", "of", "review"}}, config);
  CHECK(lex.entries.empty());
}

TEST_CASE("multiword rewrite is left to right and non-overlapping") {
  MultiwordLexicon lex;
  lex.entries[{"a", "b"}] = {3, 4.0};
  lex.entries[{"b", "c"}] = {3, 4.0};
  CHECK(apply_multiwords({"a", "b", "c", "b", "c"}, lex) == std::vector<std::string>{"a_b", "c", "b_c"});
}

TEST_CASE("stemming examples") {
  CHECK(stem("reviews") == "review");
  CHECK(stem("running") == "run");
  CHECK(stem("is") == "is");
  CHECK(stem("knowledge_graphs") == "knowledg_graph");
}

TEST_CASE("stem list matches the reference stemmer") {
  const std::vector<std::pair<std::string, std::string>> expected{
      {"reviews", "review"},
      {"running", "run"},
      {"caresses", "caress"},
      {"ponies", "poni"},
      {"ties", "ti"},
      {"caress", "caress"},
      {"cats", "cat"},
      {"feed", "feed"},
      {"agreed", "agr"},
      {"plastered", "plaster"},
      {"bled", "bled"},
      {"motoring", "motor"},
      {"sing", "sing"},
      {"conflated", "conflat"},
      {"troubled", "troubl"},
      {"sized", "size"},
      {"hopping", "hop"},
      {"tanned", "tan"},
      {"falling", "fall"},
      {"hissing", "hiss"},
      {"fizzed", "fizz"},
      {"failing", "fail"},
      {"filing", "file"},
      {"happy", "happi"},
      {"sky", "sky"},
      {"relational", "relat"},
      {"conditional", "condit"},
      {"rational", "ration"},
      {"valenci", "valenc"},
      {"hesitanci", "hesit"},
      {"digitizer", "digit"},
      {"conformabli", "conform"},
      {"radicalli", "radic"},
      {"differentli", "differ"},
      {"vileli", "vile"},
      {"analogousli", "analog"},
      {"vietnamization", "vietnam"},
      {"predication", "predic"},
      {"operator", "oper"},
      {"feudalism", "feudal"},
      {"decisiveness", "deci"},
      {"hopefulness", "hope"},
      {"callousness", "callou"},
      {"formaliti", "formal"},
      {"sensitiviti", "sensit"},
      {"sensibiliti", "sensibl"},
      {"triplicate", "triplic"},
      {"formative", "form"},
      {"formalize", "formal"},
      {"electriciti", "electr"},
      {"electrical", "electr"},
      {"hopeful", "hope"},
      {"goodness", "good"},
      {"revival", "reviv"},
      {"allowance", "allow"},
      {"inference", "infer"},
      {"airliner", "airlin"},
      {"gyroscopic", "gyroscop"},
      {"adjustable", "adjust"},
      {"defensible", "defen"},
      {"irritant", "irrit"},
      {"replacement", "replac"},
      {"adjustment", "adjust"},
      {"dependent", "depend"},
      {"adoption", "adopt"},
      {"homologou", "homolog"},
      {"communism", "commun"},
      {"activate", "activ"},
      {"angulariti", "angular"},
      {"homologous", "homolog"},
      {"effective", "effect"},
      {"bowdlerize", "bowdler"},
      {"probate", "probat"},
      {"rate", "rate"},
      {"cease", "cea"},
      {"controll", "control"},
      {"roll", "roll"},
      {"screening", "screen"},
      {"systematic", "systemat"},
      {"literature", "literatur"},
      {"automation", "autom"},
      {"embedding", "emb"},
      {"knowledge", "knowledg"},
  };
  REQUIRE(expected.size() >= 50);
  for (const auto& [word, s] : expected) {
    CAPTURE(word);
    CHECK(stem(word) == s);
  }
}

TEST_CASE("stemming is idempotent") {
  std::mt19937 rng(21);
  const std::string letters = "abcdeilnorstuyz";
  for (int round = 0; round < 5000; ++round) {
    std::string w;
    const int n = 3 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) w += letters[rng() % letters.size()];
    CAPTURE(w);
    const auto once = stem(w);
    CHECK(stem(once) == once);
  }
}

TEST_CASE("malformed rule tables are rejected") {
  CHECK_THROWS_AS(Stemmer("1a s"), IntegrityError);
  CHECK_THROWS_AS(Stemmer("STEPS 1a\n1a s - m>x\n"), IntegrityError);
}

TEST_CASE("bag of words") {
  const auto config = with_stopwords({"the", "of"});
  Document doc(Metadata{}, std::string("The review of reviews"));
  doc.meta.id = "d";
  const auto bag = build_bow(doc, config, {}, {});
  CHECK(bag.counts == std::map<std::string, long>{{"review", 2}});
  CHECK(bag.total_tokens == 2);

  Document stop(Metadata{}, std::string("the of THE"));
  CHECK(build_bow(stop, config, {}, {}).total_tokens == 0);
  CHECK(build_bow(stop, config, {}, {}).counts.empty());

  Document empty;
  empty.meta.id = "no-text";
  try {
    build_bow(empty, config, {}, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no-text") != std::string::npos);
  }
}

TEST_CASE("three-document pipeline matches the hand execution") {
  auto config = with_stopwords({"the"});
  config.multiword_min_count = 2;
  config.multiword_pmi_threshold = 1.0;
  std::vector<Document> docs{Document(Metadata{}, std::string("Active learning (AL) ranks papers. AL reduces effort.")),
                             Document(Metadata{}, std::string("Active learning helps the reviewers.")),
                             Document(Metadata{}, std::string("Reviewers screen papers quickly."))};
  docs[0].meta.id = "d1";
  docs[1].meta.id = "d2";
  docs[2].meta.id = "d3";
  // tokens: d1 "active learning active learning ranks papers active learning reduces effort",
  // d2 "active learning helps the reviewers", d3 "reviewers screen papers quickly".
  // W = 9 + 4 + 3 = 16; (active, learning): n = 4, n(a) = n(b) = 4, pmi = ln 4 >= 1.
  // (learning, active): n = 2, pmi = ln 2 < 1.
  const auto lex = build_lexicons(docs, config);
  REQUIRE(lex.acronyms.entries.size() == 1);
  REQUIRE(lex.multiwords.entries.size() == 1);
  CHECK(lex.multiwords.entries.at({"active", "learning"}).count == 4);
  CHECK(lex.multiwords.entries.at({"active", "learning"}).pmi == doctest::Approx(std::log(4.0)));
  attach_bags(docs, config, lex);
  CHECK(docs[0].bow()->counts ==
        std::map<std::string, long>{{"activ_learn", 3}, {"rank", 1}, {"paper", 1}, {"reduc", 1}, {"effort", 1}});
  CHECK(docs[1].bow()->counts == std::map<std::string, long>{{"activ_learn", 1}, {"help", 1}, {"review", 1}});
  CHECK(docs[2].bow()->counts ==
        std::map<std::string, long>{{"review", 1}, {"screen", 1}, {"paper", 1}, {"quickli", 1}});
  CHECK(docs[0].bow()->total_tokens == 7);
}

TEST_CASE("stopword removal only removes tokens") {
  std::mt19937 rng(4);
  const std::vector<std::string> vocab{"the", "review", "of", "screening", "and", "graph", "a", "data"};
  const auto config = PipelineConfig{};
  for (int round = 0; round < 200; ++round) {
    std::string raw;
    for (int i = 0; i < 15; ++i) raw += vocab[rng() % vocab.size()] + " ";
    auto keep = config;
    keep.remove_stopwords = false;
    const auto with = process_text(raw, config, {}, {});
    const auto without = process_text(raw, keep, {}, {});
    std::map<std::string, long> a, b;
    for (const auto& t : with) a[t]++;
    for (const auto& t : without) b[t]++;
    for (const auto& [t, c] : a) CHECK(c <= b[t]);
  }
}

TEST_CASE("pipeline is deterministic") {
  const auto raw = read_file(testing::fixture("text/paragraph.txt"));
  std::vector<Document> a, b;
  for (int i = 0; i < 8; ++i) {
    a.emplace_back(Metadata{}, raw + " " + std::to_string(i));
    a.back().meta.id = "p" + std::to_string(i);
  }
  b = a;
  const PipelineConfig config;
  attach_bags(a, config, build_lexicons(a, config));
  attach_bags(b, config, build_lexicons(b, config));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].bow() == *b[i].bow());
}

TEST_CASE("keyword phrases normalize like text") {
  const PipelineConfig config;
  CHECK(normalize_term("Systematic Reviews", config) == "systemat_review");
  CHECK(normalize_term("the", config).empty());
  CHECK(normalize_term("Screening", config) == stem("screening"));
}

TEST_CASE("pipeline config validation") {
  PipelineConfig c;
  c.multiword_pmi_threshold = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.stopwords.insert("The");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_stopwords("# c\nthe\n\n of \n") == std::set<std::string>{"the", "of"});
}
