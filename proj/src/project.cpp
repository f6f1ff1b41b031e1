#include "slrkit/project.hpp"

#include "slrkit/assess.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/shapes.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <sstream>
#include <unistd.h>

namespace slrkit::project {

using nlohmann::json;

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d{
      {"bibliography", ""},
      {"corpus_dir", "texts"},
      {"rq_file", ""},
      {"criteria_file", ""},
      {"synonyms_file", ""},
      {"stopwords_file", ""},
      {"annotations_dir", ""},
      {"claims_file", ""},
      {"resolutions_file", ""},
      {"shapes_file", ""},
      {"likert_file", ""},
      {"seed", "0"},
      {"seed_docs", ""},
      {"pipeline.min_token_len", "2"},
      {"pipeline.multiword_pmi_threshold", "3.0"},
      {"pipeline.multiword_min_count", "3"},
      {"pipeline.expand_acronyms", "true"},
      {"pipeline.join_multiwords", "true"},
      {"pipeline.stem", "true"},
      {"pipeline.remove_stopwords", "true"},
      {"embedding.k", "50"},
      {"embedding.window", "5"},
      {"embedding.oversampling", "10"},
      {"embedding.power_iterations", "4"},
      {"ranking.alpha", "0"},
      {"duplicates.threshold", "0.9"},
      {"synonyms.min_cosine", "0.7"},
      {"suggest.top_n", "20"},
      {"export.top_k", "5"},
      {"export.sim_threshold", "0.1"},
      {"export.edge_threshold", "0.2"},
  };
  return d;
}

struct Reader {
  const std::map<std::string, std::string>& values;
  std::vector<std::string> errors;

  const std::string& raw(const std::string& key) const { return values.at(key); }

  double real(const std::string& key) {
    try {
      std::size_t used = 0;
      const double v = std::stod(raw(key), &used);
      if (used == raw(key).size()) return v;
    } catch (const std::exception&) {
    }
    errors.push_back(key + ": '" + raw(key) + "' is not a number");
    return 0.0;
  }

  long integer(const std::string& key) {
    try {
      std::size_t used = 0;
      const long v = std::stol(raw(key), &used);
      if (used == raw(key).size()) return v;
    } catch (const std::exception&) {
    }
    errors.push_back(key + ": '" + raw(key) + "' is not an integer");
    return 0;
  }

  bool boolean(const std::string& key) {
    const std::string v = ascii_lower(raw(key));
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    errors.push_back(key + ": '" + raw(key) + "' is not a boolean");
    return false;
  }
};

std::string run_name(int id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", id);
  return buf;
}

std::optional<int> run_number(const std::string& name) {
  if (name.size() != 4 || !std::all_of(name.begin(), name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  return std::stoi(name);
}

std::string rel_path(const fs::path& root, const fs::path& p) {
  return fs::relative(p, root).generic_string();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error& e) {
    throw IntegrityError(p.string() + ": " + e.what(), {p.string()});
  }
}

fs::path require_run(const ProjectConfig& config, Stage stage, const std::string& artifact) {
  const auto run = latest_run(config.root, stage);
  if (!run) throw PrerequisiteError(artifact, to_string(stage));
  return *run;
}

/// Collects emitted artifacts for the manifest.
class StageContext {
 public:
  StageContext(const ProjectConfig& config, fs::path dir, RunManifest& manifest)
      : config(config), dir(std::move(dir)), manifest(manifest) {}

  void emit(const std::string& rel, const std::string& contents) {
    write_file(dir / rel, contents);
    manifest.files.push_back({rel, sha256_hex(contents), contents.size()});
  }
  void emit_json(const std::string& rel, const json& j) { emit(rel, dump(j)); }
  void warn(std::string w) { manifest.warnings.push_back(std::move(w)); }
  void upstream(Stage s, const fs::path& run) {
    manifest.upstream[to_string(s)] = run_number(run.filename().string()).value_or(0);
  }

  const ProjectConfig& config;
  fs::path dir;
  RunManifest& manifest;
};

// ---------------------------------------------------------------------------
// shared computations

struct Processed {
  CorpusState corpus;
  textproc::CorpusLexicons lexicons;
  std::vector<std::vector<std::string>> tokens;  // parallel to corpus.docs
};

Processed process(const ProjectConfig& config) {
  Processed p;
  p.corpus = ingest(config);
  p.lexicons = textproc::build_lexicons(p.corpus.docs, config.pipeline);
  p.tokens = textproc::attach_bags(p.corpus.docs, config.pipeline, p.lexicons);
  return p;
}

vectorize::Bags bags_of(const std::vector<Document>& docs) {
  vectorize::Bags bags;
  for (const auto& d : docs) {
    if (d.bow()) bags.emplace(d.id(), *d.bow());
  }
  return bags;
}

std::vector<vectorize::SynonymSet> synonym_sets(const ProjectConfig& config) {
  if (!config.synonyms_file) return {};
  auto sets = vectorize::parse_synonym_sets(read_utf8_file(*config.synonyms_file));
  for (auto& s : sets) {
    s.canonical = textproc::normalize_term(s.canonical, config.pipeline);
    for (auto& m : s.members) m = textproc::normalize_term(m, config.pipeline);
    s.members.erase(std::remove(s.members.begin(), s.members.end(), std::string()), s.members.end());
  }
  return sets;
}

/// tf-idf over documents with text; documents without text get zero vectors.
std::pair<vectorize::TermIndex, vectorize::TfidfResult> tfidf_of(const ProjectConfig& config,
                                                                 const std::vector<Document>& docs) {
  const auto bags = bags_of(docs);
  if (bags.empty()) throw IntegrityError("no document has text; nothing to vectorize", {});
  auto index = vectorize::build_index(bags, synonym_sets(config));
  auto result = vectorize::tfidf_vectors(index, bags);
  for (const auto& d : docs) {
    if (!result.vectors.count(d.id())) {
      result.vectors.emplace(d.id(), DocVector{});
      result.empty_docs.push_back(d.id());
    }
  }
  std::sort(result.empty_docs.begin(), result.empty_docs.end());
  return {std::move(index), std::move(result)};
}

json doc_vectors_json(const std::map<std::string, DocVector>& vectors) {
  json j = json::object();
  for (const auto& [id, v] : vectors) j[id] = v;
  return j;
}

std::map<std::string, DocVector> doc_vectors_from(const json& j) {
  std::map<std::string, DocVector> out;
  for (const auto& [id, v] : j.items()) out.emplace(id, v.get<DocVector>());
  return out;
}

std::vector<query::Ranking> load_rankings(const fs::path& select_run) {
  std::vector<query::Ranking> out;
  const auto dir = select_run / "rankings";
  if (!fs::exists(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(query::ranking_from_json(read_json(f)));
  return out;
}

std::map<std::string, query::Ranking> by_rq(const std::vector<query::Ranking>& rankings) {
  std::map<std::string, query::Ranking> out;
  for (const auto& r : rankings) out.emplace(r.rq_id, r);
  return out;
}

std::vector<std::string> ids_of(const std::vector<Document>& docs) {
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.id());
  return ids;
}

std::vector<screen::Annotation> merged_annotations(const ProjectConfig& config) {
  const auto run = require_run(config, Stage::analyze, "annotations_merged.json");
  return screen::parse_annotations(read_file(run / "annotations_merged.json"));
}

struct Synthesis {
  std::map<std::string, screen::ComparisonTable> comparisons;
  std::vector<screen::Conflict> conflicts;
  std::vector<screen::Claim> claims;
  std::vector<screen::ClaimViolation> claim_violations;
  std::vector<kg::Statement> statements;
  std::vector<kg::ShapeViolation> shape_violations;
  std::vector<screen::Annotation> annotations;
};

Synthesis synthesize_state(const ProjectConfig& config, const std::vector<Document>& docs,
                           const screen::DecisionLog& log) {
  Synthesis s;
  s.annotations = merged_annotations(config);
  const auto keep = emit::exportable_ids(docs, log);
  const std::vector<std::string> contributions(keep.begin(), keep.end());
  std::vector<screen::Resolution> resolutions;
  if (config.resolutions_file) resolutions = screen::parse_resolutions(read_utf8_file(*config.resolutions_file));

  std::vector<Metadata> metadata;
  for (const auto& d : docs) {
    if (keep.count(d.id())) metadata.push_back(d.meta);
  }
  screen::ComparisonTable base;
  base.contributions = contributions;
  s.statements = kg::emit_kg(base, metadata);

  for (const auto& [rq, properties] : config.comparisons) {
    auto table = screen::build_comparison(s.annotations, properties, contributions);
    for (auto& c : screen::detect_conflicts(table, resolutions)) s.conflicts.push_back(std::move(c));
    for (auto& st : kg::emit_kg(table, metadata)) s.statements.push_back(std::move(st));
    s.comparisons.emplace(rq, std::move(table));
  }
  std::sort(s.statements.begin(), s.statements.end());
  s.statements.erase(std::unique(s.statements.begin(), s.statements.end()), s.statements.end());

  const auto shapes =
      config.shapes_file ? kg::parse_shapes(read_utf8_file(*config.shapes_file)) : kg::default_shapes();
  s.shape_violations = kg::validate_shapes(s.statements, shapes);

  std::set<std::string> excluded;
  for (const auto& d : docs) {
    if (!keep.count(d.id())) excluded.insert(d.id());
  }
  if (config.claims_file) s.claims = screen::parse_claims(read_utf8_file(*config.claims_file));
  s.claim_violations = screen::validate_claims(s.claims, s.annotations, s.conflicts, excluded);
  return s;
}

std::optional<corpus::GapReport> load_gaps(const ProjectConfig& config) {
  const auto run = latest_run(config.root, Stage::search);
  if (!run || !fs::exists(*run / "gaps.json")) return std::nullopt;
  const json j = read_json(*run / "gaps.json");
  corpus::GapReport g;
  for (const auto& e : j.at("keyword_gaps")) {
    g.keyword_gaps.emplace_back(e.at("rq_id").get<std::string>(), e.at("keywords").get<std::vector<std::string>>());
  }
  for (const auto& e : j.at("missing_metadata")) {
    g.missing_metadata.emplace_back(e.at("doc_id").get<std::string>(), e.at("missing").get<std::vector<std::string>>());
  }
  return g;
}

// ---------------------------------------------------------------------------
// stages

constexpr std::string_view kRqTemplate = R"tpl(# Research questions. One [ID] section per question.
# Keyword blocks: weight defaults to 1; synonyms and context are comma separated.

[RQ1]
text = Which methods are used to automate systematic literature reviews?
scope = Peer-reviewed work on review automation tools
perspective = Researchers conducting reviews
keyword = systematic review
  weight = 2
  synonyms = literature review, SLR
keyword = automation
  weight = 1
  synonyms = automated, automatic
)tpl";

constexpr std::string_view kCriteriaTemplate = R"tpl([
  {"id": "old", "kind": "exclude", "field": "year", "op": "<", "value": 2010,
   "rationale": "Predates current tooling"},
  {"id": "relevant", "kind": "include", "field": "relevance(RQ1)", "op": ">=", "value": 0.05,
   "rationale": "Matches the first research question"}
]
)tpl";

constexpr std::string_view kConfigTemplate = R"tpl(# slrkit project configuration
bibliography = references.bib
corpus_dir = texts
rq_file = rqs.txt
criteria_file = criteria.json
seed = 42
)tpl";

void stage_plan(StageContext& ctx) {
  const auto& config = ctx.config;
  ctx.emit("templates/rqs.txt", std::string(kRqTemplate));
  ctx.emit("templates/criteria.json", std::string(kCriteriaTemplate));
  ctx.emit("templates/slrkit.conf", std::string(kConfigTemplate));
  if (config.seed_docs.empty()) return;
  if (config.bibliographies.empty()) throw ConfigError("seed_docs needs a bibliography");
  auto p = process(config);
  const auto [index, tfidf] = tfidf_of(config, p.corpus.docs);
  json out = json::array();
  for (const auto& s : query::suggest_keywords(config.seed_docs, tfidf.vectors, config.suggest_top_n)) {
    out.push_back({{"term", s.term}, {"weight", s.weight}});
  }
  ctx.emit_json("keyword_suggestions.json", {{"seeds", config.seed_docs}, {"suggestions", out}});
}

void stage_search(StageContext& ctx) {
  const auto& config = ctx.config;
  auto p = process(config);
  json entries = json::array();
  json chapters = json::object();
  for (const auto& d : p.corpus.docs) {
    json m = d.meta;
    m["has_text"] = d.raw_text.has_value();
    entries.push_back(m);
    chapters[d.id()] = d.chapters;
  }
  ctx.emit_json("metadata.json", {{"entries", entries}, {"report", p.corpus.report}});
  ctx.emit_json("chapters.json", chapters);
  ctx.emit_json("duplicates.json", corpus::detect_duplicates(p.corpus.docs, config.duplicate_threshold));

  std::vector<corpus::RqKeywords> rq_terms;
  json queries = json::object();
  std::string queries_txt;
  for (const auto& rq : load_rqs(config)) {
    corpus::RqKeywords k{rq.id, {}};
    for (const auto& kw : rq.keywords) k.terms.push_back(kw.term);
    rq_terms.push_back(std::move(k));
    const auto q = query::compile_boolean_query(rq);
    queries[rq.id] = q;
    queries_txt += rq.id + "\t" + q + "\n";
  }
  ctx.emit_json("queries.json", queries);
  ctx.emit("queries.txt", queries_txt);
  ctx.emit_json("gaps.json", corpus::coverage_report(p.corpus.docs, rq_terms));
}

void stage_select(StageContext& ctx) {
  const auto& config = ctx.config;
  ctx.upstream(Stage::search, require_run(config, Stage::search, "metadata.json"));
  auto p = process(config);

  json bows = json::object();
  for (const auto& d : p.corpus.docs) {
    if (d.bow()) bows[d.id()] = *d.bow();
  }
  ctx.emit_json("bows.json", bows);
  ctx.emit_json("acronyms.json", p.lexicons.acronyms);
  ctx.emit_json("multiwords.json", p.lexicons.multiwords);
  for (const auto& w : p.lexicons.acronyms.warnings) ctx.warn(w);

  auto [index, tfidf] = tfidf_of(config, p.corpus.docs);
  ctx.emit_json("index.json", index);
  ctx.emit_json("tfidf.json", {{"vectors", doc_vectors_json(tfidf.vectors)}, {"empty_docs", tfidf.empty_docs}});

  std::vector<std::vector<std::string>> token_lists;
  for (const auto& t : p.tokens) {
    if (!t.empty()) token_lists.push_back(t);
  }
  auto opts = config.embedding;
  opts.seed = config.seed;
  const auto model = vectorize::build_embeddings(token_lists, opts);
  for (const auto& w : model.warnings) ctx.warn(w);
  const auto doc_emb = vectorize::doc_embeddings(model, tfidf.vectors);
  ctx.emit_json("embeddings.json", model);
  ctx.emit_json("doc_embeddings.json", {{"vectors", doc_vectors_json(doc_emb.vectors)}, {"flagged", doc_emb.flagged}});

  ctx.emit_json("similarity_tfidf.json",
                vectorize::similarity_json(vectorize::similarity_matrix(tfidf.vectors), "tfidf"));
  ctx.emit_json("similarity_embedding.json",
                vectorize::similarity_json(vectorize::similarity_matrix(doc_emb.vectors), "embedding"));

  json suggestions = json::array();
  for (const auto& s : vectorize::suggest_synonyms(model, config.synonym_min_cosine)) {
    suggestions.push_back({{"a", s.a}, {"b", s.b}, {"cosine", s.cosine}});
  }
  ctx.emit_json("synonym_suggestions.json", suggestions);

  const auto rqs = load_rqs(config);
  if (rqs.empty()) {
    ctx.warn("no rq_file configured; rankings skipped");
    return;
  }
  SelectArtifacts a;
  a.index = std::move(index);
  a.tfidf = tfidf.vectors;
  a.model = model;
  a.doc_embeddings = doc_emb.vectors;
  const auto rankings = rank_all(rqs, a, config.alpha);
  for (const auto& r : rankings) {
    ctx.emit_json("rankings/" + r.rq_id + ".json", r);
    for (const auto& w : r.warnings) ctx.warn(r.rq_id + ": " + w);
  }
  ctx.emit("rankings.csv", query::rankings_csv(rankings));
}

void stage_evaluate(StageContext& ctx) {
  const auto& config = ctx.config;
  const auto select_run = require_run(config, Stage::select, "rankings");
  ctx.upstream(Stage::select, select_run);
  auto p = process(config);
  const auto rankings = by_rq(load_rankings(select_run));
  std::vector<screen::Criterion> criteria;
  if (config.criteria_file) criteria = screen::load_criteria(*config.criteria_file);
  const auto records = screen::apply_criteria(p.corpus.docs, criteria, rankings, config.pipeline);
  ctx.emit("decisions_auto.jsonl", screen::decisions_jsonl(records));

  screen::DecisionLog log(records);
  const auto manual = config.root / kDecisionLog;
  if (fs::exists(manual)) {
    for (auto& r : screen::parse_decisions_jsonl(read_file(manual))) log.append(std::move(r));
  }
  json effective = json::object();
  for (const auto& [id, r] : log.effective_all()) effective[id] = r;
  const auto counts = screen::count_decisions(ids_of(p.corpus.docs), log);
  ctx.emit_json("decisions_effective.json",
                {{"effective", effective},
                 {"counts", {{"included", counts.included}, {"excluded", counts.excluded}, {"deferred", counts.deferred}}}});

  std::vector<Metadata> included;
  for (const auto& d : p.corpus.docs) {
    const auto e = log.effective(d.id());
    if (e && e->decision == screen::Decision::included) included.push_back(d.meta);
  }
  json parts = json::array();
  for (const auto& spec : config.partitions) parts.push_back(screen::partition(included, spec, rankings));
  ctx.emit_json("partitions.json", parts);
}

void stage_analyze(StageContext& ctx) {
  const auto& config = ctx.config;
  ctx.upstream(Stage::evaluate, require_run(config, Stage::evaluate, "decisions_auto.jsonl"));
  const auto corpus = ingest(config);
  const auto streams = load_annotation_streams(config);
  std::vector<std::string> violations;
  for (const auto& s : streams) {
    for (auto& v : screen::validate(s, corpus.docs)) violations.push_back(std::move(v));
  }
  if (!violations.empty()) throw IntegrityError("invalid annotations: " + join(violations, "; "), violations);
  const auto merged = screen::merge_annotations(streams);
  ctx.emit("annotations_merged.json", screen::annotations_json(merged.merged));
  ctx.emit_json("annotation_conflicts.json", merged.conflicts);
}

void stage_synthesize(StageContext& ctx) {
  const auto& config = ctx.config;
  ctx.upstream(Stage::analyze, require_run(config, Stage::analyze, "annotations_merged.json"));
  const auto corpus = ingest(config);
  const auto log = load_decision_log(config);
  const auto s = synthesize_state(config, corpus.docs, log);
  json patterns = json::object();
  for (const auto& [rq, table] : s.comparisons) {
    ctx.emit("comparisons/" + rq + ".md", emit::comparison_markdown(table));
    ctx.emit("comparisons/" + rq + ".csv", emit::comparison_csv(table));
    ctx.emit_json("comparisons/" + rq + ".json", table);
    const auto summary = screen::pattern_summary(table);
    ctx.emit("comparisons/" + rq + "_patterns.md", emit::patterns_markdown(summary));
    json p = json::object();
    for (const auto& [prop, hist] : summary) {
      json h = json::array();
      for (const auto& [value, count] : hist) h.push_back({{"value", value}, {"count", count}});
      p[prop] = h;
    }
    patterns[rq] = p;
    for (const auto& w : table.warnings) ctx.warn(rq + ": " + w);
  }
  ctx.emit_json("patterns.json", patterns);
  ctx.emit_json("conflicts.json", s.conflicts);
  ctx.emit("kg.tsv", kg::triples_text(s.statements));
  ctx.emit_json("kg.json", kg::statements_json(s.statements));
  ctx.emit_json("shape_report.json", {{"conforms", s.shape_violations.empty()}, {"violations", s.shape_violations}});
  ctx.emit_json("claims_report.json", {{"valid", s.claim_violations.empty()}, {"violations", s.claim_violations}});
}

void stage_report(StageContext& ctx) {
  const auto& config = ctx.config;
  const auto eval_run = require_run(config, Stage::evaluate, "decisions_auto.jsonl");
  const auto select_run = require_run(config, Stage::select, "similarity_tfidf.json");
  ctx.upstream(Stage::evaluate, eval_run);
  ctx.upstream(Stage::select, select_run);
  const auto corpus = ingest(config);
  const auto log = load_decision_log(config);
  const auto rqs = load_rqs(config);
  const auto rankings = load_rankings(select_run);
  const auto similarity = vectorize::similarity_from_json(read_json(select_run / "similarity_tfidf.json"));

  for (const auto& f : emit::emit_vault(corpus.docs, rqs, rankings, similarity, log, config.vault)) {
    ctx.emit("vault/" + f.path, f.contents);
  }
  ctx.emit_json("graph.json", emit::emit_graph(corpus.docs, similarity, rankings, log, config.edge_threshold));

  emit::ReportInputs in;
  in.rqs = rqs;
  if (config.criteria_file) in.criteria = screen::load_criteria(*config.criteria_file);
  in.doc_ids = ids_of(corpus.docs);
  in.decisions = log;
  if (const auto analyze_run = latest_run(config.root, Stage::analyze)) {
    ctx.upstream(Stage::analyze, *analyze_run);
    auto s = synthesize_state(config, corpus.docs, log);
    in.comparisons = std::move(s.comparisons);
    in.annotations = std::move(s.annotations);
    in.claims = std::move(s.claims);
    in.claim_violations = std::move(s.claim_violations);
    in.conflicts = std::move(s.conflicts);
  }
  const auto eval_parts = read_json(eval_run / "partitions.json");
  for (const auto& p : eval_parts) {
    screen::Partition part;
    part.name = p.at("name").get<std::string>();
    part.assignment = p.at("assignment").get<std::map<std::string, std::string>>();
    in.partitions.push_back(std::move(part));
  }
  in.gaps = load_gaps(config);
  ctx.emit("report.md", emit::emit_report_skeleton(in));

  if (config.likert_file) {
    const auto responses = assess::load_likert_csv(*config.likert_file);
    ctx.emit_json("stats/likert_boxplot.json", assess::boxplot_json(responses));
    ctx.emit("stats/coverage.csv", assess::coverage_csv(assess::coverage_matrix(responses)));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Stage s) {
  switch (s) {
    case Stage::plan: return "plan";
    case Stage::search: return "search";
    case Stage::select: return "select";
    case Stage::evaluate: return "evaluate";
    case Stage::analyze: return "analyze";
    case Stage::synthesize: return "synthesize";
    case Stage::report: return "report";
  }
  return {};
}

Stage stage_from_string(std::string_view s) {
  for (const auto st : all_stages()) {
    if (to_string(st) == s) return st;
  }
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages{Stage::plan,    Stage::search,     Stage::select, Stage::evaluate,
                                         Stage::analyze, Stage::synthesize, Stage::report};
  return stages;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(n) + ": expected 'key = value'");
      continue;
    }
    out[std::string(trim(t.substr(0, eq)))] = std::string(trim(t.substr(eq + 1)));
  }
  if (!errors.empty()) throw ConfigError(join(errors, "; "));
  return out;
}

std::string ProjectConfig::hash() const {
  std::string canonical;
  for (const auto& [k, v] : values) canonical += k + "=" + v + "\n";
  return sha256_hex(canonical);
}

ProjectConfig load_config(const fs::path& root, const std::optional<fs::path>& config_file,
                          const std::map<std::string, std::string>& overrides) {
  if (!fs::is_directory(root)) throw ConfigError("project directory '" + root.string() + "' does not exist");
  ProjectConfig c;
  c.root = fs::absolute(root).lexically_normal();
  c.values = defaults();
  const fs::path file = config_file ? *config_file : c.root / kConfigFile;
  if (fs::exists(file)) {
    for (const auto& [k, v] : parse_key_values(read_utf8_file(file))) c.values[k] = v;
  } else if (config_file) {
    throw ConfigError("config file '" + file.string() + "' does not exist");
  }
  for (const auto& [k, v] : overrides) c.values[k] = v;

  std::vector<std::string> errors;
  for (const auto& [k, v] : c.values) {
    if (!defaults().count(k) && k.rfind("comparison.", 0) != 0 && k.rfind("partition.", 0) != 0) {
      errors.push_back("unknown key '" + k + "'");
    }
  }
  const auto resolve = [&](const std::string& key) -> std::optional<fs::path> {
    const auto& v = c.values.at(key);
    if (v.empty()) return std::nullopt;
    fs::path p = fs::path(v).is_absolute() ? fs::path(v) : c.root / v;
    if (!fs::exists(p)) errors.push_back(key + ": '" + v + "' does not exist");
    return p;
  };
  for (const auto& b : split_list(c.values.at("bibliography"), ",")) {
    fs::path p = fs::path(b).is_absolute() ? fs::path(b) : c.root / b;
    if (!fs::exists(p)) errors.push_back("bibliography: '" + b + "' does not exist");
    c.bibliographies.push_back(p);
  }
  c.corpus_dir = c.root / c.values.at("corpus_dir");
  c.rq_file = resolve("rq_file");
  c.criteria_file = resolve("criteria_file");
  c.synonyms_file = resolve("synonyms_file");
  c.stopwords_file = resolve("stopwords_file");
  c.annotations_dir = resolve("annotations_dir");
  c.claims_file = resolve("claims_file");
  c.resolutions_file = resolve("resolutions_file");
  c.shapes_file = resolve("shapes_file");
  c.likert_file = resolve("likert_file");

  Reader r{c.values, {}};
  const long seed = r.integer("seed");
  if (seed < 0) r.errors.push_back("seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.seed_docs = split_list(c.values.at("seed_docs"), ",");
  c.pipeline.min_token_len = static_cast<std::size_t>(std::max(0L, r.integer("pipeline.min_token_len")));
  c.pipeline.multiword_pmi_threshold = r.real("pipeline.multiword_pmi_threshold");
  c.pipeline.multiword_min_count = r.integer("pipeline.multiword_min_count");
  c.pipeline.expand_acronyms = r.boolean("pipeline.expand_acronyms");
  c.pipeline.join_multiwords = r.boolean("pipeline.join_multiwords");
  c.pipeline.stem = r.boolean("pipeline.stem");
  c.pipeline.remove_stopwords = r.boolean("pipeline.remove_stopwords");
  c.embedding.k = static_cast<int>(r.integer("embedding.k"));
  c.embedding.window = static_cast<int>(r.integer("embedding.window"));
  c.embedding.oversampling = static_cast<int>(r.integer("embedding.oversampling"));
  c.embedding.power_iterations = static_cast<int>(r.integer("embedding.power_iterations"));
  c.embedding.seed = c.seed;
  c.alpha = r.real("ranking.alpha");
  c.duplicate_threshold = r.real("duplicates.threshold");
  c.synonym_min_cosine = r.real("synonyms.min_cosine");
  c.suggest_top_n = static_cast<int>(r.integer("suggest.top_n"));
  c.vault.k = static_cast<int>(r.integer("export.top_k"));
  c.vault.sim_threshold = r.real("export.sim_threshold");
  c.edge_threshold = r.real("export.edge_threshold");
  for (auto& e : r.errors) errors.push_back(std::move(e));
  if (c.embedding.k < 1) errors.push_back("embedding.k must be >= 1");
  if (c.embedding.window < 1) errors.push_back("embedding.window must be >= 1");
  if (c.alpha < 0 || c.alpha > 1) errors.push_back("ranking.alpha must lie in [0, 1]");

  for (const auto& [k, v] : c.values) {
    if (k.rfind("comparison.", 0) == 0) {
      auto props = split_list(v, ",");
      if (props.empty()) errors.push_back(k + ": no properties");
      c.comparisons[k.substr(11)] = std::move(props);
    } else if (k.rfind("partition.", 0) == 0) {
      try {
        c.partitions.push_back(screen::parse_partition_spec(k.substr(10), v));
      } catch (const ConfigError& e) {
        errors.push_back(e.what());
      }
    }
  }
  if (!errors.empty()) throw ConfigError(join(errors, "; "));
  if (c.stopwords_file) c.pipeline.stopwords = textproc::load_stopwords(*c.stopwords_file);
  c.pipeline.validate();
  return c;
}

// ---------------------------------------------------------------------------

ProjectLock::ProjectLock(const fs::path& root, std::string holder) : path_(root / kLockFile) {
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
  if (fd < 0) {
    if (errno == EEXIST) throw LockError("project is locked by another command (" + path_.string() + ")");
    throw Error("cannot create lock file " + path_.string() + ": " + std::strerror(errno));
  }
  holder += " pid " + std::to_string(::getpid()) + "\n";
  const auto written = ::write(fd, holder.data(), holder.size());
  (void)written;
  ::close(fd);
}

ProjectLock::~ProjectLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

bool ProjectLock::held(const fs::path& root) { return fs::exists(root / kLockFile); }

json manifest_json(const RunManifest& m) {
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return json{{"run_id", m.run_id},     {"stage", m.stage},       {"seed", m.seed},
              {"config_hash", m.config_hash}, {"inputs", m.inputs}, {"upstream", m.upstream},
              {"started", m.started},   {"finished", m.finished}, {"files", files},
              {"warnings", m.warnings}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.run_id = j.at("run_id").get<int>();
  m.stage = j.at("stage").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.upstream = j.at("upstream").get<std::map<std::string, int>>();
  m.started = j.at("started").get<std::string>();
  m.finished = j.at("finished").get<std::string>();
  for (const auto& f : j.at("files")) {
    m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(), f.at("bytes").get<std::size_t>()});
  }
  m.warnings = j.value("warnings", std::vector<std::string>{});
  return m;
}

std::optional<fs::path> latest_run(const fs::path& root, Stage stage) {
  const auto runs = root / "runs";
  if (!fs::is_directory(runs)) return std::nullopt;
  std::optional<std::pair<int, fs::path>> best;
  for (const auto& e : fs::directory_iterator(runs)) {
    const auto n = run_number(e.path().filename().string());
    const auto manifest = e.path() / "manifest.json";
    if (!n || !fs::exists(manifest)) continue;
    try {
      if (json::parse(read_file(manifest)).at("stage").get<std::string>() != to_string(stage)) continue;
    } catch (const json::exception&) {
      continue;
    }
    if (!best || *n > best->first) best = {{*n, e.path()}};
  }
  if (!best) return std::nullopt;
  return best->second;
}

RunManifest run_stage(Stage stage, const ProjectConfig& config) {
  ProjectLock lock(config.root, "stage " + to_string(stage));
  const auto runs = config.root / "runs";
  fs::create_directories(runs);
  int next = 1;
  for (const auto& e : fs::directory_iterator(runs)) {
    if (const auto n = run_number(e.path().filename().string())) next = std::max(next, *n + 1);
  }
  const auto partial = runs / ("." + run_name(next) + ".partial");
  fs::remove_all(partial);
  fs::create_directories(partial);

  RunManifest m;
  m.run_id = next;
  m.stage = to_string(stage);
  m.seed = config.seed;
  m.config_hash = config.hash();
  m.started = utc_now_iso8601();

  std::vector<fs::path> inputs(config.bibliographies.begin(), config.bibliographies.end());
  for (const auto& p : {config.rq_file, config.criteria_file, config.synonyms_file, config.stopwords_file,
                        config.claims_file, config.resolutions_file, config.shapes_file, config.likert_file}) {
    if (p) inputs.push_back(*p);
  }
  for (const auto& dir : {std::optional<fs::path>(config.corpus_dir), config.annotations_dir}) {
    if (!dir || !fs::is_directory(*dir)) continue;
    for (const auto& e : fs::directory_iterator(*dir)) {
      if (e.is_regular_file()) inputs.push_back(e.path());
    }
  }
  for (const auto& name : {kDecisionLog, kOverrideLog}) {
    const auto p = config.root / name;
    if (fs::exists(p)) inputs.push_back(p);
  }
  for (const auto& p : inputs) m.inputs[rel_path(config.root, p)] = sha256_hex(read_file(p));

  try {
    StageContext ctx(config, partial, m);
    switch (stage) {
      case Stage::plan: stage_plan(ctx); break;
      case Stage::search: stage_search(ctx); break;
      case Stage::select: stage_select(ctx); break;
      case Stage::evaluate: stage_evaluate(ctx); break;
      case Stage::analyze: stage_analyze(ctx); break;
      case Stage::synthesize: stage_synthesize(ctx); break;
      case Stage::report: stage_report(ctx); break;
    }
    std::sort(m.files.begin(), m.files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    m.finished = utc_now_iso8601();
    write_file(partial / "manifest.json", dump(manifest_json(m)));
    fs::rename(partial, runs / run_name(next));
  } catch (...) {
    std::error_code ec;
    fs::remove_all(partial, ec);
    throw;
  }
  return m;
}

// ---------------------------------------------------------------------------

CorpusState ingest(const ProjectConfig& config) {
  if (config.bibliographies.empty()) throw ConfigError("no bibliography configured");
  CorpusState state;
  std::vector<Metadata> entries;
  for (const auto& path : config.bibliographies) {
    auto bib = corpus::parse_bibliography(path, corpus::format_from_path(path));
    const auto name = rel_path(config.root, path);
    for (auto& w : bib.report.warnings) state.report.warnings.push_back(name + ": " + w);
    for (auto& s : bib.report.skipped) state.report.skipped.push_back(name + ": " + s);
    for (auto& e : bib.entries) entries.push_back(std::move(e));
  }
  corpus::assign_ids(entries);
  state.docs = corpus::load_corpus(std::move(entries), config.corpus_dir);
  std::sort(state.docs.begin(), state.docs.end(), [](const auto& a, const auto& b) { return a.id() < b.id(); });
  return state;
}

std::vector<query::ResearchQuestion> load_rqs(const ProjectConfig& config) {
  if (!config.rq_file) return {};
  auto rqs = query::load_research_questions(*config.rq_file, config.pipeline);
  const auto overrides = config.root / kOverrideLog;
  if (!fs::exists(overrides)) return rqs;
  std::istringstream in{read_file(overrides)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IntegrityError(std::string(kOverrideLog) + ": " + e.what(), {line});
    }
    const auto id = j.at("rq_id").get<std::string>();
    const auto it = std::find_if(rqs.begin(), rqs.end(), [&](const auto& rq) { return rq.id == id; });
    if (it == rqs.end()) continue;
    query::apply_weights(*it, j.at("weights").get<std::map<std::string, double>>());
  }
  return rqs;
}

void append_weight_override(const fs::path& root, const std::string& rq_id, const std::map<std::string, double>& weights) {
  const auto path = root / kOverrideLog;
  std::string contents = fs::exists(path) ? read_file(path) : std::string();
  contents += json{{"rq_id", rq_id}, {"weights", weights}, {"timestamp", utc_now_iso8601()}}.dump() + "\n";
  write_file(path, contents);
}

screen::DecisionLog load_decision_log(const ProjectConfig& config) {
  screen::DecisionLog log;
  if (const auto run = latest_run(config.root, Stage::evaluate)) {
    for (auto& r : screen::parse_decisions_jsonl(read_file(*run / "decisions_auto.jsonl"))) log.append(std::move(r));
  }
  const auto manual = config.root / kDecisionLog;
  if (fs::exists(manual)) {
    for (auto& r : screen::parse_decisions_jsonl(read_file(manual))) log.append(std::move(r));
  }
  return log;
}

void append_manual_decision(const fs::path& root, const screen::DecisionRecord& record) {
  const auto path = root / kDecisionLog;
  std::string contents = fs::exists(path) ? read_file(path) : std::string();
  contents += screen::decisions_jsonl({record});
  write_file(path, contents);
}

std::vector<std::vector<screen::Annotation>> load_annotation_streams(const ProjectConfig& config) {
  std::vector<std::vector<screen::Annotation>> streams;
  if (!config.annotations_dir) {
    const auto api = api_annotation_file(config);
    if (fs::exists(api)) streams.push_back(screen::load_annotations(api));
    return streams;
  }
  if (!fs::is_directory(*config.annotations_dir)) return streams;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(*config.annotations_dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".json" || ext == ".jsonl")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) streams.push_back(screen::load_annotations(f));
  return streams;
}

fs::path api_annotation_file(const ProjectConfig& config) {
  const auto dir = config.annotations_dir ? *config.annotations_dir : config.root / "annotations";
  return dir / "api.jsonl";
}

SelectArtifacts load_select(const ProjectConfig& config) {
  const auto run = require_run(config, Stage::select, "tfidf.json");
  SelectArtifacts a;
  a.run_id = run_number(run.filename().string()).value_or(0);
  a.index = read_json(run / "index.json").get<vectorize::TermIndex>();
  a.tfidf = doc_vectors_from(read_json(run / "tfidf.json").at("vectors"));
  a.model = read_json(run / "embeddings.json").get<vectorize::EmbeddingModel>();
  a.doc_embeddings = doc_vectors_from(read_json(run / "doc_embeddings.json").at("vectors"));
  a.similarity_tfidf = vectorize::similarity_from_json(read_json(run / "similarity_tfidf.json"));
  return a;
}

std::vector<query::Ranking> rank_all(const std::vector<query::ResearchQuestion>& rqs, const SelectArtifacts& a,
                                     double alpha) {
  std::vector<query::Ranking> out(rqs.size());
  parallel_for(rqs.size(), [&](std::size_t i) {
    out[i] = query::rank_documents(rqs[i], a.index, a.tfidf, {&a.model, &a.doc_embeddings}, alpha);
  });
  return out;
}

}  // namespace slrkit::project
