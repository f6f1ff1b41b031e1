#include "slrkit/errors.hpp"
#include "slrkit/project.hpp"
#include "slrkit/util.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <fstream>

using namespace slrkit;
using namespace slrkit::project;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> file_hashes(const fs::path& run) {
  std::map<std::string, std::string> out;
  for (const auto& f : manifest_from_json(nlohmann::json::parse(read_file(run / "manifest.json"))).files) {
    out[f.path] = f.sha256;
  }
  return out;
}

std::vector<fs::path> run_dirs(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::exists(root / "runs")) return out;
  for (const auto& e : fs::directory_iterator(root / "runs")) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void append_line(const fs::path& p, const std::string& line) {
  std::ofstream out(p, std::ios::app);
  out << line << "\n";
}

}  // namespace

TEST_CASE("config loading") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  CHECK(config.seed == 7);
  CHECK(config.embedding.k == 8);
  CHECK(config.embedding.window == 4);
  CHECK(config.bibliographies.size() == 2);
  CHECK(config.comparisons.at("RQ1") == std::vector<std::string>{"method", "evaluation", "year"});
  CHECK(config.partitions.size() == 2);
  CHECK(config.values.at("export.top_k") == "5");
  CHECK(config.hash().size() == 64);

  const auto overridden = load_config(root, std::nullopt, {{"seed", "8"}});
  CHECK(overridden.seed == 8);
  CHECK(overridden.hash() != config.hash());
  CHECK(load_config(root).hash() == config.hash());

  CHECK_THROWS_AS(load_config(root, std::nullopt, {{"no.such.key", "1"}}), ConfigError);
  CHECK_THROWS_AS(load_config(root, std::nullopt, {{"ranking.alpha", "1.5"}}), ConfigError);
  CHECK_THROWS_AS(load_config(root, std::nullopt, {{"rq_file", "missing.txt"}}), ConfigError);
  CHECK_THROWS_AS(load_config(root, std::nullopt, {{"embedding.k", "many"}}), ConfigError);
  CHECK_THROWS_AS(load_config(root, root / "nope.conf"), ConfigError);
  CHECK(parse_key_values("# c\na = 1\n b=two words \n") ==
        std::map<std::string, std::string>{{"a", "1"}, {"b", "two words"}});
}

TEST_CASE("stage names") {
  CHECK(all_stages().size() == 7);
  for (const auto s : all_stages()) CHECK(stage_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(stage_from_string("bogus"), ConfigError);
}

TEST_CASE("seven stages end to end") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  std::map<std::string, std::string> listed;
  for (const auto stage : all_stages()) {
    const auto m = run_stage(stage, config);
    CHECK(m.stage == to_string(stage));
    CHECK(m.config_hash == config.hash());
    CHECK(m.seed == 7);
    CHECK(is_iso8601_utc(m.started));
    CHECK(is_iso8601_utc(m.finished));
    const auto run = latest_run(root, stage);
    REQUIRE(run);
    std::vector<std::string> paths;
    for (const auto& f : m.files) {
      paths.push_back(f.path);
      CHECK(sha256_hex(read_file(*run / f.path)) == f.sha256);
    }
    listed[m.stage] = join(paths, " ");
  }
  std::map<std::string, std::string> golden;
  for (const auto& line : split(read_file(testing::golden("run_files.txt")), '\n')) {
    const auto colon = line.find(": ");
    if (colon != std::string::npos) golden[line.substr(0, colon)] = line.substr(colon + 2);
  }
  CHECK(listed == golden);

  const auto report_dir = latest_run(root, Stage::report);
  REQUIRE(report_dir);
  CHECK(read_file(*report_dir / "report.md") == read_file(testing::golden("report_fixture.md")));

  const auto effective = nlohmann::json::parse(read_file(*latest_run(root, Stage::evaluate) / "decisions_effective.json"));
  CHECK(effective["counts"]["included"] == 8);
  CHECK(effective["counts"]["excluded"] == 1);
  CHECK(effective["counts"]["deferred"] == 1);

  const auto report_manifest = manifest_from_json(nlohmann::json::parse(read_file(*report_dir / "manifest.json")));
  CHECK(report_manifest.upstream.at("evaluate") == 4);
  CHECK(manifest_json(manifest_from_json(manifest_json(report_manifest))) == manifest_json(report_manifest));

  const std::string excluded = "manual-search-strategies-in-medicine-2008";
  for (const auto& f : report_manifest.files) {
    if (f.path.rfind("stats/", 0) == 0) continue;
    CHECK(read_file(*report_dir / f.path).find(excluded) == std::string::npos);
  }
  for (const auto* name : {"kg.tsv", "comparisons/RQ1.md", "comparisons/RQ1.csv"}) {
    CHECK(read_file(*latest_run(root, Stage::synthesize) / name).find(excluded) == std::string::npos);
  }
  const auto shapes = nlohmann::json::parse(read_file(*latest_run(root, Stage::synthesize) / "shape_report.json"));
  CHECK(shapes["conforms"] == true);
}

TEST_CASE("reruns are byte identical") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  for (const auto stage : {Stage::search, Stage::select}) run_stage(stage, config);
  const auto first = *latest_run(root, Stage::select);
  run_stage(Stage::select, config);
  const auto second = *latest_run(root, Stage::select);
  CHECK(first != second);
  CHECK(file_hashes(first) == file_hashes(second));
}

TEST_CASE("missing prerequisites name the producing stage") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  try {
    run_stage(Stage::report, config);
    FAIL("expected PrerequisiteError");
  } catch (const PrerequisiteError& e) {
    CHECK(e.stage() == "evaluate");
  }
  CHECK(run_dirs(root).empty());
}

TEST_CASE("a held lock blocks runs") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  {
    ProjectLock lock(root, "test");
    CHECK(ProjectLock::held(root));
    CHECK_THROWS_AS(ProjectLock(root, "other"), LockError);
    CHECK_THROWS_AS(run_stage(Stage::plan, config), LockError);
  }
  CHECK_FALSE(ProjectLock::held(root));
  CHECK_NOTHROW(run_stage(Stage::plan, config));
}

TEST_CASE("a failing stage leaves no run directory") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  for (const auto stage : {Stage::search, Stage::select, Stage::evaluate}) run_stage(stage, config);
  append_line(root / "annotations" / "bob.jsonl",
              R"({"id": "bob/9", "doc_id": "no-such-doc", "property": "method", "value": "x", "role": "data-evidence", "actor": "bob", "timestamp": "2024-03-01T10:00:00Z"})");
  const auto before = run_dirs(root);
  CHECK_THROWS_AS(run_stage(Stage::analyze, config), IntegrityError);
  CHECK(run_dirs(root) == before);
  CHECK_FALSE(ProjectLock::held(root));
}

TEST_CASE("manual decisions and weight overrides persist") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  for (const auto stage : {Stage::search, Stage::select, Stage::evaluate}) run_stage(stage, config);
  const std::string id = "reproducible-reporting-of-reviews-2020";
  CHECK(load_decision_log(config).effective(id)->decision == screen::Decision::deferred);
  append_manual_decision(root, {id, screen::Decision::included, "manual", "alice", "2024-06-01T00:00:00Z", "ok"});
  CHECK(load_decision_log(config).effective(id)->decision == screen::Decision::included);

  append_weight_override(root, "RQ1", {{"screening", 5.0}});
  const auto rqs = load_rqs(config);
  CHECK(rqs[0].keywords[1].weight == 5.0);

  const auto select = load_select(config);
  const auto rankings = rank_all(rqs, select, config.alpha);
  REQUIRE(rankings.size() == 2);
  CHECK(rankings[0].scores.size() == 10);
}

TEST_CASE("manifests record input checksums") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  const auto config = load_config(root);
  const auto a = run_stage(Stage::search, config);
  append_line(root / "references.bib", "% touched");
  const auto b = run_stage(Stage::search, config);
  CHECK(a.inputs.at("references.bib") != b.inputs.at("references.bib"));
  CHECK(a.inputs.at("rqs.txt") == b.inputs.at("rqs.txt"));
  CHECK(b.run_id == a.run_id + 1);
}
