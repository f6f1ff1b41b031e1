#include "slrkit/errors.hpp"
#include "slrkit/project.hpp"
#include "slrkit/serve.hpp"
#include "slrkit/util.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

using namespace slrkit;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  testing::TempDir dir;
  fs::path root = testing::copy_project(dir);
  project::ProjectConfig config = project::load_config(root);

  Fixture() {
    for (const auto stage : {project::Stage::search, project::Stage::select, project::Stage::evaluate}) {
      project::run_stage(stage, config);
    }
  }
};

struct Running {
  serve::Service service;
  int port;
  httplib::Client client;

  explicit Running(const project::ProjectConfig& config)
      : service(config), port(service.start({"127.0.0.1", 0, std::nullopt})), client("127.0.0.1", port) {}

  json get(const std::string& path, int expected = 200) {
    const auto res = client.Get(path);
    REQUIRE(res);
    CHECK(res->status == expected);
    return json::parse(res->body);
  }
  httplib::Result put(const std::string& path, const json& body) {
    return client.Put(path, body.dump(), "application/json");
  }
  httplib::Result post(const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  }
};

std::vector<std::string> order(const json& ranking) {
  std::vector<std::string> out;
  for (const auto& s : ranking["scores"]) out.push_back(s["doc_id"]);
  return out;
}

bool has_node(const json& graph, const std::string& id) {
  for (const auto& n : graph["nodes"]) {
    if (n["id"] == id) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a project without a select run cannot be served") {
  testing::TempDir dir;
  const auto root = testing::copy_project(dir);
  CHECK_THROWS_AS(serve::Service(project::load_config(root)), PrerequisiteError);
}

TEST_CASE("read endpoints") {
  Fixture f;
  Running r(f.config);

  const auto res = r.client.Get("/rankings/RQ1");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  CHECK(res->body == read_file(*project::latest_run(f.root, project::Stage::select) / "rankings" / "RQ1.json"));

  const auto corpus = r.get("/corpus");
  CHECK(corpus["documents"].size() == 10);
  CHECK(corpus["counts"]["included"] == 8);
  CHECK(corpus["counts"]["excluded"] == 1);
  CHECK(corpus["counts"]["deferred"] == 1);

  const auto doc = r.get("/documents/automating-systematic-reviews-2019");
  CHECK(doc["has_text"] == true);
  CHECK(doc["scores"].contains("RQ1"));
  CHECK(doc["annotations"].size() >= 2);

  CHECK(r.get("/rqs").size() == 2);
  CHECK(r.get("/comparisons").contains("RQ1"));

  const auto likert = r.get("/stats/likert");
  CHECK(likert["requirements"].size() == 65);
  CHECK(likert.contains("coverage_csv"));

  CHECK(r.get("/documents/no-such-doc", 404).contains("error"));
  CHECK(r.get("/rankings/RQ9", 404).contains("error"));
}

TEST_CASE("weight updates rerank without changing scale invariant order") {
  Fixture f;
  Running r(f.config);
  const auto before = r.get("/rankings/RQ1");

  json doubled = json::object();
  for (const auto& rq : r.get("/rqs")) {
    if (rq["id"] != "RQ1") continue;
    for (const auto& k : rq["keywords"]) doubled[k["term"].get<std::string>()] = 2 * k["weight"].get<double>();
  }
  REQUIRE_FALSE(doubled.empty());
  const auto ok = r.put("/rqs/RQ1", {{"weights", doubled}});
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(order(json::parse(ok->body)["ranking"]) == order(before));
  CHECK(order(r.get("/rankings/RQ1")) == order(before));
  CHECK(fs::exists(f.root / project::kOverrideLog));

  const auto bad = r.put("/rqs/RQ1", {{"weights", {{doubled.begin().key(), -1.0}}}});
  REQUIRE(bad);
  CHECK(bad->status == 422);
  const auto missing = r.put("/rqs/RQ9", {{"weights", {{"x", 1.0}}}});
  REQUIRE(missing);
  CHECK(missing->status == 404);
  const auto not_number = r.put("/rqs/RQ1", {{"weights", {{"x", "heavy"}}}});
  REQUIRE(not_number);
  CHECK(not_number->status == 422);
}

TEST_CASE("decisions update the graph") {
  Fixture f;
  Running r(f.config);
  const std::string id = "automating-systematic-reviews-2019";
  CHECK(has_node(r.get("/graph"), id));

  const auto res = r.post("/decisions", {{"doc_id", id}, {"decision", "excluded"}, {"actor", "alice"}});
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(json::parse(res->body)["source"] == "manual");
  CHECK_FALSE(has_node(r.get("/graph"), id));
  CHECK(r.get("/corpus")["counts"]["excluded"] == 2);

  const auto unknown = r.post("/decisions", {{"doc_id", "no-such-doc"}, {"decision", "included"}});
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
  const auto bad = r.post("/decisions", {{"doc_id", id}, {"decision", "maybe"}});
  REQUIRE(bad);
  CHECK(bad->status == 422);
}

TEST_CASE("annotations are appended") {
  Fixture f;
  Running r(f.config);
  const json a = {{"id", "carol/1"},
                  {"doc_id", "automating-systematic-reviews-2019"},
                  {"property", "year"},
                  {"value", "2019"},
                  {"role", "data-evidence"},
                  {"actor", "carol"},
                  {"timestamp", "2024-05-01T00:00:00Z"}};
  const auto res = r.post("/annotations", a);
  REQUIRE(res);
  INFO(res->body);
  CHECK(res->status == 201);
  CHECK(fs::exists(f.root / "annotations" / "api.jsonl"));
  CHECK(r.get("/documents/automating-systematic-reviews-2019")["annotations"].size() >= 3);

  json dangling = a;
  dangling["id"] = "carol/2";
  dangling["doc_id"] = "no-such-doc";
  const auto bad = r.post("/annotations", dangling);
  REQUIRE(bad);
  CHECK(bad->status == 422);
  const auto garbage = r.client.Post("/annotations", "not json", "application/json");
  REQUIRE(garbage);
  CHECK(garbage->status == 422);
}

TEST_CASE("writes conflict with a held lock") {
  Fixture f;
  Running r(f.config);
  project::ProjectLock lock(f.root, "stage");
  const auto res = r.post("/decisions", {{"doc_id", "automating-systematic-reviews-2019"}, {"decision", "excluded"}});
  REQUIRE(res);
  CHECK(res->status == 409);
  const auto put = r.put("/rqs/RQ1", {{"weights", {{"screening", 2.0}}}});
  REQUIRE(put);
  CHECK(put->status == 409);
  r.get("/corpus");
}
