#include "slrkit/serve.hpp"

#include "slrkit/assess.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <functional>
#include <mutex>
#include <thread>

namespace slrkit::serve {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Snapshot {
  std::string key;
  project::CorpusState corpus;
  std::set<std::string> ids;
  std::vector<query::ResearchQuestion> rqs;
  project::SelectArtifacts select;
  std::vector<query::Ranking> rankings;  // same order as rqs
  screen::DecisionLog log;

  const query::Ranking* ranking(const std::string& rq) const {
    for (const auto& r : rankings) {
      if (r.rq_id == rq) return &r;
    }
    return nullptr;
  }
  const Document* document(const std::string& id) const {
    for (const auto& d : corpus.docs) {
      if (d.id() == id) return &d;
    }
    return nullptr;
  }
};

void stamp(std::string& key, const fs::path& p) {
  std::error_code ec;
  const auto size = fs::file_size(p, ec);
  if (ec) {
    key += p.string() + ":-\n";
    return;
  }
  const auto time = fs::last_write_time(p, ec).time_since_epoch().count();
  key += p.string() + ":" + std::to_string(size) + ":" + std::to_string(time) + "\n";
}

/// Changes whenever anything the snapshot is built from changes.
std::string state_key(const project::ProjectConfig& config) {
  std::string key;
  for (const auto s : project::all_stages()) {
    const auto run = project::latest_run(config.root, s);
    key += project::to_string(s) + "=" + (run ? run->filename().string() : "-") + "\n";
  }
  stamp(key, config.root / project::kDecisionLog);
  stamp(key, config.root / project::kOverrideLog);
  stamp(key, project::api_annotation_file(config));
  if (config.annotations_dir && fs::is_directory(*config.annotations_dir)) {
    for (const auto& e : fs::directory_iterator(*config.annotations_dir)) stamp(key, e.path());
  }
  return key;
}

json error_body(const std::string& message, const std::vector<std::string>& details = {}) {
  json j{{"error", message}};
  if (!details.empty()) j["violations"] = details;
  return j;
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("request body is not valid JSON: ") + e.what()});
  }
}

std::string required_string(const json& body, const std::string& key) {
  if (!body.is_object() || !body.contains(key) || !body[key].is_string() || body[key].get<std::string>().empty()) {
    throw ValidationError({"field '" + key + "' must be a non-empty string"});
  }
  return body[key].get<std::string>();
}

}  // namespace

struct Service::Impl {
  project::ProjectConfig config;
  httplib::Server server;
  std::thread thread;

  std::mutex snapshot_mutex;
  std::shared_ptr<const Snapshot> snapshot;
  std::mutex write_mutex;

  explicit Impl(project::ProjectConfig c) : config(std::move(c)) {
    snapshot = build();
    routes();
  }

  std::shared_ptr<const Snapshot> build() const {
    auto s = std::make_shared<Snapshot>();
    s->key = state_key(config);
    s->corpus = project::ingest(config);
    for (const auto& d : s->corpus.docs) s->ids.insert(d.id());
    s->rqs = project::load_rqs(config);
    s->select = project::load_select(config);
    s->rankings = project::rank_all(s->rqs, s->select, config.alpha);
    s->log = project::load_decision_log(config);
    return s;
  }

  std::shared_ptr<const Snapshot> current() {
    std::lock_guard lock(snapshot_mutex);
    if (state_key(config) != snapshot->key) snapshot = build();
    return snapshot;
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      const auto fail = [&](int status, const json& body) {
        res.status = status;
        res.set_content(project::dump(body), "application/json");
      };
      try {
        h(req, res);
      } catch (const NotFoundError& e) {
        fail(404, error_body(e.what()));
      } catch (const LockError& e) {
        fail(409, error_body(e.what()));
      } catch (const PrerequisiteError& e) {
        fail(409, error_body(e.what()));
      } catch (const ValidationError& e) {
        fail(422, error_body(e.what(), e.violations()));
      } catch (const IntegrityError& e) {
        fail(422, error_body(e.what(), e.failing()));
      } catch (const ConfigError& e) {
        fail(422, error_body(e.what()));
      } catch (const json::exception& e) {
        fail(422, error_body(e.what()));
      } catch (const std::exception& e) {
        fail(500, error_body(e.what()));
      }
    };
  }

  static void reply(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(project::dump(body), "application/json");
  }

  /// Runs a write under the project lock so CLI stages and API writes exclude each other.
  template <typename F>
  void write(F&& f) {
    std::lock_guard lock(write_mutex);
    project::ProjectLock project_lock(config.root, "serve");
    f();
  }

  void routes() {
    server.Get("/corpus", guarded([this](const auto&, auto& res) { reply(res, corpus_json(*current())); }));
    server.Get(R"(/documents/([^/]+))", guarded([this](const auto& req, auto& res) {
                 reply(res, document_json(*current(), req.matches[1]));
               }));
    server.Get("/rqs", guarded([this](const auto&, auto& res) {
                 const auto s = current();
                 json out = json::array();
                 for (const auto& rq : s->rqs) out.push_back(rq);
                 reply(res, out);
               }));
    server.Put(R"(/rqs/([^/]+))", guarded([this](const auto& req, auto& res) { put_weights(req, res); }));
    server.Get(R"(/rankings/([^/]+))", guarded([this](const auto& req, auto& res) {
                 const auto s = current();
                 const auto* r = s->ranking(req.matches[1]);
                 if (!r) throw NotFoundError("unknown research question '" + std::string(req.matches[1]) + "'");
                 reply(res, *r);
               }));
    server.Post("/decisions", guarded([this](const auto& req, auto& res) { post_decision(req, res); }));
    server.Post("/annotations", guarded([this](const auto& req, auto& res) { post_annotations(req, res); }));
    server.Get("/graph", guarded([this](const auto&, auto& res) {
                 const auto s = current();
                 reply(res, emit::emit_graph(s->corpus.docs, s->select.similarity_tfidf, s->rankings, s->log,
                                             config.edge_threshold));
               }));
    server.Get("/comparisons", guarded([this](const auto&, auto& res) { reply(res, comparisons_json(*current())); }));
    server.Get("/stats/likert", guarded([this](const auto&, auto& res) {
                 if (!config.likert_file) throw NotFoundError("no likert_file configured");
                 const auto responses = assess::load_likert_csv(*config.likert_file);
                 auto body = assess::boxplot_json(responses);
                 body["coverage_csv"] = assess::coverage_csv(assess::coverage_matrix(responses));
                 reply(res, body);
               }));
  }

  json corpus_json(const Snapshot& s) const {
    json docs = json::array();
    for (const auto& d : s.corpus.docs) {
      const auto e = s.log.effective(d.id());
      json scores = json::object();
      for (const auto& r : s.rankings) {
        if (const auto* sc = r.find(d.id())) scores[r.rq_id] = sc->score;
      }
      docs.push_back({{"id", d.id()},
                      {"title", d.meta.title},
                      {"authors", d.meta.authors},
                      {"year", d.meta.year ? json(*d.meta.year) : json(nullptr)},
                      {"venue", d.meta.venue ? json(*d.meta.venue) : json(nullptr)},
                      {"has_text", d.raw_text.has_value()},
                      {"decision", e ? screen::to_string(e->decision) : std::string("deferred")},
                      {"decision_source", e ? e->source : std::string("none")},
                      {"scores", scores}});
    }
    std::vector<std::string> ids(s.ids.begin(), s.ids.end());
    const auto c = screen::count_decisions(ids, s.log);
    return {{"documents", docs},
            {"counts", {{"included", c.included}, {"excluded", c.excluded}, {"deferred", c.deferred}}}};
  }

  json document_json(const Snapshot& s, const std::string& id) const {
    const auto* d = s.document(id);
    if (!d) throw NotFoundError("unknown document '" + id + "'");
    json history = json::array();
    for (const auto& r : s.log.history()) {
      if (r.doc_id == id) history.push_back(r);
    }
    const auto e = s.log.effective(id);
    json scores = json::object();
    for (const auto& r : s.rankings) {
      if (const auto* sc = r.find(id)) {
        json contributions = json::array();
        for (const auto& c : sc->contributions) contributions.push_back({{"term", c.term}, {"contribution", c.contribution}});
        scores[r.rq_id] = {{"score", sc->score}, {"rank", sc->rank}, {"contributions", contributions}};
      }
    }
    json annotations = json::array();
    for (const auto& stream : project::load_annotation_streams(config)) {
      for (const auto& a : stream) {
        if (a.doc_id == id) annotations.push_back(a);
      }
    }
    return {{"metadata", d->meta},
            {"has_text", d->raw_text.has_value()},
            {"chapters", d->chapters},
            {"decision", e ? json(*e) : json(nullptr)},
            {"history", history},
            {"scores", scores},
            {"annotations", annotations}};
  }

  json comparisons_json(const Snapshot& s) const {
    const auto merged = screen::merge_annotations(project::load_annotation_streams(config));
    const auto keep = emit::exportable_ids(s.corpus.docs, s.log);
    const std::vector<std::string> docs(keep.begin(), keep.end());
    std::vector<screen::Resolution> resolutions;
    if (config.resolutions_file) resolutions = screen::parse_resolutions(read_utf8_file(*config.resolutions_file));
    json out = json::object();
    for (const auto& [rq, properties] : config.comparisons) {
      const auto table = screen::build_comparison(merged.merged, properties, docs);
      out[rq] = {{"table", table},
                 {"markdown", emit::comparison_markdown(table)},
                 {"conflicts", screen::detect_conflicts(table, resolutions)}};
    }
    return out;
  }

  void put_weights(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto body = parse_body(req);
    const json& weights_json = body.is_object() && body.contains("weights") ? body["weights"] : body;
    std::map<std::string, double> weights;
    std::vector<std::string> errors;
    if (!weights_json.is_object() || weights_json.empty()) errors.push_back("weights must be a non-empty object");
    else {
      for (const auto& [k, v] : weights_json.items()) {
        if (!v.is_number()) errors.push_back("weight of '" + k + "' is not a number");
        else weights[k] = v.get<double>();
      }
    }
    if (!errors.empty()) throw ValidationError(errors);
    write([&] {
      const auto s = current();
      const auto it = std::find_if(s->rqs.begin(), s->rqs.end(), [&](const auto& rq) { return rq.id == id; });
      if (it == s->rqs.end()) throw NotFoundError("unknown research question '" + id + "'");
      auto rq = *it;
      query::apply_weights(rq, weights);
      project::append_weight_override(config.root, id, weights);
    });
    const auto s = current();
    const auto it = std::find_if(s->rqs.begin(), s->rqs.end(), [&](const auto& rq) { return rq.id == id; });
    reply(res, {{"rq", *it}, {"ranking", *s->ranking(id)}});
  }

  void post_decision(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const std::string doc = body.is_object() && body.contains("doc") && !body.contains("doc_id")
                                ? required_string(body, "doc")
                                : required_string(body, "doc_id");
    const auto decision = screen::decision_from_string(required_string(body, "decision"));
    const std::string actor = body.value("actor", std::string("api"));
    const std::string note = body.value("note", std::string());
    const std::string timestamp = body.value("timestamp", std::string());
    screen::DecisionRecord record;
    write([&] {
      auto log = current()->log;
      record = screen::record_decision(log, current()->ids, doc, decision, actor, note, timestamp);
      project::append_manual_decision(config.root, record);
    });
    reply(res, record, 201);
  }

  void post_annotations(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    std::vector<screen::Annotation> incoming;
    try {
      incoming = screen::parse_annotations(body.is_array() ? body.dump() : json::array({body}).dump());
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw ValidationError({e.what()});
    }
    if (incoming.empty()) throw ValidationError({"no annotations in request"});
    write([&] {
      const auto s = current();
      const auto violations = screen::validate(incoming, s->corpus.docs);
      if (!violations.empty()) throw ValidationError(violations);
      auto streams = project::load_annotation_streams(config);
      streams.push_back(incoming);
      screen::merge_annotations(streams);
      const auto path = project::api_annotation_file(config);
      std::string contents = fs::exists(path) ? read_file(path) : std::string();
      for (const auto& a : incoming) contents += json(a).dump() + "\n";
      write_file(path, contents);
    });
    json out = json::array();
    for (const auto& a : incoming) out.push_back(a);
    reply(res, out, 201);
  }
};

Service::Service(project::ProjectConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::start(const ServeOptions& options) {
  if (options.static_dir && !impl_->server.set_mount_point("/", options.static_dir->string())) {
    throw ConfigError("static directory '" + options.static_dir->string() + "' does not exist");
  }
  int port = options.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(options.bind);
    if (port < 0) throw Error("cannot bind to " + options.bind);
  } else if (!impl_->server.bind_to_port(options.bind, port)) {
    throw Error("cannot bind to " + options.bind + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void serve(const project::ProjectConfig& config, const ServeOptions& options) {
  Service service(config);
  const int port = service.start(options);
  std::fprintf(stderr, "serving %s on http://%s:%d\n", config.root.c_str(), options.bind.c_str(), port);
  service.wait();
}

}  // namespace slrkit::serve
