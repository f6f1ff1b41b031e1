#pragma once

#include "slrkit/corpus.hpp"
#include "slrkit/export.hpp"
#include "slrkit/query.hpp"
#include "slrkit/screen.hpp"
#include "slrkit/textproc.hpp"
#include "slrkit/vectorize.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slrkit::project {

namespace fs = std::filesystem;

enum class Stage { plan, search, select, evaluate, analyze, synthesize, report };

std::string to_string(Stage s);
Stage stage_from_string(std::string_view s);
const std::vector<Stage>& all_stages();

inline constexpr std::string_view kConfigFile = "slrkit.conf";
inline constexpr std::string_view kLockFile = ".slrkit.lock";
inline constexpr std::string_view kDecisionLog = "decisions.jsonl";
inline constexpr std::string_view kOverrideLog = "rq_overrides.jsonl";

/// Parsed `key = value` configuration (see docs/config.md). Relative paths are
/// resolved against the project root.
struct ProjectConfig {
  fs::path root;
  std::map<std::string, std::string> values;  // effective, defaults included

  std::vector<fs::path> bibliographies;
  fs::path corpus_dir;
  std::optional<fs::path> rq_file;
  std::optional<fs::path> criteria_file;
  std::optional<fs::path> synonyms_file;
  std::optional<fs::path> stopwords_file;
  std::optional<fs::path> annotations_dir;
  std::optional<fs::path> claims_file;
  std::optional<fs::path> resolutions_file;
  std::optional<fs::path> shapes_file;
  std::optional<fs::path> likert_file;

  std::uint64_t seed = 0;
  std::vector<std::string> seed_docs;
  textproc::PipelineConfig pipeline;
  vectorize::EmbeddingOptions embedding;
  double alpha = 0.0;
  double duplicate_threshold = 0.9;
  double synonym_min_cosine = 0.7;
  int suggest_top_n = 20;
  emit::VaultOptions vault;
  double edge_threshold = 0.2;
  std::map<std::string, std::vector<std::string>> comparisons;  // rq id -> properties
  std::vector<screen::PartitionSpec> partitions;

  /// SHA-256 of the effective key/value set.
  std::string hash() const;
};

std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Reads `<root>/slrkit.conf` (or `config_file`), applies `overrides`, checks that
/// every referenced path exists. Throws ConfigError.
ProjectConfig load_config(const fs::path& root, const std::optional<fs::path>& config_file = std::nullopt,
                          const std::map<std::string, std::string>& overrides = {});

/// Exclusive project lock held for the lifetime of the object.
class ProjectLock {
 public:
  explicit ProjectLock(const fs::path& root, std::string holder);
  ~ProjectLock();
  ProjectLock(const ProjectLock&) = delete;
  ProjectLock& operator=(const ProjectLock&) = delete;

  static bool held(const fs::path& root);

 private:
  fs::path path_;
};

struct EmittedFile {
  std::string path;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunManifest {
  int run_id = 0;
  std::string stage;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, std::string> inputs;    // relative path -> sha256
  std::map<std::string, int> upstream;          // stage -> run id
  std::string started;
  std::string finished;
  std::vector<EmittedFile> files;
  std::vector<std::string> warnings;
};

nlohmann::json manifest_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Runs directory of the most recent completed run of `stage`.
std::optional<fs::path> latest_run(const fs::path& root, Stage stage);

/// Runs one stage into a fresh `runs/<id>/` directory. Throws PrerequisiteError
/// when an upstream stage has not run.
RunManifest run_stage(Stage stage, const ProjectConfig& config);

// --- shared project state, used by stages and the HTTP service ---

struct CorpusState {
  std::vector<Document> docs;  // sorted by id
  corpus::ParseReport report;
};

CorpusState ingest(const ProjectConfig& config);

/// RQ file plus the weight overrides recorded in rq_overrides.jsonl.
std::vector<query::ResearchQuestion> load_rqs(const ProjectConfig& config);
void append_weight_override(const fs::path& root, const std::string& rq_id, const std::map<std::string, double>& weights);

/// Criterion records of the latest evaluate run followed by the manual log.
screen::DecisionLog load_decision_log(const ProjectConfig& config);
void append_manual_decision(const fs::path& root, const screen::DecisionRecord& record);

/// Annotation streams: one per file in the annotations directory, sorted by name.
std::vector<std::vector<screen::Annotation>> load_annotation_streams(const ProjectConfig& config);
fs::path api_annotation_file(const ProjectConfig& config);

/// Index, tf-idf and embeddings from the latest select run.
struct SelectArtifacts {
  int run_id = 0;
  vectorize::TermIndex index;
  std::map<std::string, DocVector> tfidf;
  vectorize::EmbeddingModel model;
  std::map<std::string, DocVector> doc_embeddings;
  vectorize::SimilarityMatrix similarity_tfidf;
};

SelectArtifacts load_select(const ProjectConfig& config);

std::vector<query::Ranking> rank_all(const std::vector<query::ResearchQuestion>& rqs, const SelectArtifacts& a,
                                     double alpha);

/// Pretty JSON with a trailing newline, the format of every JSON artifact.
std::string dump(const nlohmann::json& j);

}  // namespace slrkit::project
