#pragma once

#include "slrkit/project.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace slrkit::serve {

struct ServeOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP API over one project directory. Reads come from a snapshot that is rebuilt
/// whenever a run, log or annotation file changes; writes append to the same logs
/// as the CLI and fail with 409 while a stage holds the project lock.
class Service {
 public:
  /// Throws PrerequisiteError when the project has no select run.
  explicit Service(project::ProjectConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start(const ServeOptions& options);
  /// Blocks until stop() is called.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocking convenience wrapper used by the CLI.
void serve(const project::ProjectConfig& config, const ServeOptions& options);

}  // namespace slrkit::serve
