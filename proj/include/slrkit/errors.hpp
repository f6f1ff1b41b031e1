#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace slrkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or decoded.
class IngestError : public Error {
 public:
  IngestError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Invalid configuration: overlapping synonym sets, unknown rq in a criterion, bad shape file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// One or more invariant violations. All of them are collected before throwing.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A stage ran before the stage that produces its inputs.
class PrerequisiteError : public Error {
 public:
  PrerequisiteError(std::string artifact, std::string producing_stage)
      : Error("missing " + artifact + " (run stage '" + producing_stage + "' first)"),
        artifact_(std::move(artifact)),
        stage_(std::move(producing_stage)) {}
  const std::string& artifact() const { return artifact_; }
  const std::string& stage() const { return stage_; }

 private:
  std::string artifact_;
  std::string stage_;
};

/// Another command holds the project lock.
class LockError : public Error {
 public:
  using Error::Error;
};

/// Shipped data or stored artifacts failed an integrity check.
class IntegrityError : public Error {
 public:
  IntegrityError(const std::string& what, std::vector<std::string> failing)
      : Error(what), failing_(std::move(failing)) {}
  const std::vector<std::string>& failing() const { return failing_; }

 private:
  std::vector<std::string> failing_;
};

}  // namespace slrkit
