#include "slrkit/errors.hpp"
#include "slrkit/project.hpp"
#include "slrkit/serve.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

enum ExitCode { ok = 0, usage = 1, prerequisite = 2, integrity = 3 };

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "slrkit: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace slrkit;
  CLI::App app{"Stage-oriented systematic literature review toolkit"};
  std::string project_dir = ".";
  std::string config_file;
  std::optional<long> seed;
  std::vector<std::string> stages;
  std::vector<std::string> sets;
  bool serve = false;
  serve::ServeOptions serve_options;
  std::string static_dir;

  app.add_option("--project", project_dir, "Project directory")->check(CLI::ExistingDirectory);
  app.add_option("--config", config_file, "Config file (default <project>/slrkit.conf)");
  app.add_option("--seed", seed, "Random seed, overrides the config");
  app.add_option("--stage", stages, "Stage(s) to run in order: plan search select evaluate analyze synthesize report, or all")
      ->delimiter(',');
  app.add_option("--set", sets, "Config override key=value (repeatable)");
  app.add_flag("--serve", serve, "Serve the project HTTP API");
  app.add_option("--port", serve_options.port, "Port for --serve (0 picks a free port)");
  app.add_option("--bind", serve_options.bind, "Bind address for --serve");
  app.add_option("--static", static_dir, "Directory of UI assets served at / with --serve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }
  if (stages.empty() && !serve) {
    std::cerr << app.help();
    return usage;
  }

  try {
    std::map<std::string, std::string> overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (seed) overrides["seed"] = std::to_string(*seed);
    const auto config = project::load_config(
        project_dir, config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file), overrides);

    std::vector<project::Stage> plan;
    for (const auto& s : stages) {
      if (s == "all") {
        plan.insert(plan.end(), project::all_stages().begin(), project::all_stages().end());
      } else {
        plan.push_back(project::stage_from_string(s));
      }
    }
    for (const auto stage : plan) {
      const auto m = project::run_stage(stage, config);
      std::cout << project::to_string(stage) << ": run " << m.run_id << ", " << m.files.size() << " files\n";
      for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
    }
    if (serve) {
      if (!static_dir.empty()) serve_options.static_dir = static_dir;
      serve::serve(config, serve_options);
    }
  } catch (const PrerequisiteError& e) {
    return report("prerequisite", e, prerequisite);
  } catch (const IntegrityError& e) {
    return report("integrity", e, integrity);
  } catch (const ValidationError& e) {
    return report("invalid input", e, integrity);
  } catch (const IngestError& e) {
    return report("input", e, integrity);
  } catch (const ConfigError& e) {
    return report("config", e, usage);
  } catch (const LockError& e) {
    return report("locked", e, usage);
  } catch (const std::exception& e) {
    return report("error", e, usage);
  }
  return ok;
}
