#include "cylspec/error.hpp"
#include "cylspec/study.hpp"
#include "cylspec/toml_lite.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

namespace {

int default_jobs() {
  if (const char* env = std::getenv("CYLSPEC_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral studies on long cylinders with mixed boundary conditions"};
  app.require_subcommand(1);

  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::optional<double> target_h;
  bool quiet = false, keep_going = false;
  int jobs = default_jobs();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override solver.seed");
  app.add_option("--target-h", target_h, "override mesh.target_h");
  app.add_flag("--quiet", quiet, "suppress the summary");
  app.add_option("--jobs", jobs, "worker threads (default $CYLSPEC_JOBS or 1)")->check(CLI::PositiveNumber);
  app.add_flag("--keep-going", keep_going, "record failed rows as NaN instead of aborting");

  std::string config_path;
  for (const auto& name : cylspec::study_kind_names()) {
    auto* sub = app.add_subcommand(name, name + " study");
    sub->add_option("config", config_path, "study config (.toml or .json)")->required();
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string kind_name = app.get_subcommands().front()->get_name();
  cylspec::StudyRecord rec;
  try {
    const auto kind = cylspec::parse_study_kind(kind_name);
    auto doc = cylspec::read_config_file(config_path);
    if (!doc.is_object()) throw cylspec::ConfigError("config must be a table");
    if (seed) doc["solver"]["seed"] = *seed;
    if (target_h) doc["mesh"]["target_h"] = *target_h;
    const auto cfg = cylspec::parse_study_config(doc, kind);
    rec = cylspec::run_study(cfg, {jobs, keep_going});
  } catch (const cylspec::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    cylspec::write_outputs(rec, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  if (!quiet) {
    std::printf("%s: %s\n", kind_name.c_str(), rec.failed ? "FAILED" : "ok");
    std::printf("  %s\n", rec.summary_line.c_str());
    std::printf("  %zu rows, %.2f s, outputs in %s\n", rec.rows.size(), rec.total_seconds, out_dir.c_str());
  }
  if (rec.failed) {
    std::fprintf(stderr, "solver failure: %s\n", rec.failure.c_str());
    return 3;
  }
  return 0;
}
