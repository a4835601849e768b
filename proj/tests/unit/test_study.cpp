#include <doctest.h>

#include "cylspec/error.hpp"
#include "cylspec/study.hpp"
#include "cylspec/toml_lite.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace cylspec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cylspec_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string output;
};

Run run_cli(const std::string& args, const fs::path& dir) {
  const auto log = dir / "log.txt";
  const std::string cmd = std::string(CYLSPEC_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

const char* kSmall = R"(
[geometry]
base = { kind = "interval", a = -1, b = 1 }
cross = { intervals = [[0, 1]] }

[coefficient]
entries = [["2", "0.5"], ["0.5", "1"]]

[mesh]
target_h = 0.25

[study]
ell = [2, 4]
)";

StudyConfig small(StudyKind kind) { return parse_study_config(parse_toml_lite(kSmall), kind); }

}  // namespace

TEST_SUITE("study") {

TEST_CASE("toml subset") {
  const auto doc = parse_toml_lite(R"(
# comment
title = "a \"quoted\" name"
[solver]
tol = 1e-10   # trailing
seed = 1_000
flag = true
[study]
list = [1, 2.5,
        3]
inline = { x = -1, y = [[0, 1]] }
)");
  CHECK(doc["title"] == "a \"quoted\" name");
  CHECK(doc["solver"]["tol"].get<double>() == 1e-10);
  CHECK(doc["solver"]["seed"].get<int>() == 1000);
  CHECK(doc["solver"]["flag"].get<bool>());
  CHECK(doc["study"]["list"].size() == 3);
  CHECK(doc["study"]["inline"]["y"][0][1].get<int>() == 1);
  CHECK_THROWS_WITH_AS(parse_toml_lite("a = 1\na = 2\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("[t]\n[t]\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("a = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("a = nan\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("a = \"open\n"), ConfigError);
}

TEST_CASE("config validation") {
  auto bad = [](const std::string& text, StudyKind kind = StudyKind::Convergence) {
    return parse_study_config(parse_toml_lite(text), kind);
  };
  CHECK_THROWS_WITH_AS(bad("[meshh]\ntarget_h = 0.1\n"), "unknown key 'meshh' in the config; did you mean 'mesh'?",
                       ConfigError);
  CHECK_THROWS_WITH_AS(bad("[mesh]\ntarget_hh = 0.1\n"), doctest::Contains("did you mean 'target_h'"), ConfigError);
  CHECK_THROWS_AS(bad("[study]\nell = [4, 2]\n"), ConfigError);
  CHECK_THROWS_AS(bad("[mesh]\ntarget_h = -1\n"), ConfigError);
  CHECK_THROWS_AS(bad("[coefficient]\nentries = [[\"1\", \"2\"], [\"2\", \"1\"]]\n"), ConfigError);
  CHECK_THROWS_AS(bad("[study]\nell = [4, 8]\n", StudyKind::Decay), ConfigError);
  CHECK_THROWS_AS(bad("[study]\nn = [2]\n", StudyKind::CrossSection), ConfigError);
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(parse_study_kind("upper-bound") == StudyKind::UpperBound);
  CHECK_THROWS_AS(parse_study_kind("nope"), ConfigError);
}

TEST_CASE("config round trip") {
  for (const auto& name : {"gap_m1.toml", "hexagon.toml", "bracket.toml", "cross_identity.toml"}) {
    const auto doc = read_config_file(std::string(CYLSPEC_CONFIG_DIR) + "/" + name);
    for (auto kind : {StudyKind::Convergence, StudyKind::Sweep}) {
      const auto cfg = parse_study_config(doc, kind);
      const auto echo = to_json(cfg);
      CHECK(to_json(parse_study_config(echo, kind)) == echo);
    }
  }
}

TEST_CASE("number formatting and hashing") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(2.0) == "2");
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("CSV and JSON carry the same numbers") {
  const auto rec = run_study(small(StudyKind::Convergence));
  REQUIRE_FALSE(rec.failed);
  REQUIRE(rec.rows.size() == 2);
  const auto doc = json_document(rec);
  CHECK(doc["status"] == "ok");
  CHECK(doc["columns"].size() == rec.columns.size());
  std::istringstream csv(csv_text(rec));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("ell,dofs,", 0) == 0);
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    std::getline(csv, line);
    std::istringstream fields(line);
    std::string f;
    for (std::size_t j = 0; std::getline(fields, f, ','); ++j)
      CHECK(std::strtod(f.c_str(), nullptr) == doc["rows"][i][j].get<double>());
  }
  CHECK(doc["provenance"]["seed"] == 42);
  CHECK(doc["provenance"]["code_version"] == "cylspec 1.0.0");
  CHECK(rec.summary_line.find("min_ν Z^ν") != std::string::npos);
}

TEST_CASE("outputs are deterministic") {
  const auto cfg = small(StudyKind::Convergence);
  const auto a = scratch("det_a"), b = scratch("det_b");
  write_outputs(run_study(cfg), a.string());
  write_outputs(run_study(cfg), b.string());
  for (const auto* f : {"results.csv", "results.json", "plot.svg"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(fs::exists(a / "timing.json"));
  CHECK(slurp(a / "results.json").find("seconds") == std::string::npos);
}

TEST_CASE("plots") {
  auto rec = run_study(small(StudyKind::Convergence));
  const auto svg = emit_plot(rec);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("width=\"800\"") != std::string::npos);
  CHECK(count(svg, "class=\"marker\"") == 2);
  CHECK(svg.find("stroke-dasharray=\"8,4\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray=\"2,3\"") != std::string::npos);
  rec.rows.resize(1);
  CHECK(count(emit_plot(rec), "class=\"marker\"") == 1);
  rec.rows.clear();
  CHECK_THROWS_WITH_AS(emit_plot(rec), "empty record", Error);
}

TEST_CASE("solver failures keep finished rows") {
  auto cfg = small(StudyKind::Convergence);
  cfg.dof_cap = 60;
  const auto rec = run_study(cfg);
  CHECK(rec.failed);
  CHECK(rec.rows.size() == 1);
  CHECK(csv_text(rec).find("# FAILED: dof cap exceeded") != std::string::npos);
  CHECK(json_document(rec)["status"] == "failed");

  const auto kept = run_study(cfg, RunOptions{1, true});
  CHECK_FALSE(kept.failed);
  REQUIRE(kept.rows.size() == 2);
  CHECK(std::isnan(kept.rows[1][2]));
  CHECK(json_document(kept)["status"] == "partial");
  CHECK(json_document(kept)["rows"][1][2].is_null());
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  const std::string cfgdir = CYLSPEC_CONFIG_DIR;

  const auto ok = run_cli("cross-section " + cfgdir + "/cross_identity.toml --quiet --out " + (dir / "ok").string(), dir);
  CHECK(ok.code == 0);
  CHECK(fs::exists(dir / "ok" / "results.csv"));

  const auto typo = run_cli("convergence " + cfgdir + "/typo.toml --out " + (dir / "typo").string(), dir);
  CHECK(typo.code == 2);
  CHECK(typo.output.find("'meshh'") != std::string::npos);
  CHECK(typo.output.find("'mesh'") != std::string::npos);

  const auto capped = dir / "capped.toml";
  std::ofstream(capped) << kSmall << "\n[solver]\ndof_cap = 60\n";
  const auto fail = run_cli("convergence " + capped.string() + " --quiet --out " + (dir / "fail").string(), dir);
  CHECK(fail.code == 3);
  CHECK(slurp(dir / "fail" / "results.csv").find("# FAILED:") != std::string::npos);
  const auto keep =
      run_cli("convergence " + capped.string() + " --quiet --keep-going --out " + (dir / "keep").string(), dir);
  CHECK(keep.code == 0);

  const auto missing = run_cli("convergence " + (dir / "absent.toml").string() + " --out " + dir.string(), dir);
  CHECK(missing.code != 0);
  const auto usage = run_cli("no-such-study", dir);
  CHECK(usage.code == 2);
}

}  // TEST_SUITE
