#pragma once

#include "cylspec/coefficient.hpp"
#include "cylspec/geometry.hpp"
#include "cylspec/mesh.hpp"
#include "cylspec/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cylspec {

inline constexpr const char* kCodeVersion = "cylspec 1.0.0";

enum class StudyKind { CrossSection, Reduced, Sweep, Full, Convergence, Decay, UpperBound, DirichletBracket };

const char* to_string(StudyKind kind);
/// Throws ConfigError for an unknown name.
StudyKind parse_study_kind(const std::string& name);
std::vector<std::string> study_kind_names();

struct BaseConfig {
  std::string kind = "interval";  // interval | polygon | regular_polygon | disk
  double a = -1.0, b = 1.0;
  std::vector<Point2> vertices;
  int sides = 24;
  double circumradius = 1.0;  // regular_polygon; disk radius
  double rotation = 0.0;
};

struct StudyConfig {
  StudyKind kind = StudyKind::CrossSection;
  BaseConfig base;
  std::vector<Interval> cross{{0.0, 1.0}};
  std::vector<std::vector<std::string>> coefficient;  // empty: identity

  double tol = 1e-10;
  std::uint64_t seed = 42;
  int max_iter = 0;
  long dof_cap = 200000;
  double sigma = 0.0;

  double target_h = 0.125;
  MeshFamily family = MeshFamily::Simplex;

  std::vector<double> ell{2, 4, 8};
  int k = 1;
  std::vector<double> L_schedule{4, 8, 16, 32};
  std::vector<int> n;  // cross-section refinement; empty: use target_h
  std::optional<std::vector<double>> nu;
  std::optional<double> theta;
  int directions = 64;
  bool refine = false;
  std::vector<double> radii;  // empty: 1, 2, …, ⌊ℓ − 1⌋
  std::vector<double> K{2, 4};
  int face = 0;
  double rel_tol = 1e-4;
  bool require_gap = true;

  BaseSpec make_base() const;
  CrossSectionSpec make_cross() const;
  CoefficientField make_coefficient() const;
  SolveOptions solve_options(int jobs = 1) const;
};

/// Builds a StudyConfig from a parsed config document and validates every
/// parameter the given kind refers to. Unknown tables or keys raise
/// ConfigError naming the closest valid key.
StudyConfig parse_study_config(const nlohmann::ordered_json& doc, StudyKind kind);
/// Canonical echo; parse_study_config(to_json(c), c.kind) reproduces c.
nlohmann::ordered_json to_json(const StudyConfig& cfg);

/// Levenshtein distance.
int edit_distance(const std::string& a, const std::string& b);

struct StudyRecord {
  std::string study;
  nlohmann::ordered_json input;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> wall_times;  // seconds per row; written to timing.json only
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::string summary_line;
  std::optional<double> mu1;
  std::optional<double> min_Z;
  std::string x_column;
  std::vector<std::string> y_columns;
  bool failed = false;
  std::string failure;
  std::uint64_t seed = 42;
  double total_seconds = 0.0;
};

struct RunOptions {
  int jobs = 1;
  bool keep_going = false;
};

/// Runs the study. Library errors other than ConfigError are caught and
/// recorded as failed = true with the rows finished so far.
StudyRecord run_study(const StudyConfig& cfg, const RunOptions& ro = {});

/// "%.17g"; "nan" for NaN.
std::string format_number(double v);
std::uint64_t fnv1a64(const std::string& s);

std::string csv_text(const StudyRecord& rec);
nlohmann::ordered_json json_document(const StudyRecord& rec);
/// Throws Error("empty record") when there are no rows.
std::string emit_plot(const StudyRecord& rec);

/// Writes results.csv, results.json, plot.svg (when there are rows) and
/// timing.json into `dir`, creating it if needed.
void write_outputs(const StudyRecord& rec, const std::string& dir);

}  // namespace cylspec
