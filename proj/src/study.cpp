#include "cylspec/study.hpp"

#include "cylspec/error.hpp"
#include "cylspec/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace cylspec {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<StudyKind, const char*>>& kind_table() {
  static const std::vector<std::pair<StudyKind, const char*>> t{
      {StudyKind::CrossSection, "cross-section"}, {StudyKind::Reduced, "reduced"},
      {StudyKind::Sweep, "sweep"},                {StudyKind::Full, "full"},
      {StudyKind::Convergence, "convergence"},    {StudyKind::Decay, "decay"},
      {StudyKind::UpperBound, "upper-bound"},     {StudyKind::DirichletBracket, "dirichlet-bracket"}};
  return t;
}

// ---- config reading ----

std::string nearest(const std::string& key, const std::vector<std::string>& allowed) {
  std::string best;
  int bd = std::numeric_limits<int>::max();
  for (const auto& a : allowed) {
    const int d = edit_distance(key, a);
    if (d < bd) {
      bd = d;
      best = a;
    }
  }
  return best;
}

void check_keys(const ojson& obj, const std::string& where, const std::vector<std::string>& allowed) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) != allowed.end()) continue;
    throw ConfigError("unknown key '" + k + "' in " + where + "; did you mean '" + nearest(k, allowed) + "'?");
  }
}

const ojson& table(const ojson& doc, const std::string& name) {
  static const ojson empty = ojson::object();
  if (!doc.contains(name)) return empty;
  const ojson& t = doc.at(name);
  if (!t.is_object()) throw ConfigError("[" + name + "] must be a table");
  return t;
}

double as_double(const ojson& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(what + " must be finite");
  return d;
}

long long as_int(const ojson& v, const std::string& what) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(what + " must be an integer");
}

bool as_bool(const ojson& v, const std::string& what) {
  if (!v.is_boolean()) throw ConfigError(what + " must be true or false");
  return v.get<bool>();
}

std::string as_string(const ojson& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be a string");
  return v.get<std::string>();
}

// A number or an array of numbers.
std::vector<double> as_doubles(const ojson& v, const std::string& what) {
  if (v.is_number()) return {as_double(v, what)};
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a number or a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_double(x, what));
  return out;
}

void require_ascending_positive(const std::vector<double>& v, const std::string& what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw ConfigError(what + " values must be positive");
    if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(what + " values must be strictly ascending");
  }
}

std::string entry_string(const ojson& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  throw ConfigError("coefficient entries must be strings or numbers");
}

ojson doubles_json(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(x);
  return a;
}

// ---- running ----

struct RowOutcome {
  std::vector<double> row;
  double seconds = 0.0;
  std::string error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Evaluates fn(i) for i < n on the worker pool and appends rows in index
// order. Without keep_going the first failing row ends the study; with it,
// failed rows become {param, NaN, …}.
template <class Fn>
void collect_rows(StudyRecord& rec, const std::vector<double>& params, const RunOptions& ro, Fn fn) {
  const int n = static_cast<int>(params.size());
  const auto out = parallel_map(n, ro.jobs, [&](int i) {
    RowOutcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o.row = fn(i);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      o.error = e.what();
    } catch (const std::bad_alloc&) {
      o.error = "out of memory";
    }
    o.seconds = seconds_since(t0);
    return o;
  });
  int nan_rows = 0;
  for (int i = 0; i < n; ++i) {
    if (out[i].error.empty()) {
      rec.rows.push_back(out[i].row);
      rec.wall_times.push_back(out[i].seconds);
      continue;
    }
    if (!ro.keep_going) throw Error(out[i].error);
    std::vector<double> row(rec.columns.size(), kNaN);
    row[0] = params[i];
    rec.rows.push_back(row);
    rec.wall_times.push_back(out[i].seconds);
    ++nan_rows;
    if (rec.failure.empty()) rec.failure = out[i].error;
  }
  if (nan_rows > 0) rec.summary["nan_rows"] = nan_rows;
}

std::vector<std::string> eigen_columns(const std::string& param, const std::string& name, int k) {
  std::vector<std::string> c{param, "dofs"};
  for (int j = 1; j <= k; ++j) c.push_back(name + "_" + std::to_string(j));
  for (int j = 1; j <= k; ++j) c.push_back("residual_" + std::to_string(j));
  return c;
}

std::vector<double> eigen_row(double param, const FullResult& r, int k) {
  std::vector<double> row{param, static_cast<double>(r.dofs)};
  for (int j = 0; j < k; ++j) row.push_back(r.eig.values[j]);
  for (int j = 0; j < k; ++j) row.push_back(r.eig.residuals[j]);
  return row;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

CylinderSpec cylinder(const StudyConfig& cfg, double ell) { return {cfg.make_base(), cfg.make_cross(), ell}; }

Direction configured_direction(const StudyConfig& cfg, int m) {
  if (cfg.nu) return Direction(*cfg.nu);
  if (m == 2) return Direction::from_angle(cfg.theta.value_or(0.0));
  return Direction({1.0});
}

SweepOptions sweep_options(const StudyConfig& cfg, const RunOptions& ro) {
  SweepOptions sw;
  sw.directions = cfg.directions;
  sw.refine = cfg.refine;
  sw.L_schedule = cfg.L_schedule;
  sw.target_h = cfg.target_h;
  sw.rel_tol = cfg.rel_tol;
  sw.keep_going = ro.keep_going;
  return sw;
}

std::vector<double> default_radii(double ell) {
  std::vector<double> r;
  for (int i = 1; i <= static_cast<int>(std::floor(ell - 1.0 + 1e-9)); ++i) r.push_back(i);
  return r;
}

void run_cross_section(const StudyConfig& cfg, const RunOptions& ro, StudyRecord& rec) {
  const auto cross = cfg.make_cross();
  const auto a = cfg.make_coefficient();
  const auto opt = cfg.solve_options();
  rec.columns = {"n", "dofs", "mu1", "residual", "gap_indicator"};
  rec.x_column = "n";
  rec.y_columns = {"mu1"};
  std::vector<double> params;
  if (cfg.n.empty())
    params.push_back(subdivisions(cross[0].length(), cfg.target_h));
  else
    for (int n : cfg.n) params.push_back(n);
  collect_rows(rec, params, ro, [&](int i) {
    const auto cs = cfg.n.empty() ? solve_cross_section_h(cross, a, cfg.target_h, opt)
                                  : solve_cross_section(cross, a, cfg.n[i], opt);
    return std::vector<double>{params[i], static_cast<double>(cs.dofs), cs.mu1, cs.residual, cs.gap_indicator};
  });
  const auto& last = rec.rows.back();
  const double mu1 = last[2], gi = last[4];
  const bool gap = gi > 1e-8 * std::sqrt(mu1);
  rec.mu1 = mu1;
  rec.summary["mu1"] = mu1;
  rec.summary["gap_indicator"] = gi;
  rec.summary["gap_condition"] = gap;
  const std::string prediction = gap ? "gap: lim λ_ℓ < μ₁" : "no gap: λ_ℓ = μ₁";
  rec.summary["prediction"] = prediction;
  rec.summary_line = "μ₁ = " + fmt("%.10g", mu1) + ", gap_indicator = " + fmt("%.6g", gi) + ", prediction: " + prediction;
}

void run_reduced(const StudyConfig& cfg, const RunOptions&, StudyRecord& rec) {
  const auto cross = cfg.make_cross();
  const auto a = cfg.make_coefficient();
  const auto opt = cfg.solve_options();
  const Direction nu = configured_direction(cfg, a.m());
  rec.columns = {"L", "dofs", "Z_L", "residual"};
  rec.x_column = "L";
  rec.y_columns = {"Z_L"};
  const auto cs = solve_cross_section_h(cross, a, cfg.target_h, opt);
  rec.mu1 = cs.mu1;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = solve_reduced(a, nu, cross, cfg.L_schedule, cfg.target_h, opt, cfg.rel_tol);
  const double secs = seconds_since(t0) / r.L_values.size();
  for (std::size_t i = 0; i < r.L_values.size(); ++i) {
    rec.rows.push_back({r.L_values[i], static_cast<double>(r.dofs[i]), r.Z_L[i], r.residuals[i]});
    rec.wall_times.push_back(secs);
  }
  rec.summary["nu"] = std::vector<double>(nu.components().begin(), nu.components().end());
  rec.summary["Z_extrap"] = r.Z_extrap;
  rec.summary["converged"] = r.converged;
  rec.summary["mu1"] = cs.mu1;
  rec.summary["gap"] = cs.mu1 - r.Z_extrap;
  rec.summary_line = "Z^ν = " + fmt("%.10g", r.Z_extrap) + (r.converged ? " (converged)" : " (not converged)") +
                     ", μ₁ = " + fmt("%.10g", cs.mu1) + ", gap vs μ₁ = " + fmt("%.6g", cs.mu1 - r.Z_extrap);
}

SweepResult sweep_into(const StudyConfig& cfg, const RunOptions& ro, StudyRecord* rec) {
  const auto a = cfg.make_coefficient();
  auto opt = cfg.solve_options(ro.jobs);
  const auto t0 = std::chrono::steady_clock::now();
  auto sw = sweep_directions(a, cfg.make_cross(), sweep_options(cfg, ro), opt);
  if (rec) {
    auto samples = sw.samples;
    std::stable_sort(samples.begin(), samples.end(),
                     [](const DirectionSample& x, const DirectionSample& y) { return x.theta < y.theta; });
    const double secs = seconds_since(t0) / samples.size();
    for (const auto& s : samples) {
      std::vector<double> row{s.theta, s.nu[0]};
      if (a.m() == 2) row.push_back(s.nu[1]);
      row.insert(row.end(), {s.Z, s.converged ? 1.0 : 0.0, s.residual, static_cast<double>(s.dofs)});
      rec->rows.push_back(row);
      rec->wall_times.push_back(secs);
    }
  }
  return sw;
}

void run_sweep(const StudyConfig& cfg, const RunOptions& ro, StudyRecord& rec) {
  const auto a = cfg.make_coefficient();
  rec.columns = a.m() == 2 ? std::vector<std::string>{"theta", "nu_1", "nu_2", "Z", "converged", "residual", "dofs"}
                           : std::vector<std::string>{"theta", "nu_1", "Z", "converged", "residual", "dofs"};
  rec.x_column = "theta";
  rec.y_columns = {"Z"};
  const auto cs = solve_cross_section_h(cfg.make_cross(), a, cfg.target_h, cfg.solve_options());
  rec.mu1 = cs.mu1;
  const auto sw = sweep_into(cfg, ro, &rec);
  rec.min_Z = sw.min_value;
  int nan_rows = 0;
  for (const auto& s : sw.samples)
    if (std::isnan(s.Z)) ++nan_rows;
  if (nan_rows) rec.summary["nan_rows"] = nan_rows;
  rec.summary["min_Z"] = sw.min_value;
  rec.summary["argmin_theta"] = sw.argmin_theta;
  rec.summary["argmin_nu"] = std::vector<double>(sw.argmin.components().begin(), sw.argmin.components().end());
  rec.summary["grid_size"] = sw.grid_size;
  rec.summary["max_jump"] = sw.max_jump;
  rec.summary["jump_bound"] = sw.jump_bound;
  rec.summary["continuous"] = sw.continuous;
  rec.summary["mu1"] = cs.mu1;
  rec.summary["gap"] = cs.mu1 - sw.min_value;
  rec.summary_line = "min_ν Z^ν = " + fmt("%.10g", sw.min_value) + " at θ = " + fmt("%.6g", sw.argmin_theta) +
                     ", μ₁ = " + fmt("%.10g", cs.mu1) + ", gap vs μ₁ = " + fmt("%.6g", cs.mu1 - sw.min_value);
}

void ell_rows(const StudyConfig& cfg, const RunOptions& ro, StudyRecord& rec, BoundaryMode bc, const char* name) {
  const auto a = cfg.make_coefficient();
  const auto opt = cfg.solve_options();
  rec.columns = eigen_columns("ell", name, cfg.k);
  rec.x_column = "ell";
  for (int j = 1; j <= cfg.k; ++j) rec.y_columns.push_back(std::string(name) + "_" + std::to_string(j));
  collect_rows(rec, cfg.ell, ro, [&](int i) {
    const auto r = solve_full(cylinder(cfg, cfg.ell[i]), a, cfg.k, cfg.target_h, bc, opt);
    return eigen_row(cfg.ell[i], r, cfg.k);
  });
}

double cross_mu1(const StudyConfig& cfg) {
  return solve_cross_section_h(cfg.make_cross(), cfg.make_coefficient(), cfg.target_h, cfg.solve_options()).mu1;
}

void run_full(const StudyConfig& cfg, const RunOptions& ro, StudyRecord& rec) {
  const double mu1 = cross_mu1(cfg);
  rec.mu1 = mu1;
  rec.summary["mu1"] = mu1;
  ell_rows(cfg, ro, rec, BoundaryMode::Mixed, "lambda");
  const auto& last = rec.rows.back();
  rec.summary["lambda_1"] = last[2];
  rec.summary_line = "λ_" + fmt("%g", last[0]) + " = " + fmt("%.10g", last[2]) + ", μ₁ = " + fmt("%.10g", mu1) +
                     ", gap vs μ₁ = " + fmt("%.6g", mu1 - last[2]);
}

void run_convergence(const StudyConfig& cfg, const RunOptions& ro, StudyRecord& rec) {
  const double mu1 = cross_mu1(cfg);
  rec.mu1 = mu1;
  rec.summary["mu1"] = mu1;
  ell_rows(cfg, ro, rec, BoundaryMode::Mixed, "lambda");
  rec.y_columns = {"lambda_1"};
  const auto sw = sweep_into(cfg, ro, nullptr);
  rec.min_Z = sw.min_value;
  bool decreasing = true;
  for (std::size_t i = 1; i < rec.rows.size(); ++i)
    if (!(rec.rows[i][2] < rec.rows[i - 1][2])) decreasing = false;
  const double last = rec.rows.back()[2];
  rec.summary["min_Z"] = sw.min_value;
  rec.summary["argmin_theta"] = sw.argmin_theta;
  rec.summary["lambda_last"] = last;
  rec.summary["decreasing"] = decreasing;
  rec.summary["relative_distance"] = std::abs(last - sw.min_value) / sw.min_value;
  rec.summary["gap"] = mu1 - sw.min_value;
  rec.summary_line = "min_ν Z^ν = " + fmt("%.10g", sw.min_value) + ", λ_" + fmt("%g", rec.rows.back()[0]) + " = " +
                     fmt("%.10g", last) + ", gap vs μ₁ = " + fmt("%.6g", mu1 - sw.min_value);
}

void run_decay(const StudyConfig& cfg, const RunOptions&, StudyRecord& rec) {
  const double ell = cfg.ell.front();
  const auto a = cfg.make_coefficient();
  const auto opt = cfg.solve_options();
  const auto cyl = cylinder(cfg, ell);
  const auto radii = cfg.radii.empty() ? default_radii(ell) : cfg.radii;
  rec.columns = {"r", "mass", "gradient_mass", "shell_density", "log_shell_density", "residual", "dofs"};
  rec.x_column = "r";
  rec.y_columns = {"log_shell_density"};
  const auto cs = solve_cross_section_h(cfg.make_cross(), a, cfg.target_h, opt);
  rec.summary["mu1"] = cs.mu1;
  rec.summary["gap_indicator"] = cs.gap_indicator;
  if (cfg.require_gap && !gap_condition_holds(cs)) throw Error("decay lemma hypotheses not met");
  const auto t0 = std::chrono::steady_clock::now();
  const auto full = solve_full(cyl, a, 1, cfg.target_h, BoundaryMode::Mixed, opt);
  const auto d = decay_profile(cyl, full, radii);
  const double secs = seconds_since(t0) / radii.size();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    rec.rows.push_back({radii[i], d.masses[i], d.gradient_masses[i], d.shell_densities[i],
                        std::log(d.shell_densities[i]), full.eig.residuals[0], static_cast<double>(full.dofs)});
    rec.wall_times.push_back(secs);
  }
  rec.summary["lambda_1"] = full.eig.values[0];
  rec.summary["total_mass"] = d.total_mass;
  rec.summary["slope"] = d.slope;
  rec.summary_line = "decay slope = " + fmt("%.6g", d.slope) + " per unit of ℓ − r, λ_" + fmt("%g", ell) + " = " +
                     fmt("%.10g", full.eig.values[0]) + ", μ₁ = " + fmt("%.10g", cs.mu1);
}

void run_upper_bound(const StudyConfig& cfg, const RunOptions& ro, StudyRecord& rec) {
  const double ell = cfg.ell.front();
  const auto a = cfg.make_coefficient();
  const auto opt = cfg.solve_options();
  const auto cyl = cylinder(cfg, ell);
  rec.columns = {"K", "quotient", "Z_K", "excess", "residual", "lambda_1", "lambda_residual", "dofs"};
  rec.x_column = "K";
  rec.y_columns = {"quotient", "Z_K"};
  const auto full = solve_full(cyl, a, 1, cfg.target_h, BoundaryMode::Mixed, opt);
  rec.mu1 = cross_mu1(cfg);
  collect_rows(rec, cfg.K, ro, [&](int i) {
    const auto u = upper_bound_quotient(cyl, a, cfg.face, cfg.K[i], cfg.target_h, full, opt);
    return std::vector<double>{cfg.K[i], u.quotient, u.Z_K, u.quotient - u.Z_K, u.residual,
                               full.eig.values[0], full.eig.residuals[0], static_cast<double>(full.dofs)};
  });
  bool above = true, decreasing = true;
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    if (!(rec.rows[i][1] >= full.eig.values[0])) above = false;
    if (i > 0 && !(rec.rows[i][1] < rec.rows[i - 1][1])) decreasing = false;
  }
  const Direction nu = outward_normals(cyl.base())[cfg.face].normal;
  rec.summary["nu"] = std::vector<double>(nu.components().begin(), nu.components().end());
  rec.summary["lambda_1"] = full.eig.values[0];
  rec.summary["all_above_lambda"] = above;
  rec.summary["decreasing"] = decreasing;
  rec.summary_line = "λ_" + fmt("%g", ell) + " = " + fmt("%.10g", full.eig.values[0]) + ", upper bound at K = " +
                     fmt("%g", rec.rows.back()[0]) + ": " + fmt("%.10g", rec.rows.back()[1]);
}

void run_bracket(const StudyConfig& cfg, const RunOptions& ro, StudyRecord& rec) {
  const double mu1 = cross_mu1(cfg);
  rec.mu1 = mu1;
  rec.summary["mu1"] = mu1;
  ell_rows(cfg, ro, rec, BoundaryMode::Dirichlet, "sigma");
  rec.y_columns = {"sigma_1"};
  double min_excess = std::numeric_limits<double>::infinity();
  std::vector<double> lx, ly;
  for (const auto& row : rec.rows) {
    for (int j = 0; j < cfg.k; ++j) min_excess = std::min(min_excess, row[2 + j] - mu1);
    if (row[2] - mu1 > 0.0) {
      lx.push_back(std::log(row[0]));
      ly.push_back(std::log(row[2] - mu1));
    }
  }
  const double slope = lx.size() >= 2 && lx.size() == rec.rows.size() ? fit_slope(lx, ly) : kNaN;
  rec.summary["min_excess"] = min_excess;
  rec.summary["loglog_slope"] = slope;
  rec.summary_line = "σ_ℓ¹ − μ₁ log-log slope = " + fmt("%.6g", slope) + ", min σ − μ₁ = " + fmt("%.6g", min_excess) +
                     ", μ₁ = " + fmt("%.10g", mu1);
}

// ---- plotting ----

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0})
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

}  // namespace

const char* to_string(StudyKind kind) {
  for (const auto& [k, name] : kind_table())
    if (k == kind) return name;
  return "?";
}

StudyKind parse_study_kind(const std::string& name) {
  for (const auto& [k, n] : kind_table())
    if (name == n) return k;
  throw ConfigError("unknown study kind '" + name + "'; did you mean '" + nearest(name, study_kind_names()) + "'?");
}

std::vector<std::string> study_kind_names() {
  std::vector<std::string> out;
  for (const auto& [k, n] : kind_table()) out.push_back(n);
  return out;
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

BaseSpec StudyConfig::make_base() const {
  if (base.kind == "interval") return BaseSpec::interval(base.a, base.b);
  if (base.kind == "polygon") return BaseSpec::polygon(base.vertices);
  return regular_polygon(base.sides, base.circumradius, base.rotation);
}

CrossSectionSpec StudyConfig::make_cross() const { return CrossSectionSpec(cross); }

CoefficientField StudyConfig::make_coefficient() const {
  const int m = base.kind == "interval" ? 1 : 2;
  const int p = static_cast<int>(cross.size());
  if (coefficient.empty()) return CoefficientField::identity(m, p);
  return CoefficientField::parse(m, p, coefficient);
}

SolveOptions StudyConfig::solve_options(int jobs) const {
  SolveOptions o;
  o.eig.tol = tol;
  o.eig.seed = seed;
  o.eig.max_iter = max_iter;
  o.eig.sigma = sigma;
  o.family = family;
  o.dof_cap = dof_cap;
  o.jobs = jobs;
  return o;
}

StudyConfig parse_study_config(const ojson& doc, StudyKind kind) {
  if (!doc.is_object()) throw ConfigError("config must be a table");
  check_keys(doc, "the config", {"geometry", "coefficient", "solver", "mesh", "study"});
  StudyConfig c;
  c.kind = kind;

  const ojson& geo = table(doc, "geometry");
  check_keys(geo, "[geometry]", {"base", "cross"});
  if (geo.contains("base")) {
    const ojson& b = geo.at("base");
    if (!b.is_object()) throw ConfigError("geometry.base must be an inline table");
    if (!b.contains("kind")) throw ConfigError("geometry.base needs a kind");
    c.base.kind = as_string(b.at("kind"), "geometry.base.kind");
    const std::string& k = c.base.kind;
    if (k == "interval") {
      check_keys(b, "geometry.base", {"kind", "a", "b"});
      if (b.contains("a")) c.base.a = as_double(b.at("a"), "geometry.base.a");
      if (b.contains("b")) c.base.b = as_double(b.at("b"), "geometry.base.b");
    } else if (k == "polygon") {
      check_keys(b, "geometry.base", {"kind", "vertices"});
      if (!b.contains("vertices") || !b.at("vertices").is_array())
        throw ConfigError("geometry.base.vertices must be an array of [x, y] pairs");
      for (const auto& v : b.at("vertices")) {
        if (!v.is_array() || v.size() != 2) throw ConfigError("geometry.base.vertices must be an array of [x, y] pairs");
        c.base.vertices.push_back({as_double(v[0], "vertex coordinate"), as_double(v[1], "vertex coordinate")});
      }
    } else if (k == "regular_polygon") {
      check_keys(b, "geometry.base", {"kind", "sides", "circumradius", "rotation"});
      c.base.sides = 6;
      if (b.contains("sides")) c.base.sides = static_cast<int>(as_int(b.at("sides"), "geometry.base.sides"));
      if (b.contains("circumradius")) c.base.circumradius = as_double(b.at("circumradius"), "geometry.base.circumradius");
      if (b.contains("rotation")) c.base.rotation = as_double(b.at("rotation"), "geometry.base.rotation");
    } else if (k == "disk") {
      check_keys(b, "geometry.base", {"kind", "radius", "sides"});
      if (b.contains("radius")) c.base.circumradius = as_double(b.at("radius"), "geometry.base.radius");
      if (b.contains("sides")) c.base.sides = static_cast<int>(as_int(b.at("sides"), "geometry.base.sides"));
    } else {
      throw ConfigError("unknown geometry.base.kind '" + k + "'; did you mean '" +
                        nearest(k, {"interval", "polygon", "regular_polygon", "disk"}) + "'?");
    }
  }
  if (geo.contains("cross")) {
    const ojson& x = geo.at("cross");
    if (!x.is_object()) throw ConfigError("geometry.cross must be an inline table");
    check_keys(x, "geometry.cross", {"intervals"});
    if (!x.contains("intervals") || !x.at("intervals").is_array())
      throw ConfigError("geometry.cross.intervals must be an array of [a, b] pairs");
    c.cross.clear();
    for (const auto& v : x.at("intervals")) {
      if (!v.is_array() || v.size() != 2) throw ConfigError("geometry.cross.intervals must be an array of [a, b] pairs");
      c.cross.push_back({as_double(v[0], "interval end"), as_double(v[1], "interval end")});
    }
  }

  const ojson& co = table(doc, "coefficient");
  check_keys(co, "[coefficient]", {"entries", "identity"});
  if (co.contains("identity") && co.contains("entries"))
    throw ConfigError("[coefficient] takes either entries or identity, not both");
  if (co.contains("identity") && !as_bool(co.at("identity"), "coefficient.identity"))
    throw ConfigError("coefficient.identity = false needs entries");
  if (co.contains("entries")) {
    const ojson& e = co.at("entries");
    if (!e.is_array()) throw ConfigError("coefficient.entries must be an array of rows");
    for (const auto& row : e) {
      if (!row.is_array()) throw ConfigError("coefficient.entries must be an array of rows");
      std::vector<std::string> r;
      for (const auto& x : row) r.push_back(entry_string(x));
      c.coefficient.push_back(std::move(r));
    }
  }

  const ojson& so = table(doc, "solver");
  check_keys(so, "[solver]", {"tol", "seed", "max_iter", "dof_cap", "sigma"});
  if (so.contains("tol")) c.tol = as_double(so.at("tol"), "solver.tol");
  if (so.contains("seed")) {
    const ojson& s = so.at("seed");
    if (s.is_number_unsigned()) c.seed = s.get<std::uint64_t>();
    else {
      const long long v = as_int(s, "solver.seed");
      if (v < 0) throw ConfigError("solver.seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(v);
    }
  }
  if (so.contains("max_iter")) c.max_iter = static_cast<int>(as_int(so.at("max_iter"), "solver.max_iter"));
  if (so.contains("dof_cap")) c.dof_cap = static_cast<long>(as_int(so.at("dof_cap"), "solver.dof_cap"));
  if (so.contains("sigma")) c.sigma = as_double(so.at("sigma"), "solver.sigma");

  const ojson& me = table(doc, "mesh");
  check_keys(me, "[mesh]", {"target_h", "family"});
  if (me.contains("target_h")) c.target_h = as_double(me.at("target_h"), "mesh.target_h");
  if (me.contains("family")) {
    const std::string f = as_string(me.at("family"), "mesh.family");
    if (f == "simplex") c.family = MeshFamily::Simplex;
    else if (f == "tensor") c.family = MeshFamily::Tensor;
    else throw ConfigError("mesh.family must be \"simplex\" or \"tensor\"");
  }

  const ojson& st = table(doc, "study");
  check_keys(st, "[study]", {"kind", "ell", "k", "L_schedule", "n", "nu", "theta", "directions", "refine", "radii", "K",
                             "face", "rel_tol", "require_gap"});
  if (st.contains("kind") && as_string(st.at("kind"), "study.kind") != to_string(kind))
    throw ConfigError("study.kind '" + st.at("kind").get<std::string>() + "' does not match the subcommand '" +
                      to_string(kind) + "'");
  if (st.contains("ell")) c.ell = as_doubles(st.at("ell"), "study.ell");
  if (st.contains("k")) c.k = static_cast<int>(as_int(st.at("k"), "study.k"));
  if (st.contains("L_schedule")) c.L_schedule = as_doubles(st.at("L_schedule"), "study.L_schedule");
  if (st.contains("n"))
    for (double v : as_doubles(st.at("n"), "study.n")) {
      if (v != std::floor(v)) throw ConfigError("study.n values must be integers");
      c.n.push_back(static_cast<int>(v));
    }
  if (st.contains("nu")) c.nu = as_doubles(st.at("nu"), "study.nu");
  if (st.contains("theta")) c.theta = as_double(st.at("theta"), "study.theta");
  if (st.contains("directions")) c.directions = static_cast<int>(as_int(st.at("directions"), "study.directions"));
  if (st.contains("refine")) c.refine = as_bool(st.at("refine"), "study.refine");
  if (st.contains("radii")) c.radii = as_doubles(st.at("radii"), "study.radii");
  if (st.contains("K")) c.K = as_doubles(st.at("K"), "study.K");
  if (st.contains("face")) c.face = static_cast<int>(as_int(st.at("face"), "study.face"));
  if (st.contains("rel_tol")) c.rel_tol = as_double(st.at("rel_tol"), "study.rel_tol");
  if (st.contains("require_gap")) c.require_gap = as_bool(st.at("require_gap"), "study.require_gap");

  // Validation of everything the study will touch.
  std::optional<BaseSpec> base;
  try {
    base = c.make_base();
    (void)c.make_cross();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid geometry: ") + e.what());
  }
  const int m = base->dim();
  const int p = static_cast<int>(c.cross.size());
  if (p < 1 || p > 2) throw ConfigError("the cross-section needs 1 or 2 intervals");
  if (m + p > 3) throw ConfigError("m + p must be at most 3");
  try {
    const auto a = c.make_coefficient();
    verify_ellipticity(a, c.make_cross(), 64);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid coefficient: ") + e.what());
  }
  if (!(c.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (c.max_iter < 0) throw ConfigError("solver.max_iter must be nonnegative");
  if (c.dof_cap < 1) throw ConfigError("solver.dof_cap must be positive");
  if (!(c.target_h > 0.0)) throw ConfigError("mesh.target_h must be positive");
  if (c.family == MeshFamily::Tensor && m == 2 && !base->is_axis_box())
    throw ConfigError("mesh.family = \"tensor\" needs an axis-aligned box base");
  require_ascending_positive(c.ell, "study.ell");
  if (c.k < 1) throw ConfigError("study.k must be at least 1");
  require_ascending_positive(c.L_schedule, "study.L_schedule");
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    if (c.n[i] < 4) throw ConfigError("study.n values must be at least 4");
    if (i > 0 && c.n[i] <= c.n[i - 1]) throw ConfigError("study.n values must be strictly ascending");
  }
  if (c.nu && c.theta) throw ConfigError("study takes either nu or theta, not both");
  if (c.theta && m != 2) throw ConfigError("study.theta needs a polygon base");
  if (c.nu) {
    if (static_cast<int>(c.nu->size()) != m) throw ConfigError("study.nu must have m components");
    try {
      Direction d(*c.nu);
    } catch (const Error& e) {
      throw ConfigError(std::string("study.nu: ") + e.what());
    }
  }
  if (m == 2 && c.directions < 3) throw ConfigError("study.directions must be at least 3");
  require_ascending_positive(c.K, "study.K");
  if (!(c.rel_tol > 0.0)) throw ConfigError("study.rel_tol must be positive");
  if ((kind == StudyKind::Decay || kind == StudyKind::UpperBound) && c.ell.size() != 1)
    throw ConfigError(std::string(to_string(kind)) + " studies take a single ell value");
  if (kind == StudyKind::Decay) {
    const auto r = c.radii.empty() ? default_radii(c.ell[0]) : c.radii;
    if (r.size() < 2) throw ConfigError("decay needs at least two radii (ell >= 3 for the default radii)");
    require_ascending_positive(r, "study.radii");
    if (r.back() > c.ell[0] - 1.0 + 1e-12) throw ConfigError("study.radii must not exceed ell - 1");
  }
  if (kind == StudyKind::UpperBound) {
    const int faces = static_cast<int>(outward_normals(*base).size());
    if (c.face < 0 || c.face >= faces)
      throw ConfigError("study.face must lie in [0, " + std::to_string(faces - 1) + "]");
  }
  if (kind == StudyKind::DirichletBracket && c.ell.size() < 2)
    throw ConfigError("dirichlet-bracket needs at least two ell values");
  return c;
}

ojson to_json(const StudyConfig& c) {
  ojson doc = ojson::object();
  ojson base = ojson::object();
  base["kind"] = c.base.kind;
  if (c.base.kind == "interval") {
    base["a"] = c.base.a;
    base["b"] = c.base.b;
  } else if (c.base.kind == "polygon") {
    ojson v = ojson::array();
    for (const auto& p : c.base.vertices) v.push_back({p[0], p[1]});
    base["vertices"] = v;
  } else if (c.base.kind == "regular_polygon") {
    base["sides"] = c.base.sides;
    base["circumradius"] = c.base.circumradius;
    base["rotation"] = c.base.rotation;
  } else {
    base["radius"] = c.base.circumradius;
    base["sides"] = c.base.sides;
  }
  ojson iv = ojson::array();
  for (const auto& x : c.cross) iv.push_back({x.a, x.b});
  doc["geometry"] = {{"base", base}, {"cross", {{"intervals", iv}}}};
  if (c.coefficient.empty())
    doc["coefficient"] = {{"identity", true}};
  else
    doc["coefficient"] = {{"entries", c.coefficient}};
  doc["solver"] = {{"tol", c.tol}, {"seed", c.seed}, {"max_iter", c.max_iter}, {"dof_cap", c.dof_cap}, {"sigma", c.sigma}};
  doc["mesh"] = {{"target_h", c.target_h}, {"family", c.family == MeshFamily::Simplex ? "simplex" : "tensor"}};
  ojson st = ojson::object();
  st["kind"] = to_string(c.kind);
  st["ell"] = doubles_json(c.ell);
  st["k"] = c.k;
  st["L_schedule"] = doubles_json(c.L_schedule);
  if (!c.n.empty()) st["n"] = c.n;
  if (c.nu) st["nu"] = doubles_json(*c.nu);
  if (c.theta) st["theta"] = *c.theta;
  st["directions"] = c.directions;
  st["refine"] = c.refine;
  if (!c.radii.empty()) st["radii"] = doubles_json(c.radii);
  st["K"] = doubles_json(c.K);
  st["face"] = c.face;
  st["rel_tol"] = c.rel_tol;
  st["require_gap"] = c.require_gap;
  doc["study"] = st;
  return doc;
}

StudyRecord run_study(const StudyConfig& cfg, const RunOptions& ro) {
  StudyRecord rec;
  rec.study = to_string(cfg.kind);
  rec.input = to_json(cfg);
  rec.seed = cfg.seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (cfg.kind) {
      case StudyKind::CrossSection: run_cross_section(cfg, ro, rec); break;
      case StudyKind::Reduced: run_reduced(cfg, ro, rec); break;
      case StudyKind::Sweep: run_sweep(cfg, ro, rec); break;
      case StudyKind::Full: run_full(cfg, ro, rec); break;
      case StudyKind::Convergence: run_convergence(cfg, ro, rec); break;
      case StudyKind::Decay: run_decay(cfg, ro, rec); break;
      case StudyKind::UpperBound: run_upper_bound(cfg, ro, rec); break;
      case StudyKind::DirichletBracket: run_bracket(cfg, ro, rec); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure = e.what();
  } catch (const std::bad_alloc&) {
    rec.failed = true;
    rec.failure = "out of memory";
  }
  if (rec.failed) rec.summary_line = std::string("FAILED: ") + rec.failure;
  rec.total_seconds = seconds_since(t0);
  return rec;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string csv_text(const StudyRecord& rec) {
  std::string out;
  for (std::size_t j = 0; j < rec.columns.size(); ++j) out += (j ? "," : "") + rec.columns[j];
  out += '\n';
  for (const auto& row : rec.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + format_number(row[j]);
    out += '\n';
  }
  if (rec.failed) out += "# FAILED: " + rec.failure + '\n';
  return out;
}

ojson json_document(const StudyRecord& rec) {
  ojson doc = ojson::object();
  doc["study"] = rec.study;
  doc["status"] = rec.failed ? "failed" : (rec.failure.empty() ? "ok" : "partial");
  if (!rec.failure.empty()) doc["failure"] = rec.failure;
  doc["input"] = rec.input;
  doc["columns"] = rec.columns;
  ojson rows = ojson::array();
  for (const auto& row : rec.rows) {
    ojson r = ojson::array();
    for (double v : row) r.push_back(std::isnan(v) ? ojson(nullptr) : ojson(v));
    rows.push_back(r);
  }
  doc["rows"] = rows;
  doc["summary"] = rec.summary;
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(rec.input.dump())));
  doc["provenance"] = {{"config_hash", hash}, {"code_version", kCodeVersion}, {"seed", rec.seed}};
  return doc;
}

std::string emit_plot(const StudyRecord& rec) {
  if (rec.rows.empty()) throw Error("empty record");
  const double W = 800, H = 600, left = 90, right = 160, top = 50, bottom = 70;
  auto col = [&](const std::string& name) {
    const auto it = std::find(rec.columns.begin(), rec.columns.end(), name);
    if (it == rec.columns.end()) throw Error("plot column '" + name + "' not in record");
    return static_cast<std::size_t>(it - rec.columns.begin());
  };
  const std::size_t xc = col(rec.x_column.empty() ? rec.columns[0] : rec.x_column);
  std::vector<std::size_t> ycs;
  for (const auto& y : rec.y_columns) ycs.push_back(col(y));
  if (ycs.empty()) ycs.push_back(rec.columns.size() > 1 ? 1 : 0);

  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& row : rec.rows) {
    if (!std::isfinite(row[xc])) continue;
    xlo = std::min(xlo, row[xc]);
    xhi = std::max(xhi, row[xc]);
    for (auto yc : ycs)
      if (std::isfinite(row[yc])) {
        ylo = std::min(ylo, row[yc]);
        yhi = std::max(yhi, row[yc]);
      }
  }
  for (const auto& ref : {rec.mu1, rec.min_Z})
    if (ref && std::isfinite(*ref)) {
      ylo = std::min(ylo, *ref);
      yhi = std::max(yhi, *ref);
    }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1;
  if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
  auto widen = [](double& lo, double& hi) {
    const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1e-12, 0.05 * std::abs(lo));
    lo -= pad;
    hi += pad;
    if (!(hi > lo)) hi = lo + 1.0;
  };
  widen(xlo, xhi);
  widen(ylo, yhi);
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
  auto sy = [&](double y) { return top + (yhi - y) / (yhi - ylo) * ph; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  s << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << xml_escape(rec.study) << "</text>\n";
  s << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  s << "<line x1=\"" << fmt("%.3f", left) << "\" y1=\"" << fmt("%.3f", top + ph) << "\" x2=\"" << fmt("%.3f", left + pw)
    << "\" y2=\"" << fmt("%.3f", top + ph) << "\"/>\n";
  s << "<line x1=\"" << fmt("%.3f", left) << "\" y1=\"" << fmt("%.3f", top) << "\" x2=\"" << fmt("%.3f", left)
    << "\" y2=\"" << fmt("%.3f", top + ph) << "\"/>\n";
  s << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t : nice_ticks(xlo, xhi)) {
    const std::string x = fmt("%.3f", sx(t));
    s << "<line x1=\"" << x << "\" y1=\"" << fmt("%.3f", top + ph) << "\" x2=\"" << x << "\" y2=\""
      << fmt("%.3f", top + ph + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << x << "\" y=\"" << fmt("%.3f", top + ph + 18) << "\" text-anchor=\"middle\">"
      << fmt("%.6g", t) << "</text>\n";
  }
  for (double t : nice_ticks(ylo, yhi)) {
    const std::string y = fmt("%.3f", sy(t));
    s << "<line x1=\"" << fmt("%.3f", left - 5) << "\" y1=\"" << y << "\" x2=\"" << fmt("%.3f", left) << "\" y2=\""
      << y << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fmt("%.3f", left - 8) << "\" y=\"" << y << "\" text-anchor=\"end\" dominant-baseline=\"middle\">"
      << fmt("%.6g", t) << "</text>\n";
  }
  s << "<text x=\"" << fmt("%.3f", left + pw / 2) << "\" y=\"" << fmt("%.3f", H - 20)
    << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(rec.columns[xc]) << "</text>\n";
  s << "</g>\n";

  auto hline = [&](double v, const char* dash, const char* colour, const char* label) {
    const std::string y = fmt("%.3f", sy(v));
    s << "<line x1=\"" << fmt("%.3f", left) << "\" y1=\"" << y << "\" x2=\"" << fmt("%.3f", left + pw) << "\" y2=\""
      << y << "\" stroke=\"" << colour << "\" stroke-width=\"1.5\" stroke-dasharray=\"" << dash << "\"/>\n";
    s << "<text x=\"" << fmt("%.3f", left + pw + 6) << "\" y=\"" << y
      << "\" font-family=\"sans-serif\" font-size=\"12\" dominant-baseline=\"middle\" fill=\"" << colour << "\">"
      << label << " = " << fmt("%.8g", v) << "</text>\n";
  };
  if (rec.mu1 && std::isfinite(*rec.mu1)) hline(*rec.mu1, "8,4", "#555555", "μ₁");
  if (rec.min_Z && std::isfinite(*rec.min_Z)) hline(*rec.min_Z, "2,3", "#aa3300", "min Z");

  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  for (std::size_t si = 0; si < ycs.size(); ++si) {
    const char* colour = colours[si % 6];
    const std::size_t yc = ycs[si];
    std::vector<std::string> run;
    auto flush = [&] {
      if (run.empty()) return;
      s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < run.size(); ++i) s << (i ? " " : "") << run[i];
      s << "\"/>\n";
      run.clear();
    };
    for (const auto& row : rec.rows) {
      if (!std::isfinite(row[xc]) || !std::isfinite(row[yc])) {
        flush();
        continue;
      }
      run.push_back(fmt("%.3f", sx(row[xc])) + "," + fmt("%.3f", sy(row[yc])));
    }
    flush();
    for (const auto& row : rec.rows)
      if (std::isfinite(row[xc]) && std::isfinite(row[yc]))
        s << "<circle class=\"marker\" cx=\"" << fmt("%.3f", sx(row[xc])) << "\" cy=\"" << fmt("%.3f", sy(row[yc]))
          << "\" r=\"3.5\" fill=\"" << colour << "\"/>\n";
    const double ly = top + 14 + 18 * si;
    s << "<text x=\"" << fmt("%.3f", left + pw + 6) << "\" y=\"" << fmt("%.3f", ly)
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colour << "\">" << xml_escape(rec.columns[yc])
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_outputs(const StudyRecord& rec, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (fs::path(dir) / name).string());
    f << text;
  };
  write("results.csv", csv_text(rec));
  write("results.json", json_document(rec).dump(2) + "\n");
  if (!rec.rows.empty()) write("plot.svg", emit_plot(rec));
  ojson timing = ojson::object();
  timing["total_seconds"] = rec.total_seconds;
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < rec.rows.size(); ++i)
    rows.push_back({{"param", std::isnan(rec.rows[i][0]) ? ojson(nullptr) : ojson(rec.rows[i][0])},
                    {"seconds", i < rec.wall_times.size() ? rec.wall_times[i] : 0.0}});
  timing["rows"] = rows;
  write("timing.json", timing.dump(2) + "\n");
}

}  // namespace cylspec
