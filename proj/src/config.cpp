#include "nozzleflow/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace nozzleflow {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "mode",           "gas.gamma",          "gas.delta0",           "nozzle.kind",
      "nozzle.dimension", "nozzle.r0",        "nozzle.r_minus",       "nozzle.r_plus",
      "nozzle.length",  "nozzle.depth",       "nozzle.width",         "domain.L",
      "domain.L_schedule", "mesh.N_t",        "mesh.N_a",             "flux.m0",
      "flux.q_star",    "flux.sweep",         "solver.relative_tolerance", "solver.absolute_tolerance",
      "solver.max_iterations", "solver.linear_solver", "solver.cg_tolerance", "solver.direct_threshold",
      "solver.flux_ramp", "output.directory", "output.vtk",           "far_field.offsets",
      "critical.delta0_schedule", "critical.bisection_steps"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void add_entry(RunConfig& cfg, std::string_view raw, int line) {
  const auto eq = raw.find('=');
  if (eq == std::string_view::npos) throw ConfigError(trim(raw), line, "expected `key = value`");
  std::string key = trim(raw.substr(0, eq));
  std::string value = trim(raw.substr(eq + 1));
  if (key.empty()) throw ConfigError("", line, "missing key before '='");
  if (!known_keys().count(key)) throw ConfigError(key, line, "unknown key");
  if (value.empty()) throw ConfigError(key, line, "missing value");
  if (line > 0 && cfg.entries.count(key) && cfg.entries[key].second > 0)
    throw ConfigError(key, line, "duplicate key (first set on line " + std::to_string(cfg.entries[key].second) + ")");
  cfg.entries[key] = {value, line};
}

class Reader {
 public:
  explicit Reader(const RunConfig& cfg) : cfg_(cfg) {}

  bool has(const std::string& key) const { return cfg_.entries.count(key) > 0; }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_number(key, cfg_.entries.at(key).first);
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& [text, line] = cfg_.entries.at(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ConfigError(key, line, "expected an integer, got '" + text + "'");
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? cfg_.entries.at(key).first : fallback;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& [text, line] = cfg_.entries.at(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key, line, "expected true or false, got '" + text + "'");
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::stringstream ss(cfg_.entries.at(key).first);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(key, has(key) ? cfg_.entries.at(key).second : 0, what);
  }

 private:
  double parse_number(const std::string& key, const std::string& text) const {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ConfigError(key, has(key) ? cfg_.entries.at(key).second : 0, "expected a number, got '" + text + "'");
    return v;
  }

  const RunConfig& cfg_;
};

RunMode parse_mode(const Reader& r) {
  const std::string m = r.text("mode", "solve");
  if (m == "solve") return RunMode::Solve;
  if (m == "sweep") return RunMode::Sweep;
  if (m == "critical-flux") return RunMode::CriticalFlux;
  if (m == "uniqueness") return RunMode::Uniqueness;
  if (m == "validate-cylinder") return RunMode::ValidateCylinder;
  if (m == "far-field") return RunMode::FarField;
  r.fail("mode", "unknown mode '" + m + "'");
}

void require_positive(const Reader& r, const std::string& key, double v) {
  if (!(v > 0)) r.fail(key, "must be positive");
}

void require_increasing(const Reader& r, const std::string& key, const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) r.fail(key, "values must be strictly increasing");
}

void interpret(RunConfig& cfg) {
  const Reader r(cfg);
  cfg.mode = parse_mode(r);

  if (!r.has("gas.gamma")) throw ConfigError("gas.gamma", 0, "required key missing");
  cfg.gamma = r.number("gas.gamma", 0);
  if (!(cfg.gamma > 1)) r.fail("gas.gamma", "must exceed 1");
  cfg.delta0 = r.number("gas.delta0", cfg.delta0);
  if (!(cfg.delta0 > 0 && cfg.delta0 < 0.25)) r.fail("gas.delta0", "must lie in (0, 0.25)");

  auto& nz = cfg.nozzle;
  nz.kind = r.text("nozzle.kind", nz.kind);
  if (nz.kind != "cylinder" && nz.kind != "tanh" && nz.kind != "gaussian_throat")
    r.fail("nozzle.kind", "unknown nozzle kind '" + nz.kind + "'");
  nz.dimension = r.integer("nozzle.dimension", nz.dimension);
  if (nz.dimension != 2 && nz.dimension != 3) r.fail("nozzle.dimension", "must be 2 or 3");
  for (auto [key, field] : {std::pair{"nozzle.r0", &nz.r0}, {"nozzle.r_minus", &nz.r_minus},
                            {"nozzle.r_plus", &nz.r_plus}, {"nozzle.length", &nz.length},
                            {"nozzle.width", &nz.width}}) {
    *field = r.number(key, *field);
    require_positive(r, key, *field);
  }
  nz.depth = r.number("nozzle.depth", nz.depth);
  if (!(nz.depth >= 0 && nz.depth < nz.r0)) r.fail("nozzle.depth", "must lie in [0, nozzle.r0)");

  cfg.L_schedule = r.list("domain.L_schedule", {});
  for (double L : cfg.L_schedule) require_positive(r, "domain.L_schedule", L);
  require_increasing(r, "domain.L_schedule", cfg.L_schedule);
  if (!cfg.L_schedule.empty() && r.has("domain.L"))
    r.fail("domain.L", "give either domain.L or domain.L_schedule, not both");
  cfg.half_length = cfg.L_schedule.empty() ? r.number("domain.L", cfg.half_length) : cfg.L_schedule.front();
  require_positive(r, "domain.L", cfg.half_length);

  cfg.transverse_cells = r.integer("mesh.N_t", cfg.transverse_cells);
  if (cfg.transverse_cells < 2) r.fail("mesh.N_t", "must be at least 2");
  cfg.axial_cells = r.integer("mesh.N_a", cfg.axial_cells);
  if (cfg.axial_cells < 4) r.fail("mesh.N_a", "must be at least 4");

  cfg.has_m0 = r.has("flux.m0");
  cfg.m0 = r.number("flux.m0", 0);
  if (!(cfg.m0 >= 0)) r.fail("flux.m0", "must be nonnegative");
  cfg.q_star = r.number("flux.q_star", cfg.q_star);
  if (!(cfg.q_star >= 0 && cfg.q_star < 1)) r.fail("flux.q_star", "must lie in [0, 1)");
  cfg.sweep = r.list("flux.sweep", {});
  for (double m : cfg.sweep)
    if (!(m >= 0)) r.fail("flux.sweep", "fluxes must be nonnegative");
  require_increasing(r, "flux.sweep", cfg.sweep);

  auto& s = cfg.solver;
  s.relative_tolerance = r.number("solver.relative_tolerance", s.relative_tolerance);
  require_positive(r, "solver.relative_tolerance", s.relative_tolerance);
  s.absolute_tolerance = r.number("solver.absolute_tolerance", s.absolute_tolerance);
  require_positive(r, "solver.absolute_tolerance", s.absolute_tolerance);
  s.cg_tolerance = r.number("solver.cg_tolerance", s.cg_tolerance);
  require_positive(r, "solver.cg_tolerance", s.cg_tolerance);
  s.max_iterations = r.integer("solver.max_iterations", s.max_iterations);
  if (s.max_iterations < 1) r.fail("solver.max_iterations", "must be at least 1");
  s.direct_threshold = r.integer("solver.direct_threshold", s.direct_threshold);
  if (s.direct_threshold < 0) r.fail("solver.direct_threshold", "must be nonnegative");
  s.flux_ramp = r.flag("solver.flux_ramp", s.flux_ramp);
  const std::string ls = r.text("solver.linear_solver", "auto");
  if (ls == "auto")
    s.linear_solver = LinearSolverKind::Automatic;
  else if (ls == "cg")
    s.linear_solver = LinearSolverKind::ConjugateGradient;
  else if (ls == "direct")
    s.linear_solver = LinearSolverKind::Direct;
  else
    r.fail("solver.linear_solver", "expected auto, cg or direct");

  cfg.output_directory = r.text("output.directory", cfg.output_directory);
  cfg.write_vtk = r.flag("output.vtk", cfg.write_vtk);

  cfg.probe_offsets = r.list("far_field.offsets", {});
  for (double o : cfg.probe_offsets) require_positive(r, "far_field.offsets", o);

  cfg.delta_schedule = r.list("critical.delta0_schedule", cfg.delta_schedule);
  if (cfg.delta_schedule.empty()) r.fail("critical.delta0_schedule", "must not be empty");
  for (std::size_t i = 0; i < cfg.delta_schedule.size(); ++i) {
    if (!(cfg.delta_schedule[i] > 0 && cfg.delta_schedule[i] < 0.25))
      r.fail("critical.delta0_schedule", "values must lie in (0, 0.25)");
    if (i > 0 && !(cfg.delta_schedule[i] < cfg.delta_schedule[i - 1]))
      r.fail("critical.delta0_schedule", "values must be strictly decreasing");
  }
  cfg.bisection_steps = r.integer("critical.bisection_steps", cfg.bisection_steps);
  if (cfg.bisection_steps < 1) r.fail("critical.bisection_steps", "must be at least 1");

  switch (cfg.mode) {
    case RunMode::Solve:
    case RunMode::Uniqueness:
    case RunMode::FarField:
    case RunMode::CriticalFlux:
      if (!cfg.has_m0 && cfg.mode != RunMode::CriticalFlux)
        throw ConfigError("flux.m0", 0, "required for mode " + to_string(cfg.mode));
      break;
    case RunMode::Sweep:
      if (cfg.sweep.empty()) throw ConfigError("flux.sweep", 0, "required for mode sweep");
      break;
    case RunMode::ValidateCylinder:
      if (nz.kind != "cylinder") r.fail("nozzle.kind", "validate-cylinder needs a cylinder");
      break;
  }
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Solve: return "solve";
    case RunMode::Sweep: return "sweep";
    case RunMode::CriticalFlux: return "critical-flux";
    case RunMode::Uniqueness: return "uniqueness";
    case RunMode::ValidateCylinder: return "validate-cylinder";
    case RunMode::FarField: return "far-field";
  }
  return "?";
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t RunConfig::hash() const {
  std::string canon;
  for (const auto& [key, entry] : entries) {
    if (key == "output.directory") continue;
    canon += key + "=" + entry.first + "\n";
  }
  return fnv1a(canon);
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!trim(line).empty()) add_entry(cfg, line, line_no);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  for (const auto& o : overrides) add_entry(cfg, o, 0);
  interpret(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace nozzleflow
