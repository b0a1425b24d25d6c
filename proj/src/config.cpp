#include "lcq/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lcq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double to_double(const std::string& v, const std::string& where) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw precondition_error("config: " + where + " is not a number: '" + v + "'");
  }
  if (used != v.size()) throw precondition_error("config: " + where + " is not a number: '" + v + "'");
  return d;
}

} // namespace

IniFile IniFile::parse(const std::string& text) {
  IniFile ini;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw precondition_error("config line " + std::to_string(lineno) + ": bad section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      ini.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw precondition_error("config line " + std::to_string(lineno) + ": expected key = value");
    ini.data_[section][lower(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return ini;
}

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precondition_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool IniFile::has_section(const std::string& section) const { return data_.count(lower(section)) > 0; }

bool IniFile::has(const std::string& section, const std::string& key) const {
  const auto it = data_.find(lower(section));
  return it != data_.end() && it->second.count(lower(key)) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? data_.at(lower(section)).at(lower(key)) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? to_double(get(section, key, ""), section + "." + key) : fallback;
}

long IniFile::get_int(const std::string& section, const std::string& key, long fallback) const {
  if (!has(section, key)) return fallback;
  const double d = get_double(section, key, 0.0);
  if (d != static_cast<double>(static_cast<long>(d)))
    throw precondition_error("config: " + section + "." + key + " must be an integer");
  return static_cast<long>(d);
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = lower(get(section, key, ""));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw precondition_error("config: " + section + "." + key + " must be a boolean");
}

std::vector<double> IniFile::get_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  std::istringstream in(get(section, key, ""));
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_double(trim(item), section + "." + key));
  return out;
}

Command parse_command(const std::string& name) {
  const std::string n = lower(name);
  if (n == "verify") return Command::verify;
  if (n == "minimize") return Command::minimize;
  if (n == "sweep-l" || n == "sweep_l") return Command::sweep_L;
  if (n == "falsify") return Command::falsify;
  if (n == "convert") return Command::convert;
  throw precondition_error("unknown command '" + name + "' (verify, minimize, sweep-L, falsify, convert)");
}

std::string command_name(Command c) {
  switch (c) {
  case Command::verify: return "verify";
  case Command::minimize: return "minimize";
  case Command::sweep_L: return "sweep-L";
  case Command::falsify: return "falsify";
  case Command::convert: return "convert";
  }
  return "";
}

void ExperimentConfig::validate() const {
  if (!(bulk.a > 0 && bulk.b > 0 && bulk.c > 0))
    throw precondition_error("config: bulk constants must satisfy a > 0, b > 0, c > 0");
  grid.validate();
  solve.validate();
  if (L_sweep.empty()) throw precondition_error("config: L_sweep is empty");
  for (std::size_t i = 0; i < L_sweep.size(); ++i) {
    if (!(L_sweep[i] > 0.0)) throw precondition_error("config: L_sweep entries must be positive");
    if (i > 0 && !(L_sweep[i] < L_sweep[i - 1])) throw precondition_error("config: L_sweep must be strictly decreasing");
  }
  if (falsify_budget <= 0) throw precondition_error("config: falsify budget must be positive");
  if (verify_samples <= 0) throw precondition_error("config: verify samples must be positive");
  if (init.noise < 0.0) throw precondition_error("config: init noise must be nonnegative");
  // Commands that minimize need an admissible density.
  if (command == Command::minimize || command == Command::sweep_L) validate_density(solve.density, L, bulk.s_plus);
}

ExperimentConfig config_from_ini(const IniFile& ini) {
  ExperimentConfig c;
  c.command = parse_command(ini.get("run", "command", "verify"));
  c.output_dir = ini.get("run", "output_dir", c.output_dir);
  c.seed = static_cast<std::uint64_t>(ini.get_int("run", "seed", static_cast<long>(c.seed)));

  c.bulk = BulkParams(ini.get_double("bulk", "a", 1.0), ini.get_double("bulk", "b", 1.0), ini.get_double("bulk", "c", 1.0));
  c.L = {ini.get_double("elastic", "L1", 1.0), ini.get_double("elastic", "L2", 0.0),
         ini.get_double("elastic", "L3", 0.0), ini.get_double("elastic", "L4", 0.0)};
  if (ini.has_section("frank"))
    c.frank = FrankConstants{ini.get_double("frank", "k1", 0.0), ini.get_double("frank", "k2", 0.0),
                             ini.get_double("frank", "k3", 0.0), ini.get_double("frank", "k4", 0.0)};

  const long n = ini.get_int("grid", "n", 9);
  const double half = ini.get_double("grid", "half_width", 1.0);
  if (n < 3) throw precondition_error("config: grid.n must be at least 3");
  if (!(half > 0)) throw precondition_error("config: grid.half_width must be positive");
  c.grid = cube_grid(static_cast<int>(n), half);
  const std::string b = lower(ini.get("grid", "boundary", "hedgehog"));
  if (b == "hedgehog") c.boundary = BoundaryKind::hedgehog;
  else if (b == "twist_bump") c.boundary = BoundaryKind::twist_bump;
  else throw precondition_error("config: grid.boundary must be hedgehog or twist_bump");
  c.boundary_amplitude = ini.get_double("grid", "amplitude", c.boundary_amplitude);

  SolveConfig& s = c.solve;
  s.density = parse_density(ini.get("density", "name", density_name(s.density)));
  s.M_cutoff = ini.get_double("density", "M", s.M_cutoff);
  s.max_iters = static_cast<int>(ini.get_int("solve", "max_iters", s.max_iters));
  s.step0 = ini.get_double("solve", "step0", s.step0);
  s.armijo_c = ini.get_double("solve", "armijo_c", s.armijo_c);
  s.backtrack = ini.get_double("solve", "backtrack", s.backtrack);
  s.grad_tol = ini.get_double("solve", "grad_tol", s.grad_tol);
  s.L_param = ini.get_double("solve", "L_param", s.L_param);
  s.seed = c.seed;

  c.init.harmonic = ini.get_bool("init", "harmonic", c.init.harmonic);
  c.init.project = ini.get_bool("init", "project", c.init.project);
  c.init.noise = ini.get_double("init", "noise", c.init.noise);
  c.init.seed = c.seed;
  const std::string form = lower(ini.get("constrained", "form", "bar_alpha"));
  if (form == "bar_alpha") c.constrained_form = ConstrainedForm::bar_alpha;
  else if (form == "unit") c.constrained_form = ConstrainedForm::unit;
  else throw precondition_error("config: constrained.form must be bar_alpha or unit");
  c.warm_start = ini.get_bool("sweep", "warm_start", c.warm_start);
  c.L_sweep = ini.get_list("sweep", "L_sweep", c.L_sweep);
  c.falsify_budget = ini.get_int("falsify", "budget", c.falsify_budget);
  c.verify_samples = ini.get_int("verify", "samples", c.verify_samples);
  return c;
}

ExperimentConfig load_config(const std::string& path) { return config_from_ini(IniFile::load(path)); }

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "[run]\ncommand = " << command_name(c.command) << "\noutput_dir = " << c.output_dir << "\nseed = " << c.seed
    << "\n\n[bulk]\na = " << c.bulk.a << "\nb = " << c.bulk.b << "\nc = " << c.bulk.c << "\n\n[elastic]\nL1 = "
    << c.L.L1 << "\nL2 = " << c.L.L2 << "\nL3 = " << c.L.L3 << "\nL4 = " << c.L.L4 << "\n\n";
  if (c.frank)
    o << "[frank]\nk1 = " << c.frank->k1 << "\nk2 = " << c.frank->k2 << "\nk3 = " << c.frank->k3
      << "\nk4 = " << c.frank->k4 << "\n\n";
  o << "[density]\nname = " << density_name(c.solve.density) << "\nM = " << c.solve.M_cutoff << "\n\n[grid]\nn = "
    << c.grid.dims[0] << "\nhalf_width = " << 0.5 * c.grid.h * (c.grid.dims[0] - 1) << "\nboundary = "
    << (c.boundary == BoundaryKind::hedgehog ? "hedgehog" : "twist_bump") << "\namplitude = " << c.boundary_amplitude
    << "\n\n[solve]\nmax_iters = " << c.solve.max_iters << "\nstep0 = " << c.solve.step0
    << "\narmijo_c = " << c.solve.armijo_c << "\nbacktrack = " << c.solve.backtrack << "\ngrad_tol = "
    << c.solve.grad_tol << "\nL_param = " << c.solve.L_param << "\n\n[init]\nharmonic = "
    << (c.init.harmonic ? "true" : "false") << "\nproject = " << (c.init.project ? "true" : "false")
    << "\nnoise = " << c.init.noise << "\n\n[constrained]\nform = "
    << (c.constrained_form == ConstrainedForm::bar_alpha ? "bar_alpha" : "unit") << "\n\n[sweep]\nwarm_start = " << (c.warm_start ? "true" : "false")
    << "\nL_sweep = ";
  for (std::size_t i = 0; i < c.L_sweep.size(); ++i) o << (i ? ", " : "") << c.L_sweep[i];
  o << "\n\n[falsify]\nbudget = " << c.falsify_budget << "\n\n[verify]\nsamples = " << c.verify_samples << "\n";
  return o.str();
}

QField make_boundary(const ExperimentConfig& cfg) {
  return cfg.boundary == BoundaryKind::hedgehog ? hedgehog_boundary(cfg.grid, cfg.bulk.s_plus)
                                                : twist_bump_boundary(cfg.grid, cfg.bulk.s_plus, cfg.boundary_amplitude);
}

} // namespace lcq
