#pragma once

#include "lcq/solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lcq {

// Flat INI text: [section] headers, key = value lines, '#' or ';' comments.
class IniFile {
 public:
  static IniFile parse(const std::string& text);
  static IniFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

enum class Command { verify, minimize, sweep_L, falsify, convert };

Command parse_command(const std::string& name);
std::string command_name(Command c);

enum class BoundaryKind { hedgehog, twist_bump };

struct ExperimentConfig {
  Command command = Command::verify;
  BulkParams bulk{1, 1, 1};
  ElasticConstants L{1, 0, 0, 0};
  std::optional<FrankConstants> frank; // set when the [frank] section is given
  GridSpec grid = cube_grid(9);
  BoundaryKind boundary = BoundaryKind::hedgehog;
  double boundary_amplitude = 1.0;
  SolveConfig solve;
  InitPolicy init;
  ConstrainedForm constrained_form = ConstrainedForm::bar_alpha;
  bool warm_start = true;
  std::vector<double> L_sweep{1e-1, 3e-2, 1e-2, 3e-3};
  long falsify_budget = 100000;
  long verify_samples = 2000;
  std::string output_dir = "lcq_out";
  std::uint64_t seed = 1;

  // Throws precondition_error naming the failing field or inequality.
  void validate() const;
};

ExperimentConfig config_from_ini(const IniFile& ini);
ExperimentConfig load_config(const std::string& path);
// Canonical INI text for a config; parsing it back yields the same config.
std::string to_ini(const ExperimentConfig& cfg);

QField make_boundary(const ExperimentConfig& cfg);

} // namespace lcq
