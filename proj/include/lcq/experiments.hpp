#pragma once

#include "lcq/config.hpp"

#include <string>
#include <vector>

namespace lcq {

struct CheckRow {
  std::string suite;
  std::string check;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool informational = false; // a reported fact, not an assertion
};

struct ExperimentResult {
  bool ok = true;
  std::vector<CheckRow> checks;
  std::string summary;
};

struct SweepRow {
  double L_param = 0.0;
  int iterations = 0;
  bool converged = false;
  double energy = 0.0;
  double penalty = 0.0;
  double dist_Sstar = 0.0;
  double w12_to_final = 0.0;
  double max_q = 0.0;
  bool monitor = false;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<QField> fields;
  std::vector<SolveReport> reports;
  bool dist_monotone = true;
  bool penalty_monotone = true;
  bool monitor_ok = true;
  double qh_residual_final = 0.0; // of the projected smallest-L field
};

// Relative slack allowed per step of the monotone trends.
constexpr double kSweepSlack = 0.05;

// Computation only; run_sweep_L adds the files.
SweepResult sweep_L(const ExperimentConfig& cfg);

ExperimentResult run_verify(const ExperimentConfig& cfg);
ExperimentResult run_minimize(const ExperimentConfig& cfg);
ExperimentResult run_sweep_L(const ExperimentConfig& cfg);
ExperimentResult run_falsify(const ExperimentConfig& cfg);
ExperimentResult run_convert(const ExperimentConfig& cfg);
// Validates, dispatches on cfg.command and writes report.csv and summary.txt under cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_checks_csv(const std::vector<CheckRow>& rows, const std::string& path);

} // namespace lcq
