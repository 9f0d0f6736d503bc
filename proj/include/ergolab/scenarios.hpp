#pragma once

#include <string>
#include <vector>

#include "ergolab/config.hpp"

namespace ergolab {

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", "==" (within tolerance)
  double tolerance = 0.0;
  double margin = 0.0;   // non-negative when the check passes
  bool pass = false;
};

Check check_le(std::string name, double value, double bound);
Check check_ge(std::string name, double value, double bound);
Check check_eq(std::string name, double value, double target, double tolerance);

struct RunReport {
  std::string scenario;
  std::string exercises;
  std::vector<Check> checks;
  bool certified = true;  // false only for a decomposition that missed its ε
  json result;
  std::string csv;
  double seconds = 0.0;

  bool checks_pass() const;
  // 0 pass, 2 check failure, 3 non-certification.
  int exit_code() const;
  std::string status() const;
  json to_json(bool with_timing = true) const;
};

struct ScenarioInfo {
  std::string name;
  std::vector<std::string> required;
  std::string exercises;
};

const std::vector<ScenarioInfo>& scenario_catalog();

// Builds every declaration of the config without running it.
void validate_config(const ExperimentConfig& cfg);
RunReport run_scenario(const ExperimentConfig& cfg);
// Writes <dir>/<name>.csv and <dir>/<name>.json.
void write_artifacts(const RunReport& report, const ExperimentConfig& cfg);

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFail = 2;
inline constexpr int kExitNonCertified = 3;
inline constexpr int kExitConfig = 4;
inline constexpr int kExitRuntime = 5;

}  // namespace ergolab
