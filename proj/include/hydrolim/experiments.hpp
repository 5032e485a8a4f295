#pragma once

#include <filesystem>
#include <map>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydrolim/coarse_grain.hpp"
#include "hydrolim/potential.hpp"
#include "hydrolim/scaling_fit.hpp"

namespace hydrolim {

using Json = nlohmann::json;

inline constexpr int kSummarySchemaVersion = 1;

/// Unknown experiment, unknown key, or a value of the wrong type or range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string target;  ///< human-readable acceptance rule
  bool pass = false;
};

struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string experiment;
  std::string verifies;  ///< the statement the experiment checks
  std::vector<Check> checks;
  std::map<std::string, ScalingFit> fits;
  std::vector<Table> tables;
  Json notes = Json::object();
  double runtime_seconds = 0.0;

  bool passed() const;
};

const std::vector<std::string>& experiment_names();

/// {"a": "auto" | number, "perturbation": {"family": "zero" | "cosine" |
/// "bounded_bump", ...}}.  A missing object selects Cosine{0.1, 1}.
SingleSitePotential parse_potential(const Json& desc);

/// {"mean": c, "amplitude": A, "mode": k, "phase": p} for c + A sin(2 pi k t + p).
Profile parse_profile(const Json& desc);

/// Validates the configuration and runs the named experiment.  Throws
/// ConfigError before any computation if the configuration is invalid.
ExperimentReport run_experiment(const std::string& name, const Json& config);

/// Writes one CSV per table and summary.json into dir; returns the paths.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const Json& config,
                                                const std::filesystem::path& dir);

std::string format_csv(const Table& table);

}  // namespace hydrolim
