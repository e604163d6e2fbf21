#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpl/problem_io.hpp"

namespace mpl {

/// Per-horizon outcome of a scenario run. Fields that a scenario does not
/// produce are NaN (or empty lists); eps_* are relative errors against the
/// scenario's recovery target.
struct ScenarioRecord {
  Eigen::Index horizon = 0;
  double eps_a = std::numeric_limits<double>::quiet_NaN();
  double eps_b = std::numeric_limits<double>::quiet_NaN();
  double eps_y = std::numeric_limits<double>::quiet_NaN();
  double rms = std::numeric_limits<double>::quiet_NaN();
  double eig_err = std::numeric_limits<double>::quiet_NaN();
  double eps_relax = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::complex<double>> eigenvalues;
  std::vector<std::complex<double>> zeros;
};

struct ScenarioResult {
  std::string scenario;
  std::vector<ScenarioRecord> records;
  nlohmann::json report;  ///< full structured report
};

/// Scenario names accepted by run_scenario.
const std::vector<std::string>& scenario_names();

/// Run one masking + attack scenario on a problem over the given horizons.
/// Unknown names raise InvalidArgument.
ScenarioResult run_scenario(const ProblemFile& pf, const std::string& scenario,
                            const std::vector<Eigen::Index>& horizons,
                            std::uint64_t seed);

/// Write report.json plus per-curve CSVs (errors.csv, eigenvalues.csv,
/// zeros.csv) for a scenario result into out_dir (created if needed).
void write_scenario_outputs(const ScenarioResult& result,
                            const std::string& out_dir);

/// End-to-end reference study on the built-in quadruple-tank fixture:
/// closed-loop tracking error per horizon, dynamics-recovery error curves,
/// zero estimates, and masked-spectrum estimates, written as report.json and
/// CSVs into out_dir. Identical seeds give byte-identical outputs.
void reproduce_qtp(const std::string& out_dir,
                   const std::vector<Eigen::Index>& horizons,
                   std::uint64_t seed);

}  // namespace mpl
