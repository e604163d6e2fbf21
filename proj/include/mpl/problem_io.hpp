#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpl/dense_mpc.hpp"
#include "mpl/lti.hpp"

namespace mpl {

/// Decaying additive input-channel disturbance description.
struct DisturbanceSpec {
  Eigen::VectorXd amplitude;
  double decay = 1.0;
  Eigen::Index start = 0;

  std::vector<Eigen::VectorXd> realize(Eigen::Index steps) const;
};

/// Experiment block of a problem file.
struct ExperimentSpec {
  Eigen::Index steps = 500;
  Eigen::VectorXd x0;                       ///< defaults to zero
  std::optional<DisturbanceSpec> disturbance;
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> horizons;       ///< defaults to {5, 20, 50}
  Eigen::Index instances = 6;               ///< multi-instance attacks
};

/// A parsed problem file: plant, weights, bounds, experiment description.
/// The system may be continuous (ts set), in which case consumers discretize.
struct ProblemFile {
  LtiSystem sys;
  std::optional<double> ts;
  CostSpec cost;
  BoxConstraints box;
  ExperimentSpec experiment;

  /// The discrete plant (applies zero-order hold when ts is set).
  LtiSystem discrete() const;
};

/// Load a problem from a JSON file, or return the built-in fixture when the
/// argument is the name "qtp". Schema errors raise ParseError naming the
/// offending JSON pointer.
ProblemFile parse_problem(const std::string& path_or_name);

/// Parse from an already-loaded JSON document.
ProblemFile problem_from_json(const nlohmann::json& j);

nlohmann::json problem_to_json(const ProblemFile& pf);

// --- deterministic emission ------------------------------------------------

/// Serialize a matrix as nested row-major arrays.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j,
                                 const std::string& where);

/// Write JSON UTF-8, two-space indent, keys sorted (object order is sorted by
/// construction), trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

/// Format a double with 17 significant digits, locale-independent.
std::string format_number(double v);

/// Write a CSV file: comma separator, '.' decimal, one header row, numbers at
/// 17 significant digits, '\n' line ends.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace mpl
