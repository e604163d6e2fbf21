#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpl/attacks.hpp"
#include "mpl/dense_mpc.hpp"
#include "mpl/errors.hpp"
#include "mpl/problem_io.hpp"
#include "mpl/scenarios.hpp"

namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MPL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw mpl::InvalidArgument("MPL_SEED is not an unsigned integer");
    }
  }
  return fallback;
}

std::vector<Eigen::Index> resolve_horizons(
    const std::vector<long long>& flag,
    const std::vector<Eigen::Index>& fallback) {
  if (flag.empty()) return fallback;
  std::vector<Eigen::Index> out;
  for (long long h : flag) {
    if (h < 1) throw mpl::InvalidArgument("horizons must be positive");
    out.push_back(static_cast<Eigen::Index>(h));
  }
  return out;
}

int run_build_dense(const std::string& problem,
                    const std::vector<long long>& horizons_flag,
                    const std::string& out_dir) {
  mpl::ProblemFile pf = mpl::parse_problem(problem);
  std::vector<Eigen::Index> horizons =
      resolve_horizons(horizons_flag, {pf.cost.horizon});
  std::filesystem::create_directories(out_dir);
  mpl::LtiSystem sysd = pf.discrete();
  for (Eigen::Index N : horizons) {
    mpl::CostSpec cost(pf.cost.q, pf.cost.r, pf.cost.p, N);
    mpl::DenseQp qp = mpl::build_dense(sysd, cost, pf.box);
    nlohmann::json j;
    j["horizon"] = N;
    j["n"] = qp.n;
    j["m"] = qp.m;
    j["p"] = qp.p;
    j["h"] = mpl::matrix_to_json(qp.h);
    j["f"] = mpl::matrix_to_json(qp.f);
    j["y"] = mpl::matrix_to_json(qp.y);
    j["g"] = mpl::matrix_to_json(qp.g);
    j["w"] = mpl::matrix_to_json(qp.w);
    j["o"] = mpl::matrix_to_json(qp.o);
    const std::string path =
        out_dir + "/dense_N" + std::to_string(N) + ".json";
    mpl::write_json(path, j);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

int run_attack(const std::string& problem, const std::string& scenario,
               const std::vector<long long>& horizons_flag,
               const std::optional<std::uint64_t>& seed_flag,
               const std::string& out_dir) {
  mpl::ProblemFile pf = mpl::parse_problem(problem);
  std::vector<Eigen::Index> horizons =
      resolve_horizons(horizons_flag, pf.experiment.horizons);
  const std::uint64_t seed = resolve_seed(seed_flag, pf.experiment.seed);
  mpl::ScenarioResult result =
      mpl::run_scenario(pf, scenario, horizons, seed);
  mpl::write_scenario_outputs(result, out_dir);
  std::cout << "scenario " << scenario << " on " << problem << ": wrote "
            << out_dir << "/report.json and CSV curves\n";
  return 0;
}

int run_reproduce(const std::vector<long long>& horizons_flag,
                  const std::optional<std::uint64_t>& seed_flag,
                  const std::string& out_dir) {
  std::vector<Eigen::Index> horizons =
      resolve_horizons(horizons_flag, {5, 20, 50});
  const std::uint64_t seed = resolve_seed(seed_flag, 0);
  mpl::reproduce_qtp(out_dir, horizons, seed);
  std::cout << "reference study written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Masked-MPC construction and inference toolkit"};
  app.require_subcommand(1);

  std::string problem = "qtp";
  std::string scenario;
  std::vector<long long> horizons;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";

  auto add_common = [&](CLI::App* sub, bool with_scenario) {
    sub->add_option("--problem", problem,
                    "Problem file path or built-in name (qtp)");
    if (with_scenario)
      sub->add_option("--scenario", scenario, "Scenario name")
          ->required()
          ->check(CLI::IsMember(mpl::scenario_names()));
    sub->add_option("--horizons", horizons, "Horizon list")->delimiter(',');
    sub->add_option("--seed", seed, "Random seed (fallback: MPL_SEED)");
    sub->add_option("--out", out_dir, "Output directory");
  };

  CLI::App* build = app.add_subcommand(
      "build-dense", "Condense a problem and write its matrices");
  add_common(build, false);

  CLI::App* attack = app.add_subcommand(
      "attack", "Mask a problem and run one inference scenario");
  add_common(attack, true);

  CLI::App* repro = app.add_subcommand(
      "reproduce-qtp", "Reference study on the built-in four-tank fixture");
  repro->add_option("--horizons", horizons, "Horizon list")->delimiter(',');
  repro->add_option("--seed", seed, "Random seed (fallback: MPL_SEED)");
  repro->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return run_build_dense(problem, horizons, out_dir);
    if (attack->parsed())
      return run_attack(problem, scenario, horizons, seed, out_dir);
    return run_reproduce(horizons, seed, out_dir);
  } catch (const mpl::AttackFailed& e) {
    std::cerr << "attack failed: " << e.what() << "\n";
    return 1;
  } catch (const mpl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
