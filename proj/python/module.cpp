// Python surface of the library: model building, condensation, masking,
// and the attack catalogue. Thin bindings only; all numerics stay in C++.

#include <cstdint>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpl/attacks.hpp"
#include "mpl/dense_mpc.hpp"
#include "mpl/errors.hpp"
#include "mpl/lti.hpp"
#include "mpl/numerics.hpp"
#include "mpl/problem_io.hpp"
#include "mpl/qtp.hpp"
#include "mpl/rng.hpp"
#include "mpl/scenarios.hpp"
#include "mpl/transforms.hpp"

namespace py = pybind11;
using namespace mpl;

PYBIND11_MODULE(mpcleak, m) {
  m.doc() = "Masked predictive-control problems and the inference attacks "
            "that undo the masking.";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<AttackFailed>(m, "AttackFailed");
  py::register_exception<Infeasible>(m, "Infeasible");

  // --- models and costs -----------------------------------------------------
  py::class_<LtiSystem>(m, "LtiSystem")
      .def(py::init<const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                    const Eigen::MatrixXd&, bool>(),
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("discrete"))
      .def_readonly("a", &LtiSystem::a)
      .def_readonly("b", &LtiSystem::b)
      .def_readonly("c", &LtiSystem::c)
      .def_readonly("discrete", &LtiSystem::discrete)
      .def_property_readonly("n", &LtiSystem::n)
      .def_property_readonly("m", &LtiSystem::m)
      .def_property_readonly("p", &LtiSystem::p);

  py::class_<CostSpec>(m, "CostSpec")
      .def(py::init<const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                    const Eigen::MatrixXd&, Eigen::Index>(),
           py::arg("q"), py::arg("r"), py::arg("p"), py::arg("horizon"))
      .def_readonly("q", &CostSpec::q)
      .def_readonly("r", &CostSpec::r)
      .def_readonly("p", &CostSpec::p)
      .def_readonly("horizon", &CostSpec::horizon);

  py::class_<BoxConstraints>(m, "BoxConstraints")
      .def(py::init<const Eigen::VectorXd&, const Eigen::VectorXd&,
                    const Eigen::VectorXd&, const Eigen::VectorXd&>(),
           py::arg("u_min"), py::arg("u_max"), py::arg("y_min"),
           py::arg("y_max"))
      .def_readonly("u_min", &BoxConstraints::u_min)
      .def_readonly("u_max", &BoxConstraints::u_max)
      .def_readonly("y_min", &BoxConstraints::y_min)
      .def_readonly("y_max", &BoxConstraints::y_max);

  m.def("zoh_discretize", &zoh_discretize, py::arg("sys"), py::arg("ts"),
        "Zero-order-hold discretization of a continuous-time system.");
  m.def("eigenvalues", &eigenvalues, py::arg("a"));
  m.def("transmission_zeros", &transmission_zeros, py::arg("sys"),
        "Finite transmission zeros of a square system.");
  m.def("markov_parameters", &markov_parameters, py::arg("sys"),
        py::arg("count"));
  m.def("dlyap", &dlyap, py::arg("a"), py::arg("q"),
        "Solve A' Y A - Y = -Q for a Schur-stable A.");

  // --- built-in four-tank fixture -------------------------------------------
  m.def("qtp_continuous", &qtp::continuous_model);
  m.def("qtp_model", &qtp::discrete_model,
        "Discretized quadruple-tank plant.");
  m.def("qtp_cost", &qtp::cost, py::arg("horizon"));
  m.def("qtp_box", &qtp::box);
  m.def("qtp_disturbance", &qtp::disturbance, py::arg("steps"),
        py::arg("start") = 200, py::arg("decay") = 0.99);

  // --- dense form -----------------------------------------------------------
  py::class_<DenseQp>(m, "DenseQp")
      .def_readonly("h", &DenseQp::h)
      .def_readonly("f", &DenseQp::f)
      .def_readonly("y", &DenseQp::y)
      .def_readonly("g", &DenseQp::g)
      .def_readonly("w", &DenseQp::w)
      .def_readonly("o", &DenseQp::o)
      .def_readonly("gm", &DenseQp::gm)
      .def_readonly("om", &DenseQp::om)
      .def_readonly("n", &DenseQp::n)
      .def_readonly("m", &DenseQp::m)
      .def_readonly("p", &DenseQp::p)
      .def_readonly("horizon", &DenseQp::horizon)
      .def("h_block", &DenseQp::h_block, py::arg("i"), py::arg("j"))
      .def("f_block", &DenseQp::f_block, py::arg("j"));

  m.def("build_dense", &build_dense, py::arg("sys"), py::arg("cost"),
        py::arg("box"),
        "Condense an MPC problem into 0.5 z'Hz + x0'Fz s.t. Gz <= W + O x0.");

  py::class_<QpSolution>(m, "QpSolution")
      .def_readonly("z", &QpSolution::z)
      .def_readonly("objective", &QpSolution::objective)
      .def_readonly("active", &QpSolution::active)
      .def_readonly("multipliers", &QpSolution::multipliers)
      .def_readonly("kkt_residual", &QpSolution::kkt_residual);

  m.def("qp_solve", &qp_solve, py::arg("qp"), py::arg("x0"));
  m.def("qp_solve_raw", &qp_solve_raw, py::arg("h"), py::arg("q"),
        py::arg("g"), py::arg("rhs"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("x", &Trajectory::x)
      .def_readonly("u", &Trajectory::u)
      .def_readonly("y", &Trajectory::y)
      .def_readonly("z", &Trajectory::z);

  m.def("closed_loop", &closed_loop, py::arg("sys"), py::arg("cost"),
        py::arg("box"), py::arg("x0"), py::arg("steps"),
        py::arg("disturbance") = std::vector<Eigen::VectorXd>{});
  m.def("error_index", &error_index, py::arg("truth"), py::arg("estimate"),
        py::arg("eps_floor") = 1e-30,
        "Relative Frobenius error of an estimate.");
  m.def("rms_index", &rms_index, py::arg("signal"));

  // --- separate-form masking ------------------------------------------------
  py::enum_<SeparateVariant>(m, "SeparateVariant")
      .value("PLAIN", SeparateVariant::kPlain)
      .value("AFFINE", SeparateVariant::kAffine)
      .value("HIGH_DIM", SeparateVariant::kHighDim)
      .value("POLY", SeparateVariant::kPoly);

  py::class_<KeyGenOptions>(m, "KeyGenOptions")
      .def(py::init<>())
      .def_readwrite("range", &KeyGenOptions::range)
      .def_readwrite("n_extra", &KeyGenOptions::n_extra)
      .def_readwrite("m_extra", &KeyGenOptions::m_extra)
      .def_readwrite("p_extra", &KeyGenOptions::p_extra)
      .def_readwrite("poly_degree", &KeyGenOptions::poly_degree);

  py::class_<SeparateKey>(m, "SeparateKey")
      .def_readonly("variant", &SeparateKey::variant)
      .def_readonly("t", &SeparateKey::t)
      .def_readonly("g", &SeparateKey::g)
      .def_readonly("s", &SeparateKey::s)
      .def_readonly("f", &SeparateKey::f)
      .def_readonly("r1", &SeparateKey::r1)
      .def_readonly("r2", &SeparateKey::r2)
      .def_readonly("r3", &SeparateKey::r3)
      .def_static("identity", &SeparateKey::identity, py::arg("n"),
                  py::arg("m"), py::arg("p"));

  m.def(
      "gen_separate_key",
      [](std::uint64_t seed, const LtiSystem& sys, SeparateVariant variant,
         const KeyGenOptions& opts) {
        SeededRng rng(seed);
        return gen_separate_key(rng, sys, variant, opts);
      },
      py::arg("seed"), py::arg("sys"), py::arg("variant"),
      py::arg("opts") = KeyGenOptions{},
      "Draw a random valid key from a seed.");

  py::class_<TransformedProblem>(m, "TransformedProblem")
      .def_readonly("variant", &TransformedProblem::variant)
      .def_readonly("a_t", &TransformedProblem::a_t)
      .def_readonly("b_t", &TransformedProblem::b_t)
      .def_readonly("c_t", &TransformedProblem::c_t)
      .def_readonly("m11", &TransformedProblem::m11)
      .def_readonly("m21", &TransformedProblem::m21)
      .def_readonly("m22", &TransformedProblem::m22)
      .def_readonly("p_t", &TransformedProblem::p_t)
      .def("stage_cost", &TransformedProblem::stage_cost, py::arg("x"),
           py::arg("u"))
      .def("terminal_cost", &TransformedProblem::terminal_cost, py::arg("x"))
      .def("step", &TransformedProblem::step, py::arg("x"), py::arg("u"));

  m.def("apply_separate", &apply_separate, py::arg("key"), py::arg("sys"),
        py::arg("cost"));

  py::class_<DenseKey>(m, "DenseKey")
      .def_readonly("r_mat", &DenseKey::r_mat)
      .def_readonly("r_vec", &DenseKey::r_vec)
      .def_readonly("perm", &DenseKey::perm)
      .def_readonly("time_varying", &DenseKey::time_varying)
      .def("at_instance", &DenseKey::at_instance, py::arg("instance"));

  m.def(
      "gen_dense_key",
      [](std::uint64_t seed, Eigen::Index nm, Eigen::Index rows, double range,
         bool use_perm, bool time_varying) {
        SeededRng rng(seed);
        return gen_dense_key(rng, nm, rows, range, use_perm, time_varying);
      },
      py::arg("seed"), py::arg("nm"), py::arg("rows"), py::arg("range") = 1e3,
      py::arg("use_perm") = true, py::arg("time_varying") = false);

  py::class_<TransformedDenseQp>(m, "TransformedDenseQp")
      .def_readonly("h_t", &TransformedDenseQp::h_t)
      .def_readonly("f_t", &TransformedDenseQp::f_t)
      .def_readonly("g_t", &TransformedDenseQp::g_t)
      .def_readonly("e_t", &TransformedDenseQp::e_t);

  m.def("apply_dense", &apply_dense, py::arg("key"), py::arg("qp"),
        py::arg("x0"), py::arg("instance") = 0);

  // --- attacks --------------------------------------------------------------
  py::enum_<WitnessKind>(m, "WitnessKind")
      .value("WITNESS", WitnessKind::kWitness)
      .value("SINGLETON", WitnessKind::kSingleton)
      .value("BOUNDARY", WitnessKind::kBoundary);

  py::class_<UncertaintyWitness>(m, "UncertaintyWitness")
      .def_readonly("x_dir", &UncertaintyWitness::x_dir)
      .def_readonly("epsilon", &UncertaintyWitness::epsilon)
      .def_readonly("q_min_eig", &UncertaintyWitness::q_min_eig)
      .def_readonly("p_min_eig", &UncertaintyWitness::p_min_eig);

  py::class_<WitnessResult>(m, "WitnessResult")
      .def_readonly("kind", &WitnessResult::kind)
      .def_readonly("witness", &WitnessResult::witness)
      .def_readonly("note", &WitnessResult::note);

  py::class_<AttackReport>(m, "AttackReport")
      .def_readonly("a_hat", &AttackReport::a_hat)
      .def_readonly("b_hat", &AttackReport::b_hat)
      .def_readonly("c_hat", &AttackReport::c_hat)
      .def_readonly("q_hat", &AttackReport::q_hat)
      .def_readonly("p_hat", &AttackReport::p_hat)
      .def_readonly("r_hat", &AttackReport::r_hat)
      .def_readonly("eigenvalues", &AttackReport::eigenvalues)
      .def_readonly("zeros", &AttackReport::zeros)
      .def_readonly("witness", &AttackReport::witness)
      .def_readonly("eps_relax", &AttackReport::eps_relax)
      .def_readonly("provenance", &AttackReport::provenance)
      .def("to_json", [](const AttackReport& r) { return r.to_json().dump(); },
           "Structured report as a JSON string.");

  py::class_<Realization>(m, "Realization")
      .def_readonly("a", &Realization::a)
      .def_readonly("b", &Realization::b)
      .def_readonly("c", &Realization::c);

  m.def("attack_separate", &attack_separate, py::arg("tp"));
  m.def("attack_highdim", &attack_highdim, py::arg("tp"));
  m.def("attack_poly", &attack_poly, py::arg("tp"));
  m.def("attack_dense_full", &attack_dense_full, py::arg("qp"));
  m.def("attack_hf", &attack_hf, py::arg("h"), py::arg("f"),
        py::arg("n_hint"), py::arg("m"));
  m.def("realize_from_G", &realize_from_G, py::arg("g_full"),
        py::arg("n_hint"), py::arg("m"), py::arg("p"));
  m.def("recover_dense_key", &recover_dense_key, py::arg("g_tilde"),
        py::arg("e_tilde"), py::arg("nm"), py::arg("m"),
        "Recover (R, centered r) from a repeated-key constraint block.");
  m.def("uncertainty_witness", &uncertainty_witness, py::arg("a"),
        py::arg("b"), py::arg("q_hat"), py::arg("p_hat"));

  // --- problems and scenarios -----------------------------------------------
  py::class_<ProblemFile>(m, "ProblemFile")
      .def_readonly("sys", &ProblemFile::sys)
      .def_readonly("ts", &ProblemFile::ts)
      .def_readonly("cost", &ProblemFile::cost)
      .def_readonly("box", &ProblemFile::box)
      .def("discrete", &ProblemFile::discrete);

  m.def("parse_problem", &parse_problem, py::arg("path"),
        "Load a problem JSON file, or the built-in \"qtp\" fixture.");

  py::class_<ScenarioRecord>(m, "ScenarioRecord")
      .def_readonly("horizon", &ScenarioRecord::horizon)
      .def_readonly("eps_a", &ScenarioRecord::eps_a)
      .def_readonly("eps_b", &ScenarioRecord::eps_b)
      .def_readonly("eps_y", &ScenarioRecord::eps_y)
      .def_readonly("rms", &ScenarioRecord::rms)
      .def_readonly("eig_err", &ScenarioRecord::eig_err)
      .def_readonly("eps_relax", &ScenarioRecord::eps_relax)
      .def_readonly("eigenvalues", &ScenarioRecord::eigenvalues)
      .def_readonly("zeros", &ScenarioRecord::zeros);

  py::class_<ScenarioResult>(m, "ScenarioResult")
      .def_readonly("scenario", &ScenarioResult::scenario)
      .def_readonly("records", &ScenarioResult::records)
      .def("report_json",
           [](const ScenarioResult& r) { return r.report.dump(2); },
           "Full report as a JSON string.");

  m.def("scenario_names",
        [] { return scenario_names(); },
        "Names accepted by run_scenario.");
  m.def("run_scenario", &run_scenario, py::arg("problem"), py::arg("scenario"),
        py::arg("horizons"), py::arg("seed"));
  m.def("write_scenario_outputs", &write_scenario_outputs, py::arg("result"),
        py::arg("out_dir"));
  m.def("reproduce_qtp", &reproduce_qtp, py::arg("out_dir"),
        py::arg("horizons"), py::arg("seed"),
        "Run the built-in four-tank study and write report.json plus CSVs.");
}
