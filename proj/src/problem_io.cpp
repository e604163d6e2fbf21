#include "mpl/problem_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "mpl/errors.hpp"
#include "mpl/qtp.hpp"

namespace mpl {

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key,
                              const std::string& ptr) {
  if (!j.is_object())
    throw ParseError(ptr + ": expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError("missing field at " + ptr + "/" + key);
  return *it;
}

double number_at(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number())
    throw ParseError(where + ": expected a number");
  return j.get<double>();
}

Eigen::VectorXd vector_at(const nlohmann::json& j, const std::string& where) {
  Eigen::MatrixXd m = matrix_from_json(j, where);
  if (m.cols() != 1)
    throw ParseError(where + ": expected a flat array");
  return m.col(0);
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j,
                                 const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty array");
  if (j.front().is_number()) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
      v(static_cast<Eigen::Index>(i)) =
          number_at(j[i], where + "/" + std::to_string(i));
    return v;
  }
  const std::size_t rows = j.size();
  if (!j.front().is_array() || j.front().empty())
    throw ParseError(where + "/0: expected a non-empty row array");
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = where + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError(rp + ": ragged or non-array row");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_at(j[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

std::vector<Eigen::VectorXd> DisturbanceSpec::realize(
    Eigen::Index steps) const {
  std::vector<Eigen::VectorXd> d(
      static_cast<std::size_t>(steps),
      Eigen::VectorXd::Zero(amplitude.size()));
  for (Eigen::Index k = start; k < steps; ++k)
    d[static_cast<std::size_t>(k)] =
        amplitude * std::pow(decay, static_cast<double>(k - start));
  return d;
}

LtiSystem ProblemFile::discrete() const {
  if (sys.discrete) return sys;
  if (!ts)
    throw InvalidModel("continuous system requires a sample time");
  return zoh_discretize(sys, *ts);
}

ProblemFile problem_from_json(const nlohmann::json& j) {
  const auto& jsys = require(j, "system", "");
  Eigen::MatrixXd a = matrix_from_json(require(jsys, "a", "/system"),
                                       "/system/a");
  Eigen::MatrixXd b = matrix_from_json(require(jsys, "b", "/system"),
                                       "/system/b");
  Eigen::MatrixXd c = matrix_from_json(require(jsys, "c", "/system"),
                                       "/system/c");
  bool discrete = false;
  if (auto it = jsys.find("discrete"); it != jsys.end()) {
    if (!it->is_boolean())
      throw ParseError("/system/discrete: expected a boolean");
    discrete = it->get<bool>();
  }
  std::optional<double> ts;
  if (auto it = jsys.find("ts"); it != jsys.end())
    ts = number_at(*it, "/system/ts");
  if (!discrete && !ts)
    throw ParseError("/system/ts: required for a continuous system");

  const auto& jcost = require(j, "cost", "");
  Eigen::MatrixXd q = matrix_from_json(require(jcost, "q", "/cost"),
                                       "/cost/q");
  Eigen::MatrixXd r = matrix_from_json(require(jcost, "r", "/cost"),
                                       "/cost/r");
  Eigen::MatrixXd p = matrix_from_json(require(jcost, "p", "/cost"),
                                       "/cost/p");
  const auto& jh = require(jcost, "horizon", "/cost");
  if (!jh.is_number_integer() || jh.get<long long>() < 1)
    throw ParseError("/cost/horizon: expected a positive integer");

  const auto& jbox = require(j, "constraints", "");
  Eigen::VectorXd u_min =
      vector_at(require(jbox, "u_min", "/constraints"), "/constraints/u_min");
  Eigen::VectorXd u_max =
      vector_at(require(jbox, "u_max", "/constraints"), "/constraints/u_max");
  Eigen::VectorXd y_min =
      vector_at(require(jbox, "y_min", "/constraints"), "/constraints/y_min");
  Eigen::VectorXd y_max =
      vector_at(require(jbox, "y_max", "/constraints"), "/constraints/y_max");

  ProblemFile pf{
      [&] {
        try {
          return LtiSystem(a, b, c, discrete);
        } catch (const Error& e) {
          throw ParseError(std::string("/system: ") + e.what());
        }
      }(),
      ts,
      [&] {
        try {
          return CostSpec(q, r, p, jh.get<Eigen::Index>());
        } catch (const Error& e) {
          throw ParseError(std::string("/cost: ") + e.what());
        }
      }(),
      [&] {
        try {
          return BoxConstraints(u_min, u_max, y_min, y_max);
        } catch (const Error& e) {
          throw ParseError(std::string("/constraints: ") + e.what());
        }
      }(),
      ExperimentSpec{}};

  pf.experiment.x0 = Eigen::VectorXd::Zero(a.rows());
  pf.experiment.horizons = {5, 20, 50};
  if (auto it = j.find("experiment"); it != j.end()) {
    const auto& je = *it;
    if (!je.is_object())
      throw ParseError("/experiment: expected an object");
    if (auto f = je.find("steps"); f != je.end()) {
      if (!f->is_number_integer() || f->get<long long>() < 1)
        throw ParseError("/experiment/steps: expected a positive integer");
      pf.experiment.steps = f->get<Eigen::Index>();
    }
    if (auto f = je.find("initial_state"); f != je.end()) {
      pf.experiment.x0 = vector_at(*f, "/experiment/initial_state");
      if (pf.experiment.x0.size() != a.rows())
        throw ParseError("/experiment/initial_state: length must equal the "
                         "state dimension");
    }
    if (auto f = je.find("seed"); f != je.end()) {
      if (!f->is_number_integer())
        throw ParseError("/experiment/seed: expected an integer");
      pf.experiment.seed = f->get<std::uint64_t>();
    }
    if (auto f = je.find("horizons"); f != je.end()) {
      if (!f->is_array() || f->empty())
        throw ParseError("/experiment/horizons: expected a non-empty array");
      pf.experiment.horizons.clear();
      for (std::size_t i = 0; i < f->size(); ++i) {
        const auto& h = (*f)[i];
        if (!h.is_number_integer() || h.get<long long>() < 1)
          throw ParseError("/experiment/horizons/" + std::to_string(i) +
                           ": expected a positive integer");
        pf.experiment.horizons.push_back(h.get<Eigen::Index>());
      }
    }
    if (auto f = je.find("instances"); f != je.end()) {
      if (!f->is_number_integer() || f->get<long long>() < 1)
        throw ParseError("/experiment/instances: expected a positive integer");
      pf.experiment.instances = f->get<Eigen::Index>();
    }
    if (auto f = je.find("disturbance"); f != je.end()) {
      const auto& jd = *f;
      DisturbanceSpec ds;
      ds.amplitude = vector_at(require(jd, "amplitude",
                                       "/experiment/disturbance"),
                               "/experiment/disturbance/amplitude");
      if (ds.amplitude.size() != b.cols())
        throw ParseError("/experiment/disturbance/amplitude: length must "
                         "equal the input dimension");
      if (auto g = jd.find("decay"); g != jd.end())
        ds.decay = number_at(*g, "/experiment/disturbance/decay");
      if (auto g = jd.find("start"); g != jd.end()) {
        if (!g->is_number_integer() || g->get<long long>() < 0)
          throw ParseError("/experiment/disturbance/start: expected a "
                           "nonnegative integer");
        ds.start = g->get<Eigen::Index>();
      }
      pf.experiment.disturbance = ds;
    }
  }
  return pf;
}

nlohmann::json problem_to_json(const ProblemFile& pf) {
  nlohmann::json j;
  j["version"] = 1;
  j["system"]["a"] = matrix_to_json(pf.sys.a);
  j["system"]["b"] = matrix_to_json(pf.sys.b);
  j["system"]["c"] = matrix_to_json(pf.sys.c);
  j["system"]["discrete"] = pf.sys.discrete;
  if (pf.ts) j["system"]["ts"] = *pf.ts;
  j["cost"]["q"] = matrix_to_json(pf.cost.q);
  j["cost"]["r"] = matrix_to_json(pf.cost.r);
  j["cost"]["p"] = matrix_to_json(pf.cost.p);
  j["cost"]["horizon"] = pf.cost.horizon;
  j["constraints"]["u_min"] = vector_to_json(pf.box.u_min);
  j["constraints"]["u_max"] = vector_to_json(pf.box.u_max);
  j["constraints"]["y_min"] = vector_to_json(pf.box.y_min);
  j["constraints"]["y_max"] = vector_to_json(pf.box.y_max);
  j["experiment"]["steps"] = pf.experiment.steps;
  j["experiment"]["initial_state"] = vector_to_json(pf.experiment.x0);
  j["experiment"]["seed"] = pf.experiment.seed;
  j["experiment"]["horizons"] = pf.experiment.horizons;
  j["experiment"]["instances"] = pf.experiment.instances;
  if (pf.experiment.disturbance) {
    const auto& d = *pf.experiment.disturbance;
    j["experiment"]["disturbance"]["amplitude"] = vector_to_json(d.amplitude);
    j["experiment"]["disturbance"]["decay"] = d.decay;
    j["experiment"]["disturbance"]["start"] = d.start;
  }
  return j;
}

ProblemFile parse_problem(const std::string& path_or_name) {
  if (path_or_name == "qtp") {
    ProblemFile pf{qtp::continuous_model(), qtp::kSampleTime, qtp::cost(50),
                   qtp::box(), ExperimentSpec{}};
    pf.experiment.steps = qtp::kSteps;
    pf.experiment.x0 = Eigen::VectorXd::Zero(4);
    pf.experiment.horizons = {5, 20, 50};
    pf.experiment.instances = 6;
    DisturbanceSpec ds;
    ds.amplitude = Eigen::VectorXd(2);
    ds.amplitude << 3.0, -3.0;
    ds.decay = 0.99;
    ds.start = 200;
    pf.experiment.disturbance = ds;
    return pf;
  }
  std::ifstream in(path_or_name);
  if (!in)
    throw ParseError("cannot open problem file: " + path_or_name);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("invalid JSON in " + path_or_name + ": " + e.what());
  }
  return problem_from_json(j);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw InvalidArgument("write_csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_number(row[i]);
    }
    out << '\n';
  }
}

}  // namespace mpl
