#include "qes/json_io.hpp"

namespace qes {

json to_json(const EigenPlet& plet) { return json(plet.g); }

json to_json(const WaveVector& wave) { return json(wave.h); }

json to_json(const QesSolution& solution) {
  json j;
  j["plet"] = to_json(solution.plet);
  j["energy"] = solution.energy;
  j["wave"] = to_json(solution.wave);
  j["residual_norm"] = solution.residual_norm;
  j["classification"] =
      solution.classification == SolutionMethod::closed_form ? "closed_form" : "newton";
  if (solution.singular_jacobian) j["singular_jacobian"] = true;
  return j;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

QesSolution solution_from_json(const json& j) {
  QesSolution s;
  s.plet.g = j.at("plet").get<std::vector<double>>();
  s.wave.h = j.at("wave").get<std::vector<double>>();
  s.energy = j.at("energy").get<double>();
  s.residual_norm = j.value("residual_norm", 0.0);
  s.classification = j.value("classification", std::string("closed_form")) == "newton"
                         ? SolutionMethod::newton
                         : SolutionMethod::closed_form;
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qes
