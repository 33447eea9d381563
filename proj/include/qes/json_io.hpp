#pragma once

#include <json.hpp>

#include "qes/direct.hpp"

namespace qes {

// Plain nlohmann::json keeps object keys sorted, which together with the
// shortest round-trip float encoding makes the output byte-reproducible.
using json = nlohmann::json;

json to_json(const EigenPlet& plet);
json to_json(const WaveVector& wave);
json to_json(const QesSolution& solution);
json matrix_to_json(const Eigen::MatrixXd& m);

QesSolution solution_from_json(const json& j);

std::string dump(const json& j);

}  // namespace qes
