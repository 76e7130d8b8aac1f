#pragma once

// Internal helpers shared by the translation units that speak JSON.

#include <json.hpp>

#include "sdist/distributions.hpp"

namespace sdist::detail {

using nlohmann::json;

json vector_to_json(const Vector& v);
json matrix_to_json(const SquareMatrix& m);
Vector vector_from_json(const json& j, const char* what);
SquareMatrix matrix_from_json(const json& j, const char* what);

json model_to_json_value(const DistributionModel& model);
DistributionModel model_from_json_value(const json& j);

}  // namespace sdist::detail
