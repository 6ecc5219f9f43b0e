#pragma once

// Internal: JSON encodings shared by snapshot, persistence and diff code.

#include "json.hpp"
#include "q2m/schema_state.hpp"

namespace q2m::detail {

nlohmann::json type_to_json(const TypeDescriptor &type);
TypeDescriptor type_from_json(const nlohmann::json &j);
nlohmann::json model_to_json(const SchemaModel &model);
SchemaModel model_from_json(const nlohmann::json &j);

} // namespace q2m::detail
