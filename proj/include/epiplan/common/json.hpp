#pragma once

#include <nlohmann/json.hpp>

namespace epiplan {

// Insertion-ordered so that serialized plans keep the field order of the
// published task-list shape and output is byte-stable.
using Json = nlohmann::ordered_json;

}  // namespace epiplan
