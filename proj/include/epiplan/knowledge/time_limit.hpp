#pragma once

#include <chrono>
#include <optional>
#include <string_view>

namespace epiplan::kb {

// Best-effort reading of phrases like "2 hours", "14 days" or
// "3 days to show effect". Only used for ordering; nullopt when no
// duration is recognisable.
std::optional<std::chrono::minutes> normalize_time_limit(std::string_view phrase);

}  // namespace epiplan::kb
