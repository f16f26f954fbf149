#include "epiplan/knowledge/time_limit.hpp"

#include <regex>
#include <string>

#include "epiplan/common/text.hpp"

namespace epiplan::kb {

std::optional<std::chrono::minutes> normalize_time_limit(std::string_view phrase) {
    static const std::regex re(R"((\d+(?:\.\d+)?)\s*(minute|min|hour|hr|day|week|month)s?\b)");
    std::string s = text::canonical(phrase);
    std::smatch m;
    if (!std::regex_search(s, m, re)) return std::nullopt;
    double amount = std::stod(m[1].str());
    const std::string unit = m[2].str();
    double minutes = amount;
    if (unit == "hour" || unit == "hr") minutes *= 60;
    else if (unit == "day") minutes *= 60 * 24;
    else if (unit == "week") minutes *= 60 * 24 * 7;
    else if (unit == "month") minutes *= 60 * 24 * 30;
    return std::chrono::minutes(static_cast<long>(minutes + 0.5));
}

}  // namespace epiplan::kb
