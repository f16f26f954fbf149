#include "epiplan/modelclient/text_lists.hpp"

#include <cctype>

#include "epiplan/common/text.hpp"

namespace epiplan::model {

std::string render_numbered_list(std::span<const std::string> items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back('\n');
        out += std::to_string(i + 1) + ". " + items[i];
    }
    return out;
}

namespace {
std::string strip_marker(std::string line) {
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) return text::trim(line.substr(i + 1));
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) return text::trim(line.substr(1));
    return line;
}
}  // namespace

std::vector<std::string> parse_list_items(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& raw : text::split_lines(text)) {
        auto line = strip_marker(text::trim(raw));
        if (!line.empty()) out.push_back(std::move(line));
    }
    return out;
}

std::string render_structured_case(std::span<const CaseLine> lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back('\n');
        out += std::to_string(i + 1) + ". " + lines[i].first + ": " + std::string(cond::to_string(lines[i].second));
    }
    return out;
}

std::vector<CaseLine> parse_structured_case(std::string_view text) {
    std::vector<CaseLine> out;
    for (const auto& item : parse_list_items(text)) {
        auto colon = item.rfind(':');
        if (colon == std::string::npos) continue;
        auto point = text::canonical(item.substr(0, colon));
        if (point.empty()) continue;
        auto verdict = text::trim(item.substr(colon + 1));
        while (!verdict.empty() && (verdict.back() == '.' || verdict.back() == '*')) verdict.pop_back();
        out.emplace_back(std::move(point), cond::truth_from_string(verdict));
    }
    return out;
}

std::string render_slot(const Json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_array() && !value.empty()) {
        std::vector<std::string> items;
        for (const auto& v : value) {
            if (!v.is_string()) return value.dump(2);
            items.push_back(v.get<std::string>());
        }
        return render_numbered_list(items);
    }
    return value.dump(2);
}

}  // namespace epiplan::model
