#include "epiplan/modelclient/json_extract.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace epiplan::model {

namespace {

// End (exclusive) of the balanced value opening at `start`, or nullopt when
// brackets mismatch or the text runs out.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
    std::vector<char> stack;
    bool in_string = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '{': stack.push_back('}'); break;
            case '[': stack.push_back(']'); break;
            case '}':
            case ']':
                if (stack.empty() || stack.back() != c) return std::nullopt;
                stack.pop_back();
                if (stack.empty()) return i + 1;
                break;
            default: break;
        }
    }
    return std::nullopt;
}

std::string strip_trailing_commas(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < s.size()) out.push_back(s[++i]);
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        if (c == ',') {
            std::size_t j = i + 1;
            while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

Json extract_json_value(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{' && text[i] != '[') continue;
        auto end = balanced_end(text, i);
        if (!end) continue;
        auto candidate = strip_trailing_commas(text.substr(i, *end - i));
        auto parsed = Json::parse(candidate, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }
    std::string excerpt(text.substr(0, 120));
    if (text.size() > 120) excerpt += "...";
    throw NoJsonFound(excerpt);
}

}  // namespace epiplan::model
