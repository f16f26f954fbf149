#include "epiplan/common/text.hpp"

#include <cctype>

namespace epiplan::text {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
}  // namespace

std::string canonical(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(s.substr(start));
            break;
        }
        auto line = s.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = nl + 1;
    }
    return lines;
}

std::size_t find_word(std::string_view haystack, std::string_view needle, std::size_t from) {
    if (needle.empty()) return std::string::npos;
    while (from <= haystack.size()) {
        auto pos = haystack.find(needle, from);
        if (pos == std::string_view::npos) return std::string::npos;
        bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]) || !is_word_char(needle.front());
        auto end = pos + needle.size();
        bool right_ok = end == haystack.size() || !is_word_char(haystack[end]) || !is_word_char(needle.back());
        if (left_ok && right_ok) return pos;
        from = pos + 1;
    }
    return std::string::npos;
}

}  // namespace epiplan::text
