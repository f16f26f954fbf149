#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epiplan/common/json.hpp"
#include "epiplan/condlang/condition.hpp"

namespace epiplan::model {

// "1. first\n2. second"
std::string render_numbered_list(std::span<const std::string> items);

// Non-blank lines with any "1.", "1)", "-" or "*" marker removed.
std::vector<std::string> parse_list_items(std::string_view text);

using CaseLine = std::pair<std::string, cond::Truth>;

// "1. confirmed case: Yes" per line.
std::string render_structured_case(std::span<const CaseLine> lines);

// Lines of the form "<point>: <Yes|No|Unknown>"; the point is canonicalized.
// Lines without a colon are skipped; unrecognised verdicts read as Unknown.
std::vector<CaseLine> parse_structured_case(std::string_view text);

// How a structured value is spliced into a prompt: strings verbatim, arrays
// of strings as a numbered list, anything else as indented JSON.
std::string render_slot(const Json& value);

}  // namespace epiplan::model
