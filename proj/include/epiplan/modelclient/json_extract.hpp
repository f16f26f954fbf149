#pragma once

#include <string>
#include <string_view>

#include "epiplan/common/errors.hpp"
#include "epiplan/common/json.hpp"

namespace epiplan::model {

class NoJsonFound : public RetryableError {
public:
    explicit NoJsonFound(std::string excerpt)
        : RetryableError("no JSON value found in model output: \"" + excerpt + "\""), excerpt_(std::move(excerpt)) {}
    const std::string& excerpt() const { return excerpt_; }

private:
    std::string excerpt_;
};

// Returns the first balanced object or array in `text` that parses, after
// dropping trailing commas. Surrounding prose and code fences are ignored.
Json extract_json_value(std::string_view text);

}  // namespace epiplan::model
