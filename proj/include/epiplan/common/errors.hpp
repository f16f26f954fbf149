#pragma once

#include <stdexcept>
#include <string>

namespace epiplan {

// Failures worth another attempt: transport hiccups, timeouts and model
// output that could not be parsed. Anything else is permanent.
class RetryableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace epiplan
