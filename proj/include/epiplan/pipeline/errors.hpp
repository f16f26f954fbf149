#pragma once

#include <stdexcept>
#include <string>

#include "epiplan/common/errors.hpp"

namespace epiplan::pipeline {

// The model named something outside the candidate list.
class UnrecognizedDisease : public RetryableError {
public:
    explicit UnrecognizedDisease(std::string answer)
        : RetryableError("model answer is not a known disease: \"" + answer + "\""), answer_(std::move(answer)) {}
    const std::string& answer() const { return answer_; }

private:
    std::string answer_;
};

class UnparseableStructuring : public RetryableError {
public:
    using RetryableError::RetryableError;
};

class NoConditionPoints : public RetryableError {
public:
    using RetryableError::RetryableError;
};

class ModelOutputNotArray : public RetryableError {
public:
    using RetryableError::RetryableError;
};

class MalformedTaskItem : public RetryableError {
public:
    using RetryableError::RetryableError;
};

class SessionClosed : public std::runtime_error {
public:
    explicit SessionClosed(const std::string& id) : std::runtime_error("session " + id + " is closed") {}
};

class MissingFeedback : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidFeedbackIndex : public std::runtime_error {
public:
    InvalidFeedbackIndex(std::size_t index, std::size_t round_size)
        : std::runtime_error("feedback index " + std::to_string(index) + " is outside the previous round of " +
                             std::to_string(round_size) + " item(s)"),
          index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

}  // namespace epiplan::pipeline
