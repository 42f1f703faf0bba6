#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace ouharvest {

// Violated precondition on a model or numerical input.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not meet its tolerance or exceeded a work cap.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A simulated path exceeded its configured step budget.
class StepCapExceeded : public NonConvergence {
public:
    using NonConvergence::NonConvergence;
};

// Not enough samples to form a trustworthy estimate.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest text that parses back to v; used to quote values in messages.
inline std::string show_value(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace ouharvest
