#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrbench {

// Invalid configuration or precondition violation on user-facing input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An LR evaluator was handed input it cannot evaluate (non-finite values etc).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the path oracle when a bin, acceptance window or kernel
// neighbourhood keeps too few simulated paths to estimate a density.
class InsufficientPathsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Wraps an evaluator failure with the index of the case that triggered it.
class CaseError : public std::runtime_error {
public:
    CaseError(std::uint64_t case_index, const std::string& what)
        : std::runtime_error("case " + std::to_string(case_index) + ": " + what),
          case_index_(case_index) {}

    std::uint64_t case_index() const noexcept { return case_index_; }

private:
    std::uint64_t case_index_;
};

}  // namespace lrbench
