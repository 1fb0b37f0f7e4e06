#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dynwalk {

// Malformed input: bad matrices, rates, specs, files.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce an answer for well-formed input.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The chain has more than one closed communicating class, so its stationary
// law is not unique. Carries the classes found (state indices, ascending).
class ReducibleChainError : public SolverError {
public:
    ReducibleChainError(const std::string& what, std::vector<std::vector<std::size_t>> classes)
        : SolverError(what), classes_(std::move(classes)) {}

    const std::vector<std::vector<std::size_t>>& classes() const noexcept { return classes_; }

private:
    std::vector<std::vector<std::size_t>> classes_;
};

}  // namespace dynwalk
