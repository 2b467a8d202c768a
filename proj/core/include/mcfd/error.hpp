#pragma once

#include <stdexcept>
#include <string>

namespace mcfd {

/// Rejected input: odd N, non-positive volatility, mismatched lengths, ...
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Zero or near-zero pivot during tridiagonal elimination.
class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The correcting-to-convergence iteration did not reach its tolerance.
class InnerIterationDivergence : public std::runtime_error {
public:
    InnerIterationDivergence(const std::string& what, int level, double last_update)
        : std::runtime_error(what), level_(level), last_update_(last_update) {}

    int level() const noexcept { return level_; }
    double last_update() const noexcept { return last_update_; }

private:
    int level_;
    double last_update_;
};

}  // namespace mcfd
