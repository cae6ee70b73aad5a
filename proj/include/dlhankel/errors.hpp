#ifndef DLHANKEL_ERRORS_HPP
#define DLHANKEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dlhankel {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive refinement exhausted without reaching the requested accuracy.
// Carries the last two estimates as decimal strings for post-mortem.
struct PrecisionError : std::runtime_error {
    std::string last_estimate;
    std::string previous_estimate;
    PrecisionError(const std::string& what, std::string last = "", std::string prev = "")
        : std::runtime_error(what), last_estimate(std::move(last)),
          previous_estimate(std::move(prev)) {}
};

// Two independent routes to the same quantity disagree beyond tolerance.
struct DataIntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A structural invariant of a computed table failed its self-check.
struct InternalConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dlhankel

#endif
