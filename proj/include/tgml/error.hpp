#pragma once

#include <stdexcept>
#include <string>

namespace tgml {

/// Argument outside the mathematical domain of a model (negative temperature,
/// degree of cure outside [0, 1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Free-volume denominator of the diffusion cure law collapsed.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure inside the heat-transfer solver. `time` is the
/// simulated time (s) at which the failure was detected.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Malformed config, model, or dataset file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tgml
