#pragma once

#include <stdexcept>
#include <string>

namespace scgame {

/// Economy model violates a structural requirement (ordering, probabilities).
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// The minimum-potential condition fails: the market cannot clear even at
/// the lowest state. Kept apart from ModelError so callers can report it
/// distinctly.
struct AssumptionError : ModelError {
    explicit AssumptionError(const std::string& what) : ModelError(what) {}
};

/// A report policy or penalty analysis was used outside its contract.
struct PolicyError : std::runtime_error {
    explicit PolicyError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file problem, carries the offending line when known (1-based, 0 = n/a).
struct ConfigError : std::runtime_error {
    int line = 0;
    ConfigError(const std::string& what, int line_no = 0)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what : what),
          line(line_no) {}
};

} // namespace scgame
