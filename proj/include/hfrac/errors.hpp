#pragma once

#include <stdexcept>
#include <string>

namespace hfrac {

/// Mesh construction failed (empty interior, node budget, empty selection).
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inner or outer iteration did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A checked mathematical invariant failed beyond its slack.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration. `line` is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace hfrac
