#pragma once

#include <stdexcept>
#include <string>

namespace weq {

/// Malformed or out-of-contract input: bad CSV cells, missing columns,
/// out-of-range parameters. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what)
        : std::runtime_error(what) {}
};

/// A metric or conditioning cell has zero mass, or a metric name is unknown.
/// CLI exit code 3.
class UndefinedMetricError : public std::runtime_error {
public:
    explicit UndefinedMetricError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Requested sensitivity range has empty intersection with the feasible
/// epsilon bounds. CLI exit code 4.
class InfeasibleRangeError : public std::runtime_error {
public:
    explicit InfeasibleRangeError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace weq
