#pragma once

#include <stdexcept>
#include <string>

namespace swagg {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input file/column does not match the expected schema.
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error("schema: " + msg) {}
};

// Invalid configuration value or combination.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

// Column has no records after filtering.
struct EmptyColumnError : Error {
    explicit EmptyColumnError(const std::string& msg) : Error("empty column: " + msg) {}
};

// Observed counts contradict a manually forced assumption.
struct AssumptionViolationError : Error {
    explicit AssumptionViolationError(const std::string& msg)
        : Error("assumption violation: " + msg) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain: " + msg) {}
};

}  // namespace swagg
