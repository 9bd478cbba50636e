#pragma once

#include <stdexcept>
#include <string>

namespace uavdc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a domain invariant. `field()` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error("invalid `" + field + "`: " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed scenario / plan / config text.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string field, const std::string& message)
        : Error(format(line, field, message)), line_(line), field_(std::move(field)) {}

    /// 1-based line, 0 when unknown.
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(std::size_t line, const std::string& field, const std::string& message) {
        std::string out = "parse error";
        if (line > 0) out += " at line " + std::to_string(line);
        if (!field.empty()) out += " (field `" + field + "`)";
        return out + ": " + message;
    }

    std::size_t line_;
    std::string field_;
};

class SchemaVersionError : public Error {
public:
    SchemaVersionError(int found, int expected)
        : Error("unsupported schema_version " + std::to_string(found) + " (expected " +
                std::to_string(expected) + ")"),
          found_(found), expected_(expected) {}

    int found() const noexcept { return found_; }
    int expected() const noexcept { return expected_; }

private:
    int found_;
    int expected_;
};

/// Even the direct start-to-end flight of some UAV exceeds its battery.
class InfeasibleScenarioError : public Error {
public:
    InfeasibleScenarioError(int uav_id, double required, double budget)
        : Error("UAV " + std::to_string(uav_id) + " cannot reach the end position: direct flight needs " +
                std::to_string(required) + " s of a " + std::to_string(budget) + " s budget"),
          uav_id_(uav_id) {}

    int uav_id() const noexcept { return uav_id_; }

private:
    int uav_id_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Brute-force enumeration refused because the instance is too large.
class OracleSizeError : public Error {
public:
    using Error::Error;
};

/// A fitness evaluation failed inside the optimizer.
class OptimizationError : public Error {
public:
    OptimizationError(int generation, std::size_t index, const std::string& message)
        : Error("fitness evaluation failed at generation " + std::to_string(generation) + ", individual " +
                std::to_string(index) + ": " + message),
          generation_(generation), index_(index) {}

    int generation() const noexcept { return generation_; }
    std::size_t index() const noexcept { return index_; }

private:
    int generation_;
    std::size_t index_;
};

}  // namespace uavdc
