#pragma once

#include <stdexcept>
#include <string>

namespace vpr {

/// Malformed scenario text (bad syntax, unparsable number, unknown key).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A well-formed value that violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// The CIR targets admit no finite positive power vector (spectral radius of B >= 1).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(double spectral_radius)
        : std::runtime_error("infeasible interference system, spectral radius " +
                             std::to_string(spectral_radius)),
          spectral_radius_(spectral_radius) {}
    [[nodiscard]] double spectral_radius() const noexcept { return spectral_radius_; }

private:
    double spectral_radius_;
};

/// Power iteration did not settle (pathological input).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vpr
