#pragma once

#include <stdexcept>
#include <string>

namespace spectral_torsion {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

struct UnsupportedDimension : Error {
    explicit UnsupportedDimension(int n)
        : Error("operation requires dimension 4, got " + std::to_string(n)) {}
};

// Raised when an input fails a structural identity; `identity` names it.
struct InvariantViolation : Error {
    InvariantViolation(std::string identity_name, const std::string& detail)
        : Error(identity_name + ": " + detail), identity(std::move(identity_name)) {}
    std::string identity;
};

struct ChiralSymmetricError : Error {
    ChiralSymmetricError() : Error("tr(gamma) = 0: no finite Barbero-Immirzi value") {}
};

// Malformed external input; `path` locates the offending field.
struct InputError : Error {
    InputError(std::string field_path, const std::string& detail)
        : Error(field_path + ": " + detail), path(std::move(field_path)) {}
    std::string path;
};

struct ConfigError : Error {
    using Error::Error;
};

// Numerical guard tripped (coarse grid, truncation, conditioning).
struct NumericalGuard : Error {
    using Error::Error;
};

}  // namespace spectral_torsion
