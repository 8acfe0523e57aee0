#pragma once

#include <stdexcept>
#include <string>

namespace fluxtrap {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Text could not be parsed.  Carries a byte offset into the input.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Symbol registration / lookup problems (duplicate names, unknown
/// identifiers, table mismatches).
class SymbolError : public Error {
public:
    using Error::Error;
};

/// Division by an expression that normalizes to zero.
class DivisionByZeroError : public Error {
public:
    using Error::Error;
};

/// Invalid substitution: recursive bindings or a denominator that
/// vanishes under the substitution.
class SubstitutionError : public Error {
public:
    using Error::Error;
};

/// A model does not fit the supported class (nonquadratic velocities,
/// coordinate-dependent mass, malformed kinetic designation, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Constraint-algorithm failures: chain overflow, non-invertible
/// constraint matrix where an inverse is required, bad reductions.
class ConstraintError : public Error {
public:
    using Error::Error;
};

class NonInvertibleMatrixError : public ConstraintError {
public:
    using ConstraintError::ConstraintError;
};

class QuantizationBlockedError : public ConstraintError {
public:
    using ConstraintError::ConstraintError;
};

/// Quantization-stage failures (not an oscillator, ordering-ambiguous
/// input, commuting mechanical momenta).
class QuantizeError : public Error {
public:
    using Error::Error;
};

class CommutingMomentaError : public QuantizeError {
public:
    using QuantizeError::QuantizeError;
};

/// Floating-point stage failures (bad grids, unstable integrations,
/// unresolved spectra).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace fluxtrap
