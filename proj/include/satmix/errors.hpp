#pragma once

#include <stdexcept>
#include <string>

namespace satmix {

// Invalid configuration, geometry, or input validation failure.
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Base for runtime numerical failures. The CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Pure-Neumann/periodic right-hand side violates the discrete compatibility
// condition beyond tolerance.
struct IncompatibleRhs : NumericalError {
    explicit IncompatibleRhs(const std::string& msg) : NumericalError(msg) {}
};

// Iterative solver or optimizer hit its iteration cap.
struct NoConvergence : NumericalError {
    NoConvergence(const std::string& msg, double residual_, long iterations_)
        : NumericalError(msg), residual(residual_), iterations(iterations_) {}
    double residual = 0.0;
    long iterations = 0;
};

// Requested advection time step exceeds the stability bound.
struct CflViolation : NumericalError {
    explicit CflViolation(const std::string& msg) : NumericalError(msg) {}
};

// Both velocity fields vanish and no dt cap was supplied.
struct ZeroVelocityNoCap : NumericalError {
    explicit ZeroVelocityNoCap(const std::string& msg) : NumericalError(msg) {}
};

// Degenerate measure where positive mass is required.
struct ZeroMass : NumericalError {
    explicit ZeroMass(const std::string& msg) : NumericalError(msg) {}
};

// Transport distance requested between measures of unequal mass.
struct MassMismatch : NumericalError {
    explicit MassMismatch(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace satmix
