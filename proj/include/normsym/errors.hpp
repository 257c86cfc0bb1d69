#pragma once

#include <stdexcept>
#include <string>

namespace normsym {

// Error taxonomy of the library. Every throwing operation documents which of
// these it can raise; all carry a human-readable message.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct VectorOutsideRadius : Error { using Error::Error; };
struct PointOutsideRadius : Error { using Error::Error; };
struct ShootingDiverged : Error {
    double residual = 0.0;
    ShootingDiverged(const std::string& msg, double res) : Error(msg), residual(res) {}
};

// symbols / jets
struct JetDepthExceeded : Error { using Error::Error; };
struct StepUnderflow : Error {
    double residual = 0.0;
    StepUnderflow(const std::string& msg, double res) : Error(msg), residual(res) {}
};
struct NonDecreasingOrders : Error { using Error::Error; };

// jets_phase
struct DepthExceeded : Error { using Error::Error; };
struct OracleMismatch : Error { using Error::Error; };

// calculus
struct ShapeMismatch : Error { using Error::Error; };
struct ClassMismatch : Error { using Error::Error; };

// quantize
struct NyquistExceeded : Error { using Error::Error; };
struct ResolutionInsufficient : Error { using Error::Error; };

// elliptic
struct NotEllipticError : Error { using Error::Error; };
struct NotConvergedError : Error { using Error::Error; };

// cli
struct ParseError : Error { using Error::Error; };
struct ScenarioInvalid : Error { using Error::Error; };

} // namespace normsym
