#pragma once

#include <stdexcept>
#include <string>

namespace sda {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input errors: the caller handed us something outside an operation's domain.
class DomainError : public Error { using Error::Error; };
class GridTooCoarse : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class DataError : public Error { using Error::Error; };
class EmptyCluster : public Error { using Error::Error; };
class DegenerateDesign : public Error { using Error::Error; };
class TooFewPoints : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

// Model construction.
class SeparationViolated : public Error { using Error::Error; };
class InvalidWeights : public Error { using Error::Error; };
class AssumptionViolated : public Error { using Error::Error; };

// Numerical failures.
class QuadratureError : public Error { using Error::Error; };
class NumericalError : public Error { using Error::Error; };

}  // namespace sda
