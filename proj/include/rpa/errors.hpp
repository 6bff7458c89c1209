#pragma once

#include <stdexcept>
#include <string>

namespace rpa {

// Base for all library errors so callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input validation.
class DimensionMismatch : public Error { using Error::Error; };
class InvalidInput : public Error { using Error::Error; };
class RankDeficientInput : public Error { using Error::Error; };
class NotSymmetric : public Error { using Error::Error; };

// Pole set validation.
class NotConjugateClosed : public Error { using Error::Error; };
class DuplicateSplitGroup : public Error { using Error::Error; };

// Numerical failures.
class ConvergenceFailure : public Error { using Error::Error; };
class DependentVectors : public Error { using Error::Error; };
class DependentRealImag : public Error { using Error::Error; };
class InsufficientRank : public Error { using Error::Error; };
class NumericalDegeneracy : public Error { using Error::Error; };
class SingularR : public Error { using Error::Error; };

// Problem-level failures.
class Uncontrollable : public Error { using Error::Error; };
class FeasibilityBreakdown : public Error { using Error::Error; };
class UnsupportedConfiguration : public Error { using Error::Error; };
class GenerationFailure : public Error { using Error::Error; };

}  // namespace rpa
