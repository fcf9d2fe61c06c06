#ifndef CUSPLAB_ERRORS_HPP
#define CUSPLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cusplab {

/// Argument outside its admissible range (radius off the grid, bad config value, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid model parameter (eta <= 1, lambda outside (0,1), degenerate metric, ...).
class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// Radial grid unusable for the requested stencil.
class GridError : public std::runtime_error {
public:
    explicit GridError(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent or over-determined boundary data in an inverse solve.
class BoundaryError : public std::runtime_error {
public:
    explicit BoundaryError(const std::string& what) : std::runtime_error(what) {}
};

/// A hypothesis of one of the ODE rate lemmas is violated (resonance, repeated roots).
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

/// Rate decomposition could not be certified; carries the worst grid node.
class DecompositionError : public std::runtime_error {
public:
    DecompositionError(const std::string& what, double worst_r, double worst_ratio)
        : std::runtime_error(what), worst_r(worst_r), worst_ratio(worst_ratio) {}
    double worst_r;
    double worst_ratio;
};

/// Trivial-variation extraction failed (growing coefficient, trace violation, bad sigma).
class ExtractionError : public std::runtime_error {
public:
    explicit ExtractionError(const std::string& what) : std::runtime_error(what) {}
};

/// A bootstrap step lost one of its certified inequalities; carries the failing tag.
class StepError : public std::runtime_error {
public:
    StepError(const std::string& tag, const std::string& what)
        : std::runtime_error(what), tag(tag) {}
    std::string tag;
};

/// Non-finite samples fed into a check.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cusplab

#endif
