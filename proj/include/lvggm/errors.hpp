#pragma once

#include <stdexcept>
#include <string>

namespace lvggm {

// Error taxonomy shared across modules. Each condition a caller can
// meaningfully react to gets its own type; everything else is a plain
// std::runtime_error.

struct NotPositiveDefinite : std::runtime_error {
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct IllConditioned : std::runtime_error {
    explicit IllConditioned(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalBreakdown : std::runtime_error {
    explicit NumericalBreakdown(const std::string& what) : std::runtime_error(what) {}
};

struct SpecInfeasible : std::runtime_error {
    explicit SpecInfeasible(const std::string& what) : std::runtime_error(what) {}
};

struct IncoherenceUnreachable : std::runtime_error {
    explicit IncoherenceUnreachable(const std::string& what) : std::runtime_error(what) {}
};

struct SolverDegenerate : std::runtime_error {
    explicit SolverDegenerate(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lvggm
