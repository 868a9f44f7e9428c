#pragma once

#include <cstddef>
#include <vector>

namespace lvggm {

// Dense inequality-form linear program: minimize c'x subject to Gx <= h,
// x free. Sign restrictions are expressed as rows of G (e.g. -x_j <= 0).
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> objective;          // length num_vars
    std::vector<double> constraint_matrix;  // m x num_vars, row-major
    std::vector<double> rhs;                // length m

    std::size_t num_constraints() const { return rhs.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;          // populated when Optimal
    double objective_value = 0.0;   // c'x when Optimal
    // Certificate diagnostics at termination.
    double max_reduced_cost_violation = 0.0;  // max(0, -min reduced cost)
    int iterations = 0;
};

// Two-phase tableau simplex with Bland's anti-cycling rule. Deterministic:
// the pivot sequence is a pure function of the input. Throws
// NumericalBreakdown when forced onto a pivot of magnitude < 1e-13 or when
// the returned point violates feasibility beyond tolerance.
LpSolution solve_lp(const LinearProgram& prog);

} // namespace lvggm
