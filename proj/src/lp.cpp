#include "lvggm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lvggm/errors.hpp"

namespace lvggm {

namespace {

constexpr double kOptTol = 1e-9;    // reduced-cost / feasibility tolerance (repo-wide)
constexpr double kPivotEps = 1e-11; // smallest usable ratio-test denominator
constexpr double kPivotMin = 1e-13; // below this a forced pivot is a breakdown
constexpr long kMaxIterations = 200000;

struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;  // structural + slack + artificial
    std::vector<double> t; // rows x (cols + 1), rhs in last column
    std::vector<double> obj;
    double obj_shift = 0.0;
    std::vector<std::size_t> basis;     // basic column per row
    std::vector<char> allowed;          // column may enter the basis

    double& at(std::size_t i, std::size_t j) { return t[i * (cols + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t[i * (cols + 1) + j]; }
    double& rhs(std::size_t i) { return t[i * (cols + 1) + cols]; }
    double rhs(std::size_t i) const { return t[i * (cols + 1) + cols]; }
};

void pivot(Tableau& tb, std::size_t prow, std::size_t pcol) {
    const std::size_t w = tb.cols + 1;
    double* prowp = &tb.t[prow * w];
    const double pv = prowp[pcol];
    if (std::fabs(pv) < kPivotMin) {
        throw NumericalBreakdown("simplex: pivot magnitude " + std::to_string(pv));
    }
    const double inv = 1.0 / pv;
    for (std::size_t j = 0; j < w; ++j) prowp[j] *= inv;
    prowp[pcol] = 1.0;
    for (std::size_t i = 0; i < tb.rows; ++i) {
        if (i == prow) continue;
        double* rp = &tb.t[i * w];
        const double f = rp[pcol];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < w; ++j) rp[j] -= f * prowp[j];
        rp[pcol] = 0.0;
    }
    const double fo = tb.obj[pcol];
    if (fo != 0.0) {
        for (std::size_t j = 0; j < tb.cols; ++j) tb.obj[j] -= fo * prowp[j];
        tb.obj_shift -= fo * prowp[tb.cols];
        tb.obj[pcol] = 0.0;
    }
    tb.basis[prow] = pcol;
}

// Returns false when no entering column exists (optimal for current objective).
bool simplex_iterate(Tableau& tb, long& iterations, bool phase_two) {
    for (;;) {
        // Bland: entering column = lowest index with negative reduced cost.
        std::size_t enter = tb.cols;
        for (std::size_t j = 0; j < tb.cols; ++j) {
            if (tb.allowed[j] && tb.obj[j] < -kOptTol) {
                enter = j;
                break;
            }
        }
        if (enter == tb.cols) return true;

        // Ratio test in two passes: find the minimum ratio, then among rows
        // within tolerance of it pick the lowest basic variable index (Bland).
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tb.rows; ++i) {
            const double a = tb.at(i, enter);
            if (a > kPivotEps) best = std::min(best, tb.rhs(i) / a);
        }
        if (!std::isfinite(best)) {
            if (phase_two) return false;  // unbounded
            throw NumericalBreakdown("simplex: phase-1 column unbounded");
        }
        std::size_t leave = tb.rows;
        for (std::size_t i = 0; i < tb.rows; ++i) {
            const double a = tb.at(i, enter);
            if (a > kPivotEps && tb.rhs(i) / a <= best + 1e-12) {
                if (leave == tb.rows || tb.basis[i] < tb.basis[leave]) leave = i;
            }
        }
        pivot(tb, leave, enter);
        if (++iterations > kMaxIterations) {
            throw NumericalBreakdown("simplex: iteration limit exceeded");
        }
    }
}

} // namespace

LpSolution solve_lp(const LinearProgram& prog) {
    const std::size_t n = prog.num_vars;
    const std::size_t m = prog.num_constraints();
    if (n < 1 || m < 1 || prog.objective.size() != n || prog.constraint_matrix.size() != m * n) {
        throw std::invalid_argument("solve_lp: inconsistent program dimensions");
    }
    for (double v : prog.objective)
        if (!std::isfinite(v)) throw std::invalid_argument("solve_lp: non-finite objective");
    for (double v : prog.constraint_matrix)
        if (!std::isfinite(v)) throw std::invalid_argument("solve_lp: non-finite constraint");
    for (double v : prog.rhs)
        if (!std::isfinite(v)) throw std::invalid_argument("solve_lp: non-finite rhs");

    // Presolve: a row "-x_j <= 0" is a sign restriction, not a structural
    // constraint; folding it into the variable keeps the tableau small for
    // the split-variable programs the estimator generates.
    std::vector<char> nonneg(n, 0);
    std::vector<char> row_dropped(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        if (prog.rhs[i] != 0.0) continue;
        std::size_t nz = n;
        bool single = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (prog.constraint_matrix[i * n + j] != 0.0) {
                if (nz != n) {
                    single = false;
                    break;
                }
                nz = j;
            }
        }
        if (single && nz != n && prog.constraint_matrix[i * n + nz] < 0.0) {
            nonneg[nz] = 1;
            row_dropped[i] = 1;
        }
    }

    // Internal columns: x_j itself when sign-restricted, else a (+,-) pair.
    std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
    std::size_t ns = 0;
    for (std::size_t j = 0; j < n; ++j) {
        pos_col[j] = ns++;
        if (!nonneg[j]) neg_col[j] = ns++;
    }
    std::vector<std::size_t> kept_rows;
    for (std::size_t i = 0; i < m; ++i)
        if (!row_dropped[i]) kept_rows.push_back(i);
    const std::size_t mr = kept_rows.size();

    std::size_t n_art = 0;
    for (std::size_t i : kept_rows)
        if (prog.rhs[i] < 0.0) ++n_art;

    Tableau tb;
    tb.rows = mr;
    tb.cols = ns + mr + n_art;
    tb.t.assign(mr * (tb.cols + 1), 0.0);
    tb.obj.assign(tb.cols, 0.0);
    tb.basis.resize(mr);
    tb.allowed.assign(tb.cols, 1);

    std::size_t art = ns + mr;
    for (std::size_t r = 0; r < mr; ++r) {
        const std::size_t i = kept_rows[r];
        const double sign = prog.rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double g = prog.constraint_matrix[i * n + j];
            if (g == 0.0) continue;
            tb.at(r, pos_col[j]) = sign * g;
            if (neg_col[j] != SIZE_MAX) tb.at(r, neg_col[j]) = -sign * g;
        }
        tb.at(r, ns + r) = sign;  // slack
        tb.rhs(r) = sign * prog.rhs[i];
        if (sign < 0.0) {
            tb.at(r, art) = 1.0;
            tb.basis[r] = art++;
        } else {
            tb.basis[r] = ns + r;
        }
    }

    long iterations = 0;
    double rhs_scale = 1.0;
    for (double v : prog.rhs) rhs_scale = std::max(rhs_scale, std::fabs(v));

    if (n_art > 0) {
        // Phase 1: minimize the artificial sum.
        for (std::size_t j = ns + mr; j < tb.cols; ++j) tb.obj[j] = 1.0;
        for (std::size_t r = 0; r < mr; ++r) {
            if (tb.basis[r] >= ns + mr) {
                for (std::size_t j = 0; j < tb.cols; ++j) tb.obj[j] -= tb.at(r, j);
                tb.obj_shift -= tb.rhs(r);
            }
        }
        simplex_iterate(tb, iterations, false);
        const double phase1 = -tb.obj_shift;
        if (phase1 > kOptTol * rhs_scale) {
            LpSolution sol;
            sol.status = LpStatus::Infeasible;
            sol.iterations = static_cast<int>(iterations);
            return sol;
        }
        // Drive leftover artificials out of the basis; a row that offers no
        // structural pivot is redundant and its artificial stays parked at 0.
        for (std::size_t r = 0; r < mr; ++r) {
            if (tb.basis[r] < ns + mr) continue;
            std::size_t j = 0;
            for (; j < ns + mr; ++j) {
                if (std::fabs(tb.at(r, j)) > kPivotEps) break;
            }
            if (j < ns + mr) pivot(tb, r, j);
        }
        for (std::size_t j = ns + mr; j < tb.cols; ++j) tb.allowed[j] = 0;
    }

    // Phase 2 objective: structural costs priced against the current basis.
    std::fill(tb.obj.begin(), tb.obj.end(), 0.0);
    tb.obj_shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        tb.obj[pos_col[j]] = prog.objective[j];
        if (neg_col[j] != SIZE_MAX) tb.obj[neg_col[j]] = -prog.objective[j];
    }
    for (std::size_t r = 0; r < mr; ++r) {
        const double cb = tb.obj[tb.basis[r]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j < tb.cols; ++j) {
            if (j == tb.basis[r]) continue;
            tb.obj[j] -= cb * tb.at(r, j);
        }
        tb.obj_shift -= cb * tb.rhs(r);
        tb.obj[tb.basis[r]] = 0.0;
    }

    if (!simplex_iterate(tb, iterations, true)) {
        LpSolution sol;
        sol.status = LpStatus::Unbounded;
        sol.iterations = static_cast<int>(iterations);
        return sol;
    }

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.iterations = static_cast<int>(iterations);
    sol.x.assign(n, 0.0);
    std::vector<double> val(tb.cols, 0.0);
    for (std::size_t r = 0; r < mr; ++r) val[tb.basis[r]] = tb.rhs(r);
    for (std::size_t j = 0; j < n; ++j) {
        sol.x[j] = val[pos_col[j]];
        if (neg_col[j] != SIZE_MAX) sol.x[j] -= val[neg_col[j]];
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += prog.objective[j] * sol.x[j];
    sol.objective_value = obj;

    double worst = 0.0;
    for (std::size_t j = 0; j < tb.cols; ++j) {
        if (tb.allowed[j]) worst = std::min(worst, tb.obj[j]);
    }
    sol.max_reduced_cost_violation = -worst;

    // The returned point must satisfy every original row.
    for (std::size_t i = 0; i < m; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += prog.constraint_matrix[i * n + j] * sol.x[j];
        if (lhs > prog.rhs[i] + kOptTol * std::max(1.0, rhs_scale)) {
            throw NumericalBreakdown("simplex: solution violates row " + std::to_string(i) +
                                     " by " + std::to_string(lhs - prog.rhs[i]));
        }
    }
    return sol;
}

} // namespace lvggm
