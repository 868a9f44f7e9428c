#pragma once

#include <cstdint>
#include <vector>

#include "lvggm/lp.hpp"
#include "lvggm/sym_matrix.hpp"

namespace lvggm {

// Square dense matrix without a symmetry guarantee; carries the raw
// column-stacked solution S-hat-1 before min-magnitude symmetrization.
struct SquareMatrix {
    std::size_t dim = 0;
    std::vector<double> a;  // row-major

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t p) : dim(p), a(p * p, 0.0) {}
    double operator()(std::size_t i, std::size_t j) const { return a[i * dim + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a[i * dim + j]; }
};

struct EstimatorConfig {
    double C1 = 2.0;        // tau_n constant
    double C3 = 1.0;        // eigenvalue threshold constant
    double Mp_proxy = 1.0;  // Mp plugged into tau_n and the 9*Mp*tau cut
    double lp_tol = 1e-9;
    double cond_limit = 1e12;

    void validate() const;
};

// tau_n = C1 * Mp_proxy * sqrt(log(p) / n), natural log.
double compute_tau(std::size_t p, std::size_t n, const EstimatorConfig& cfg);

// One column of the constrained-l1 program: argmin ||b||_1 subject to
// ||Sigma_n b - e_col||_inf <= tau, via split variables b = b+ - b-.
std::vector<double> clime_column(const SymMatrix& sigma_n, std::size_t col_index, double tau,
                                 double lp_tol = 1e-9);

// The LP behind clime_column: variables (b+, b-), the 2p-row residual band,
// and the -b <= 0 encoding of the sign restrictions.
LinearProgram clime_column_program(const SymMatrix& sigma_n, std::size_t col_index, double tau);

// All p columns stacked; generally asymmetric.
SquareMatrix clime_estimate(const SymMatrix& sigma_n, double tau, double lp_tol = 1e-9);

// Picks the smaller-magnitude entry of each (i,j)/(j,i) pair; exact-magnitude
// ties resolve to the upper-triangle entry.
SymMatrix symmetrize_min(const SquareMatrix& s1);

// Keeps entries with |s_ij| strictly above the threshold, zeroes the rest.
SymMatrix threshold_support(const SymMatrix& s_hat, double threshold);

struct SparseEstimate {
    SquareMatrix S_hat1;
    SymMatrix S_hat;
    SymMatrix S_tilde;
    double tau_n = 0.0;
    double sparse_threshold = 0.0;    // 9 * Mp_proxy * tau_n
    double feasibility_slack = 0.0;   // ||Sigma_n S_hat1 - I||_inf
};

// compute_tau -> clime_estimate -> symmetrize_min -> threshold_support.
SparseEstimate estimate_sparse(const SymMatrix& sigma_n, std::size_t n,
                               const EstimatorConfig& cfg);

struct LowRankEstimate {
    SymMatrix L_hat;    // S_tilde - (Sigma_n)^-1
    SymMatrix L_tilde;  // eigenvalues kept strictly above the threshold
    std::size_t rank_estimate = 0;
    double eigen_threshold = 0.0;       // C3 * sqrt(p / n)
    std::vector<double> eigenvalues;    // of L_hat, descending
    std::size_t negative_discarded = 0; // eigenvalues < 0 dropped by the rule
};

// Requires an invertible sample covariance (n > p in practice); inversion
// failures propagate as NotPositiveDefinite / IllConditioned.
LowRankEstimate estimate_lowrank(const SymMatrix& sigma_n, const SymMatrix& s_tilde,
                                 std::size_t n, const EstimatorConfig& cfg);

// Full pipeline result as one record.
struct EstimateResult {
    SparseEstimate sparse;
    LowRankEstimate lowrank;
};

EstimateResult estimate(const SymMatrix& sigma_n, std::size_t n, const EstimatorConfig& cfg);

// Entrywise sign grid; exact zero maps to 0.
std::vector<int> sign_pattern(const SymMatrix& s);

} // namespace lvggm
