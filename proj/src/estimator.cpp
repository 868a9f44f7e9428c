#include "lvggm/estimator.hpp"

#include <cmath>
#include <string>

#include "lvggm/errors.hpp"
#include "lvggm/linalg.hpp"
#include "lvggm/lp.hpp"

namespace lvggm {

void EstimatorConfig::validate() const {
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!pos(C1) || !pos(C3) || !pos(Mp_proxy) || !pos(lp_tol) || !pos(cond_limit)) {
        throw std::invalid_argument("EstimatorConfig: all fields must be positive and finite");
    }
}

double compute_tau(std::size_t p, std::size_t n, const EstimatorConfig& cfg) {
    if (p < 2 || n < 2) throw std::invalid_argument("compute_tau: need p >= 2 and n >= 2");
    cfg.validate();
    return cfg.C1 * cfg.Mp_proxy *
           std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

LinearProgram clime_column_program(const SymMatrix& sigma_n, std::size_t col_index, double tau) {
    const std::size_t p = sigma_n.dim();
    if (col_index >= p) throw std::invalid_argument("clime_column: column out of range");
    if (!(tau > 0.0)) throw std::invalid_argument("clime_column: tau must be positive");

    // Variables (b+, b-), objective sum of both halves. Rows: the 2p-row
    // residual band |Sigma_n b - e|_inf <= tau, then -b <= 0 for each half
    // (the Gx <= h encoding of the sign restrictions).
    LinearProgram prog;
    prog.num_vars = 2 * p;
    prog.objective.assign(2 * p, 1.0);
    const std::size_t m = 4 * p;
    prog.constraint_matrix.assign(m * 2 * p, 0.0);
    prog.rhs.assign(m, 0.0);

    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t j = 0; j < p; ++j) {
            const double v = sigma_n(r, j);
            prog.constraint_matrix[r * 2 * p + j] = v;
            prog.constraint_matrix[r * 2 * p + p + j] = -v;
            prog.constraint_matrix[(p + r) * 2 * p + j] = -v;
            prog.constraint_matrix[(p + r) * 2 * p + p + j] = v;
        }
        const double e = (r == col_index) ? 1.0 : 0.0;
        prog.rhs[r] = tau + e;
        prog.rhs[p + r] = tau - e;
    }
    for (std::size_t j = 0; j < 2 * p; ++j) {
        prog.constraint_matrix[(2 * p + j) * 2 * p + j] = -1.0;
    }
    return prog;
}

std::vector<double> clime_column(const SymMatrix& sigma_n, std::size_t col_index, double tau,
                                 double lp_tol) {
    const std::size_t p = sigma_n.dim();
    (void)lp_tol;  // the solver's fixed 1e-9 tolerances already match the repo-wide value
    const LinearProgram prog = clime_column_program(sigma_n, col_index, tau);
    const LpSolution sol = solve_lp(prog);
    if (sol.status != LpStatus::Optimal) {
        throw SolverDegenerate("clime_column " + std::to_string(col_index) +
                               ": LP returned a non-optimal status; adjust tau or regularize "
                               "the sample covariance");
    }
    std::vector<double> beta(p);
    for (std::size_t j = 0; j < p; ++j) beta[j] = sol.x[j] - sol.x[p + j];
    return beta;
}

SquareMatrix clime_estimate(const SymMatrix& sigma_n, double tau, double lp_tol) {
    const std::size_t p = sigma_n.dim();
    SquareMatrix s1(p);
    for (std::size_t c = 0; c < p; ++c) {
        std::vector<double> beta;
        try {
            beta = clime_column(sigma_n, c, tau, lp_tol);
        } catch (const SolverDegenerate& e) {
            throw SolverDegenerate("clime_estimate at column " + std::to_string(c) + ": " +
                                   e.what());
        }
        for (std::size_t i = 0; i < p; ++i) s1(i, c) = beta[i];
    }
    return s1;
}

SymMatrix symmetrize_min(const SquareMatrix& s1) {
    const std::size_t p = s1.dim;
    SymMatrix out(p);
    for (std::size_t i = 0; i < p; ++i) {
        out.set(i, i, s1(i, i));
        for (std::size_t j = i + 1; j < p; ++j) {
            const double a = s1(i, j);  // upper-triangle entry wins ties
            const double b = s1(j, i);
            out.set(i, j, std::fabs(b) < std::fabs(a) ? b : a);
        }
    }
    return out;
}

SymMatrix threshold_support(const SymMatrix& s_hat, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("threshold_support: negative threshold");
    const std::size_t p = s_hat.dim();
    SymMatrix out(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            const double v = s_hat(i, j);
            out.set(i, j, std::fabs(v) > threshold ? v : 0.0);
        }
    return out;
}

SparseEstimate estimate_sparse(const SymMatrix& sigma_n, std::size_t n,
                               const EstimatorConfig& cfg) {
    const std::size_t p = sigma_n.dim();
    SparseEstimate est;
    est.tau_n = compute_tau(p, n, cfg);
    est.sparse_threshold = 9.0 * cfg.Mp_proxy * est.tau_n;
    est.S_hat1 = clime_estimate(sigma_n, est.tau_n, cfg.lp_tol);

    double slack = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) s += sigma_n(i, k) * est.S_hat1(k, j);
            slack = std::max(slack, std::fabs(s - (i == j ? 1.0 : 0.0)));
        }
    est.feasibility_slack = slack;

    est.S_hat = symmetrize_min(est.S_hat1);
    est.S_tilde = threshold_support(est.S_hat, est.sparse_threshold);
    return est;
}

LowRankEstimate estimate_lowrank(const SymMatrix& sigma_n, const SymMatrix& s_tilde,
                                 std::size_t n, const EstimatorConfig& cfg) {
    cfg.validate();
    const std::size_t p = sigma_n.dim();
    if (n < 2) throw std::invalid_argument("estimate_lowrank: n must be >= 2");

    LowRankEstimate est;
    est.eigen_threshold =
        cfg.C3 * std::sqrt(static_cast<double>(p) / static_cast<double>(n));
    // S_tilde targets the sparse part and the inverse targets the full
    // precision (sparse minus low-rank), so S_tilde minus the inverse is the
    // low-rank estimate. The opposite orientation would flip the spectrum
    // negative and nothing could clear the positive eigenvalue cut.
    est.L_hat = s_tilde - spd_inverse(sigma_n, cfg.cond_limit);

    const EigenDecomposition ed = eig_sym(est.L_hat);
    est.eigenvalues = ed.values;
    std::vector<bool> keep(p, false);
    for (std::size_t k = 0; k < p; ++k) {
        if (ed.values[k] > est.eigen_threshold) {
            keep[k] = true;
            ++est.rank_estimate;
        } else if (ed.values[k] < 0.0) {
            ++est.negative_discarded;
        }
    }
    est.L_tilde = reconstruct(ed, keep);
    return est;
}

EstimateResult estimate(const SymMatrix& sigma_n, std::size_t n, const EstimatorConfig& cfg) {
    EstimateResult r;
    r.sparse = estimate_sparse(sigma_n, n, cfg);
    r.lowrank = estimate_lowrank(sigma_n, r.sparse.S_tilde, n, cfg);
    return r;
}

std::vector<int> sign_pattern(const SymMatrix& s) {
    const std::size_t p = s.dim();
    std::vector<int> out(p * p, 0);
    for (std::size_t k = 0; k < p * p; ++k) {
        const double v = s.data()[k];
        out[k] = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    }
    return out;
}

} // namespace lvggm
