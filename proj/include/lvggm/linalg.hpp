#pragma once

#include <vector>

#include "lvggm/sym_matrix.hpp"

namespace lvggm {

// Eigen-decomposition of a symmetric matrix: values sorted descending
// (ties broken by original index), vectors[k*p + i] holds component i of
// the eigenvector paired with values[k].
struct EigenDecomposition {
    std::vector<double> values;   // length p, descending
    std::vector<double> vectors;  // p x p, row k = eigenvector k

    double vec(std::size_t k, std::size_t i) const { return vectors[k * values.size() + i]; }
};

// Lower-triangular Cholesky factor of an SPD matrix. Throws
// NotPositiveDefinite when a pivot is <= 0.
std::vector<double> cholesky_factor(const SymMatrix& a);

// SPD inverse via Cholesky, symmetrized after the solve. Throws
// NotPositiveDefinite, or IllConditioned when the 1-norm condition
// estimate ||A|| * ||A^-1|| exceeds cond_limit.
SymMatrix spd_inverse(const SymMatrix& a, double cond_limit = 1e12);

// Cyclic Jacobi. Sweeps until every off-diagonal magnitude is at most
// tol * ||A||_max; throws NoConvergence after 100 sweeps.
EigenDecomposition eig_sym(const SymMatrix& a, double tol = 1e-12);

// max_i |lambda_i| from eig_sym.
double spectral_norm(const SymMatrix& a);

// Reconstructs V^T diag(values) V (with rows of `vectors` as eigenvectors);
// handy for tests and for the thresholded low-rank rebuild.
SymMatrix reconstruct(const EigenDecomposition& ed, const std::vector<bool>& keep);

} // namespace lvggm
