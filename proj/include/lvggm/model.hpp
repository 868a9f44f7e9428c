#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lvggm/rng.hpp"
#include "lvggm/sym_matrix.hpp"

namespace lvggm {

// Parameters of the synthetic model class: sparse precision component with
// at most s0 nonzeros per row and l1->1 norm at most Mp, plus a rank-r0
// incoherent PSD part, with the observed covariance spectrum confined to
// [1/M, M].
struct ModelSpec {
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t s0 = 1;   // max nonzeros per row of S*, diagonal included
    std::size_t r0 = 0;   // rank of L*
    double c0 = 10.0;     // incoherence constant: ||u_i||_inf <= sqrt(c0/p)
    double theta = 0.5;   // min magnitude of off-diagonal nonzeros of S*
    double sigma = 0.5;   // min nonzero eigenvalue of L*
    double Mp = 4.0;      // l1->1 budget for S* and L*
    double M = 100.0;     // spectral envelope for Sigma*
    std::uint64_t seed = 0;

    void validate() const;  // throws SpecInfeasible on malformed parameters
};

struct LatentModel {
    ModelSpec spec;
    SymMatrix S_star;
    SymMatrix L_star;
    SymMatrix Sigma_star;  // (S* - L*)^-1
    std::vector<std::pair<std::size_t, std::size_t>> support;  // i <= j, S*_ij != 0
    std::size_t true_rank = 0;
    double sigma_effective = 0.0;  // sigma after any feasibility rescaling of L*
    double M_effective = 0.0;      // max(lambda_max(Sigma*), 1/lambda_min(Sigma*))
};

// Sparse component: random symmetric support with at most s0-1 off-diagonal
// entries per row, magnitudes uniform in [theta, 2theta) with random sign,
// diagonal = row |off-diagonal| sum + U[1,2) (strict diagonal dominance).
SymMatrix generate_sparse_component(const ModelSpec& spec, Rng& rng);

// Low-rank component: Gaussian columns orthonormalized by modified
// Gram-Schmidt, accepted only if every column satisfies the incoherence
// bound (up to 1000 redraws), eigenvalues uniform in [sigma, 2 sigma).
SymMatrix generate_lowrank_component(const ModelSpec& spec, Rng& rng);
SymMatrix generate_lowrank_component(const ModelSpec& spec, double sigma, Rng& rng);

// Composes the generators, retrying with fresh randomness (and, after 100
// attempts, a 0.9 shrink of L* per further attempt) until S* - L* is
// positive definite and all class invariants hold.
LatentModel assemble_model(const ModelSpec& spec);

// (1/n) sum X X', X ~ N(0, Sigma*) via the Cholesky factor; the mean is
// known to be zero, so nothing is subtracted.
SymMatrix sample_covariance(const LatentModel& model, std::size_t n, Rng& rng);

// Runs every LatentModel invariant; returns human-readable violations
// (empty means the model is in-class). Used by tests and the CLI.
std::vector<std::string> check_model(const LatentModel& model);

// Realized minimum nonzero magnitude of S* (diagonal included), the
// theta the recovery conditions refer to.
double realized_theta(const SymMatrix& s_star);

// Model export/import: S.txt, L.txt, Sigma.txt in the shared matrix text
// format plus model.json carrying the spec, the support set and the
// recorded effective constants.
void save_model(const std::string& dir, const LatentModel& model);
LatentModel load_model(const std::string& dir);

// Stand-alone ModelSpec JSON files (CLI input format).
ModelSpec load_spec_file(const std::string& path);
void save_spec_file(const std::string& path, const ModelSpec& spec);

} // namespace lvggm
