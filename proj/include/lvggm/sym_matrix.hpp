#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace lvggm {

// Dense symmetric p x p matrix, the carrier type for every covariance,
// precision and low-rank object in the pipeline. Entries are stored in
// full row-major form; the constructor enforces exact symmetry.
class SymMatrix {
public:
    SymMatrix() = default;

    // Zero matrix of dimension p.
    explicit SymMatrix(std::size_t p) : dim_(p), a_(p * p, 0.0) {}

    // From a full row-major grid. Rejects non-finite entries and any
    // asymmetry beyond asym_tol, then symmetrizes exactly via the mean of
    // the two mirror entries.
    SymMatrix(std::size_t p, std::vector<double> entries, double asym_tol = 1e-12);

    static SymMatrix identity(std::size_t p);
    static SymMatrix diagonal(const std::vector<double>& d);

    std::size_t dim() const { return dim_; }

    double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    // Symmetric write: sets both (i,j) and (j,i).
    void set(std::size_t i, std::size_t j, double v) {
        a_[i * dim_ + j] = v;
        a_[j * dim_ + i] = v;
    }

    const std::vector<double>& data() const { return a_; }

    bool is_finite() const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }

private:
    std::size_t dim_ = 0;
    std::vector<double> a_;
};

// max_ij |a_ij|
double entrywise_max_norm(const SymMatrix& a);

// ||A||_{1->1}: maximum absolute row sum.
double matrix_one_norm(const SymMatrix& a);

// Shared matrix text format: first line "p", then p rows of p
// space-separated decimals. Writing uses 17 significant digits so a
// round trip is lossless; parsing rejects asymmetry beyond 1e-12.
void write_matrix(std::ostream& os, const SymMatrix& a);
void write_matrix_file(const std::string& path, const SymMatrix& a);
SymMatrix read_matrix(std::istream& is);
SymMatrix read_matrix_file(const std::string& path);

} // namespace lvggm
