#include "lvggm/sym_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lvggm/errors.hpp"

namespace lvggm {

SymMatrix::SymMatrix(std::size_t p, std::vector<double> entries, double asym_tol)
    : dim_(p), a_(std::move(entries)) {
    if (p == 0 || a_.size() != p * p) {
        throw std::invalid_argument("SymMatrix: entry count does not match dimension");
    }
    for (double v : a_) {
        if (!std::isfinite(v)) throw std::invalid_argument("SymMatrix: non-finite entry");
    }
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double d = std::fabs(a_[i * p + j] - a_[j * p + i]);
            if (d > asym_tol) {
                throw std::invalid_argument("SymMatrix: asymmetry " + std::to_string(d) +
                                            " exceeds tolerance");
            }
            const double m = 0.5 * (a_[i * p + j] + a_[j * p + i]);
            a_[i * p + j] = m;
            a_[j * p + i] = m;
        }
    }
}

SymMatrix SymMatrix::identity(std::size_t p) {
    SymMatrix m(p);
    for (std::size_t i = 0; i < p; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
}

bool SymMatrix::is_finite() const {
    for (double v : a_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

double entrywise_max_norm(const SymMatrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::fabs(v));
    return m;
}

double matrix_one_norm(const SymMatrix& a) {
    const std::size_t p = a.dim();
    double m = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < p; ++j) row += std::fabs(a(i, j));
        m = std::max(m, row);
    }
    return m;
}

void write_matrix(std::ostream& os, const SymMatrix& a) {
    const std::size_t p = a.dim();
    os << p << "\n";
    char buf[40];
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", a(i, j));
            os << buf << (j + 1 == p ? "" : " ");
        }
        os << "\n";
    }
}

void write_matrix_file(const std::string& path, const SymMatrix& a) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_matrix(os, a);
    if (!os) throw IoError("write failed: " + path);
}

SymMatrix read_matrix(std::istream& is) {
    long long p = 0;
    if (!(is >> p) || p <= 0) throw IoError("matrix text: bad dimension line");
    std::vector<double> entries(static_cast<std::size_t>(p) * p);
    for (auto& v : entries) {
        if (!(is >> v)) throw IoError("matrix text: truncated entries");
    }
    try {
        return SymMatrix(static_cast<std::size_t>(p), std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("matrix text: ") + e.what());
    }
}

SymMatrix read_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path);
    return read_matrix(is);
}

} // namespace lvggm
