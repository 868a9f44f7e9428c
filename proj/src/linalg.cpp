#include "lvggm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lvggm/errors.hpp"

namespace lvggm {

std::vector<double> cholesky_factor(const SymMatrix& a) {
    const std::size_t p = a.dim();
    std::vector<double> l(p * p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l[j * p + k] * l[j * p + k];
        if (d <= 0.0 || !std::isfinite(d)) {
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) + " at column " +
                                      std::to_string(j));
        }
        l[j * p + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * p + k] * l[j * p + k];
            l[i * p + j] = s / l[j * p + j];
        }
    }
    return l;
}

SymMatrix spd_inverse(const SymMatrix& a, double cond_limit) {
    const std::size_t p = a.dim();
    const std::vector<double> l = cholesky_factor(a);

    // Solve L L^T X = I column by column.
    std::vector<double> inv(p * p, 0.0);
    std::vector<double> y(p);
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t i = 0; i < p; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= l[i * p + k] * y[k];
            y[i] = s / l[i * p + i];
        }
        for (std::size_t ii = p; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < p; ++k) s -= l[k * p + ii] * inv[k * p + c];
            inv[ii * p + c] = s / l[ii * p + ii];
        }
    }
    // Symmetrize the solve result.
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double m = 0.5 * (inv[i * p + j] + inv[j * p + i]);
            inv[i * p + j] = m;
            inv[j * p + i] = m;
        }
    }
    SymMatrix b(p, std::move(inv), 1e-6);

    const double cond1 = matrix_one_norm(a) * matrix_one_norm(b);
    if (cond1 > cond_limit) {
        throw IllConditioned("spd_inverse: condition estimate " + std::to_string(cond1) +
                             " exceeds limit " + std::to_string(cond_limit));
    }
    return b;
}

EigenDecomposition eig_sym(const SymMatrix& input, double tol) {
    const std::size_t p = input.dim();
    std::vector<double> a = input.data();
    std::vector<double> v(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) v[i * p + i] = 1.0;

    const double scale = entrywise_max_norm(input);
    const double stop = tol * (scale > 0.0 ? scale : 1.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) off = std::max(off, std::fabs(a[i * p + j]));
        if (off <= stop) {
            EigenDecomposition ed;
            ed.values.resize(p);
            ed.vectors.resize(p * p);
            // Sort descending; ties keep the lower original index first.
            std::vector<std::size_t> order(p);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return a[x * p + x] > a[y * p + y];
            });
            for (std::size_t k = 0; k < p; ++k) {
                const std::size_t c = order[k];
                ed.values[k] = a[c * p + c];
                for (std::size_t i = 0; i < p; ++i) ed.vectors[k * p + i] = v[i * p + c];
            }
            return ed;
        }
        // One cyclic sweep of rotations over the upper triangle.
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = i + 1; j < p; ++j) {
                const double apq = a[i * p + j];
                if (std::fabs(apq) <= stop) continue;
                const double app = a[i * p + i];
                const double aqq = a[j * p + j];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < p; ++k) {
                    const double aki = a[k * p + i];
                    const double akj = a[k * p + j];
                    a[k * p + i] = c * aki - s * akj;
                    a[k * p + j] = s * aki + c * akj;
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double aik = a[i * p + k];
                    const double ajk = a[j * p + k];
                    a[i * p + k] = c * aik - s * ajk;
                    a[j * p + k] = s * aik + c * ajk;
                }
                a[i * p + j] = 0.0;
                a[j * p + i] = 0.0;
                for (std::size_t k = 0; k < p; ++k) {
                    const double vki = v[k * p + i];
                    const double vkj = v[k * p + j];
                    v[k * p + i] = c * vki - s * vkj;
                    v[k * p + j] = s * vki + c * vkj;
                }
            }
        }
    }
    throw NoConvergence("eig_sym: no convergence within 100 sweeps");
}

double spectral_norm(const SymMatrix& a) {
    const EigenDecomposition ed = eig_sym(a);
    double m = 0.0;
    for (double l : ed.values) m = std::max(m, std::fabs(l));
    return m;
}

SymMatrix reconstruct(const EigenDecomposition& ed, const std::vector<bool>& keep) {
    const std::size_t p = ed.values.size();
    std::vector<double> out(p * p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        if (!keep[k]) continue;
        const double lam = ed.values[k];
        for (std::size_t i = 0; i < p; ++i) {
            const double li = lam * ed.vec(k, i);
            for (std::size_t j = i; j < p; ++j) {
                out[i * p + j] += li * ed.vec(k, j);
            }
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) out[j * p + i] = out[i * p + j];
    return SymMatrix(p, std::move(out), 1e-9);
}

} // namespace lvggm
