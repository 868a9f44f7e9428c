#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lvggm/errors.hpp"
#include "lvggm/linalg.hpp"
#include "lvggm/rng.hpp"
#include "lvggm/sym_matrix.hpp"
#include "oracles.hpp"

using namespace lvggm;

TEST_CASE("SymMatrix constructor symmetrizes and validates") {
    CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(SymMatrix(2, {1.0, std::nan(""), std::nan(""), 1.0}), std::invalid_argument);
    // small asymmetry within tolerance is averaged away
    SymMatrix m(2, {1.0, 2.0 + 2e-13, 2.0 - 2e-13, 1.0});
    CHECK(m(0, 1) == m(1, 0));
}

TEST_CASE("entrywise max norm") {
    CHECK(entrywise_max_norm(SymMatrix(3)) == 0.0);
    CHECK(entrywise_max_norm(SymMatrix::identity(3)) == 1.0);
    SymMatrix m(2, {1.0, -4.0, -4.0, 2.0});
    CHECK(entrywise_max_norm(m) == 4.0);
}

TEST_CASE("matrix one norm") {
    CHECK(matrix_one_norm(SymMatrix::identity(4)) == 1.0);
    SymMatrix m(2, {1.0, -4.0, -4.0, 2.0});
    CHECK(matrix_one_norm(m) == 6.0);

    Rng rng(11);
    for (int t = 0; t < 25; ++t) {
        SymMatrix a = oracles::random_symmetric(5, 3.0, rng);
        CHECK(matrix_one_norm(a) == doctest::Approx(oracles::one_norm_loops(a)).epsilon(1e-14));
    }
}

TEST_CASE("spd_inverse basics") {
    SymMatrix i3 = SymMatrix::identity(3);
    SymMatrix inv = spd_inverse(i3);
    CHECK(entrywise_max_norm(inv - i3) == 0.0);

    SymMatrix d = SymMatrix::diagonal({2.0, 4.0});
    SymMatrix dinv = spd_inverse(d);
    CHECK(dinv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(dinv(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(dinv(0, 1) == 0.0);
}

TEST_CASE("spd_inverse residual on random SPD") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        SymMatrix a = oracles::random_spd(6, 1.0, rng);
        SymMatrix b = spd_inverse(a);
        double resid = 0.0;
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < 6; ++k) s += a(i, k) * b(k, j);
                resid = std::max(resid, std::fabs(s - (i == j ? 1.0 : 0.0)));
            }
        CHECK(resid <= 1e-8);
    }
}

TEST_CASE("spd_inverse error paths") {
    SymMatrix indef(2, {1.0, 2.0, 2.0, 1.0});
    CHECK_THROWS_AS(spd_inverse(indef), NotPositiveDefinite);

    SymMatrix stiff = SymMatrix::diagonal({1.0, 1e8});
    CHECK_THROWS_AS(spd_inverse(stiff, 1e6), IllConditioned);
    CHECK_NOTHROW(spd_inverse(stiff, 1e12));
}

TEST_CASE("inverse of inverse returns the original") {
    Rng rng(23);
    for (int t = 0; t < 10; ++t) {
        SymMatrix a = oracles::random_spd(5, 0.5, rng);
        const double cond = matrix_one_norm(a) * matrix_one_norm(spd_inverse(a));
        SymMatrix back = spd_inverse(spd_inverse(a));
        CHECK(entrywise_max_norm(back - a) <= 1e-6 * cond * cond);
    }
}

TEST_CASE("eig_sym diagonal case with permuted identity vectors") {
    SymMatrix d = SymMatrix::diagonal({3.0, 1.0, 2.0});
    EigenDecomposition ed = eig_sym(d);
    REQUIRE(ed.values.size() == 3);
    CHECK(ed.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(ed.values[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ed.values[2] == doctest::Approx(1.0).epsilon(1e-14));
    // eigenvector k must be +-e_{original index}
    const std::size_t expect[3] = {0, 2, 1};
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::fabs(ed.vec(k, i)) ==
                  doctest::Approx(i == expect[k] ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("eig_sym 2x2 characteristic roots") {
    SymMatrix a(2, {2.0, 1.0, 1.0, 2.0});
    EigenDecomposition ed = eig_sym(a);
    CHECK(ed.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(ed.values[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig_sym trace, determinant, reconstruction, orthonormality") {
    Rng rng(99);
    for (int t = 0; t < 20; ++t) {
        SymMatrix a = oracles::random_symmetric(5, 2.0, rng);
        EigenDecomposition ed = eig_sym(a);
        const std::size_t p = 5;

        double tr = 0.0, sum = 0.0, prod = 1.0;
        for (std::size_t i = 0; i < p; ++i) tr += a(i, i);
        for (double v : ed.values) {
            sum += v;
            prod *= v;
        }
        CHECK(std::fabs(tr - sum) <= 1e-9 * p * entrywise_max_norm(a));
        const double det = oracles::determinant(a);
        CHECK(std::fabs(prod - det) <= 1e-6 * std::max(std::fabs(det), 1e-12));

        SymMatrix rec = reconstruct(ed, std::vector<bool>(p, true));
        CHECK(entrywise_max_norm(rec - a) <= 1e-8 * (1.0 + entrywise_max_norm(a)));

        double orth = 0.0;
        for (std::size_t k = 0; k < p; ++k)
            for (std::size_t l = 0; l < p; ++l) {
                double dot = 0.0;
                for (std::size_t i = 0; i < p; ++i) dot += ed.vec(k, i) * ed.vec(l, i);
                orth = std::max(orth, std::fabs(dot - (k == l ? 1.0 : 0.0)));
            }
        CHECK(orth <= 1e-10);
    }
}

TEST_CASE("eig_sym eigenvalues are permutation invariant") {
    Rng rng(5);
    SymMatrix a = oracles::random_symmetric(6, 1.5, rng);
    const std::size_t p = 6;
    const std::size_t perm[6] = {3, 0, 5, 1, 4, 2};
    SymMatrix b(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) b.set(i, j, a(perm[i], perm[j]));
    EigenDecomposition ea = eig_sym(a), eb = eig_sym(b);
    for (std::size_t k = 0; k < p; ++k)
        CHECK(std::fabs(ea.values[k] - eb.values[k]) <= 1e-10);
}

TEST_CASE("spectral norm") {
    CHECK(spectral_norm(SymMatrix::diagonal({-5.0, 2.0})) == doctest::Approx(5.0));
    CHECK(spectral_norm(SymMatrix::identity(4)) == doctest::Approx(1.0));

    // rank-1 uu' with ||u||_2 = 3 has spectral norm 9
    const std::vector<double> u = {2.0, 1.0, 2.0};
    SymMatrix r1(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i; j < 3; ++j) r1.set(i, j, u[i] * u[j]);
    CHECK(spectral_norm(r1) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("spectral norm bounded by one norm on symmetric matrices") {
    Rng rng(31);
    for (int t = 0; t < 40; ++t) {
        SymMatrix a = oracles::random_symmetric(2 + t % 7, 2.0, rng);
        CHECK(spectral_norm(a) <= matrix_one_norm(a) + 1e-10);
    }
}

TEST_CASE("matrix text format round trip and asymmetry rejection") {
    Rng rng(3);
    SymMatrix a = oracles::random_symmetric(4, 5.0, rng);
    std::stringstream ss;
    write_matrix(ss, a);
    SymMatrix b = read_matrix(ss);
    REQUIRE(b.dim() == a.dim());
    CHECK(a.data() == b.data());  // %.17g round trip is exact

    std::stringstream bad("2\n1.0 2.0\n2.5 1.0\n");
    CHECK_THROWS_AS(read_matrix(bad), IoError);
    std::stringstream truncated("3\n1 0 0\n0 1 0\n");
    CHECK_THROWS_AS(read_matrix(truncated), IoError);
}
