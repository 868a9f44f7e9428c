#include <doctest.h>

#include <cmath>

#include "lvggm/errors.hpp"
#include "lvggm/lp.hpp"
#include "lvggm/rng.hpp"
#include "oracles.hpp"

using namespace lvggm;

namespace {

LinearProgram make_lp(std::size_t n, std::vector<double> c, std::vector<double> g,
                      std::vector<double> h) {
    LinearProgram p;
    p.num_vars = n;
    p.objective = std::move(c);
    p.constraint_matrix = std::move(g);
    p.rhs = std::move(h);
    return p;
}

// Feasible bounded instance: h = G x0 + slack, box rows keep it bounded.
LinearProgram random_bounded_lp(std::size_t n, std::size_t extra_rows, Rng& rng) {
    std::vector<double> g, h, c;
    for (std::size_t i = 0; i < extra_rows; ++i) {
        for (std::size_t j = 0; j < n; ++j) g.push_back(rng.uniform(-1.0, 1.0));
    }
    std::vector<double> x0(n);
    for (double& v : x0) v = rng.uniform(-2.0, 2.0);
    for (std::size_t i = 0; i < extra_rows; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += g[i * n + j] * x0[j];
        h.push_back(lhs + rng.uniform(0.1, 1.0));
    }
    for (std::size_t j = 0; j < n; ++j) {  // box: |x_j| <= 6
        std::vector<double> row(n, 0.0);
        row[j] = 1.0;
        g.insert(g.end(), row.begin(), row.end());
        h.push_back(6.0);
        row[j] = -1.0;
        g.insert(g.end(), row.begin(), row.end());
        h.push_back(6.0);
    }
    for (std::size_t j = 0; j < n; ++j) c.push_back(rng.uniform(-1.0, 1.0));
    return make_lp(n, std::move(c), std::move(g), std::move(h));
}

} // namespace

TEST_CASE("one-variable program") {
    // min x subject to x >= 1 (as -x <= -1) and x <= 3
    LinearProgram p = make_lp(1, {1.0}, {-1.0, 1.0}, {-1.0, 3.0});
    LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetric corner") {
    // min x1 + x2 subject to x >= 0, x1 + x2 >= 2
    LinearProgram p = make_lp(2, {1.0, 1.0},
                              {-1.0, 0.0, 0.0, -1.0, -1.0, -1.0},
                              {0.0, 0.0, -2.0});
    LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("infeasible and unbounded statuses") {
    // x <= -1 and -x <= -1 cannot both hold
    LinearProgram inf = make_lp(1, {1.0}, {1.0, -1.0}, {-1.0, -1.0});
    CHECK(solve_lp(inf).status == LpStatus::Infeasible);

    // min -x subject to x >= 0
    LinearProgram unb = make_lp(1, {-1.0}, {-1.0}, {0.0});
    CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("feasibility and optimality certificates on random instances") {
    Rng rng(2024);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + t % 4;
        LinearProgram p = random_bounded_lp(n, 2 + t % 5, rng);
        LpSolution s = solve_lp(p);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.max_reduced_cost_violation <= 1e-9);
        for (std::size_t i = 0; i < p.num_constraints(); ++i) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += p.constraint_matrix[i * n + j] * s.x[j];
            CHECK(lhs <= p.rhs[i] + 1e-9);
        }
        auto oracle = oracles::lp_vertex_min(p);
        REQUIRE(oracle.has_value());
        CHECK(std::fabs(s.objective_value - *oracle) <= 1e-7);
    }
}

TEST_CASE("objective scaling by powers of two leaves the argmin bitwise unchanged") {
    Rng rng(55);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + t % 3;
        LinearProgram p = random_bounded_lp(n, 3, rng);
        LpSolution base = solve_lp(p);
        REQUIRE(base.status == LpStatus::Optimal);
        for (double lambda : {2.0, 0.5, 8.0}) {
            LinearProgram q = p;
            for (double& c : q.objective) c *= lambda;
            LpSolution s = solve_lp(q);
            REQUIRE(s.status == LpStatus::Optimal);
            CHECK(s.x == base.x);
            CHECK(s.objective_value == lambda * base.objective_value);
        }
    }
}

TEST_CASE("input validation") {
    LinearProgram p;
    CHECK_THROWS_AS(solve_lp(p), std::invalid_argument);
    p = make_lp(1, {std::nan("")}, {1.0}, {1.0});
    CHECK_THROWS_AS(solve_lp(p), std::invalid_argument);
}
