#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lvggm/errors.hpp"
#include "lvggm/harness.hpp"
#include "lvggm/linalg.hpp"
#include "lvggm/rng.hpp"

using namespace lvggm;

namespace {

ModelSpec harness_spec() {
    ModelSpec s;
    s.p = 12;
    s.n = 2000;
    s.s0 = 2;
    s.r0 = 1;
    s.c0 = 8.0;
    s.theta = 0.5;
    s.sigma = 0.3;
    s.Mp = 4.0;
    s.M = 100.0;
    s.seed = 1234;
    return s;
}

std::string strip_comment_lines(const std::string& text) {
    std::istringstream is(text);
    std::string line, out;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] == '#') continue;
        out += line;
        out += '\n';
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("assumption clause arithmetic") {
    CHECK(sample_size_condition(100, 1000000, 2.0));        // 0.01 <= 0.011048
    CHECK_FALSE(sample_size_condition(100, 1000000, 2.3));  // bound drops below 0.01
    CHECK_FALSE(sample_size_condition(40, 8000, 1.0));      // desk-scale n is never enough

    CHECK(sparsity_budget_condition(1.0, 2, 100));        // 2 <= sqrt(100/log 100) ~ 4.66
    CHECK_FALSE(sparsity_budget_condition(2.0, 2, 100));  // 8 > 4.66
}

TEST_CASE("theta margin clause is strictly greater-than") {
    ModelSpec spec = harness_spec();
    spec.r0 = 0;
    EstimatorConfig cfg;
    cfg.C1 = 2.0;
    cfg.Mp_proxy = 1.0;
    const double tau = compute_tau(spec.p, spec.n, cfg);
    const double cut = 18.0 * cfg.Mp_proxy * tau;

    // hand-built diagonal model whose smallest nonzero equals the cut exactly
    LatentModel m;
    m.spec = spec;
    std::vector<double> diag(spec.p, cut * 2.0);
    diag[3] = cut;
    m.S_star = SymMatrix::diagonal(diag);
    m.L_star = SymMatrix(spec.p);
    std::vector<double> inv(spec.p);
    for (std::size_t i = 0; i < spec.p; ++i) inv[i] = 1.0 / diag[i];
    m.Sigma_star = SymMatrix::diagonal(inv);
    m.true_rank = 0;
    m.M_effective = std::max(1.0 / cut, cut * 2.0) / 1.0;
    for (std::size_t i = 0; i < spec.p; ++i) m.support.emplace_back(i, i);

    AssumptionReport rep = check_assumptions(m, cfg);
    CHECK_FALSE(rep.theta_margin_ok);  // equality fails the strict inequality
    CHECK(rep.linf_L_within_Mp_tau);   // L* = 0
    CHECK(rep.sigma_margin_ok);        // vacuous at r0 = 0

    diag[3] = cut * 1.0000001;
    m.S_star = SymMatrix::diagonal(diag);
    CHECK(check_assumptions(m, cfg).theta_margin_ok);
}

TEST_CASE("run_replicate is deterministic and honest about noiseless recovery") {
    ModelSpec spec = harness_spec();
    EstimatorConfig cfg;
    cfg.C1 = 0.5;
    cfg.Mp_proxy = 1.0;
    cfg.C3 = 20.0;  // noiseless: L_hat carries only the clime shrink residual

    TrialReport a = run_replicate(spec, cfg, 0, 0, SampleMode::Noiseless);
    TrialReport b = run_replicate(spec, cfg, 0, 0, SampleMode::Noiseless);
    CHECK_FALSE(a.failed);
    CHECK(a.sign_recovered);  // theta = 0.5 well above the noiseless threshold
    CHECK(a.event_A_held);    // zero deviation
    CHECK(a.sup_error == b.sup_error);
    CHECK(a.spectral_error == b.spectral_error);
    CHECK(a.rank_estimate == b.rank_estimate);
    CHECK(a.spec.seed == b.spec.seed);

    // distinct replicate indices use distinct derived streams
    TrialReport c = run_replicate(spec, cfg, 0, 1, SampleMode::Noiseless);
    CHECK(c.spec.seed != a.spec.seed);

    // with no latent part the wide threshold yields rank 0 = true rank
    ModelSpec null_spec = spec;
    null_spec.r0 = 0;
    TrialReport d = run_replicate(null_spec, cfg, 0, 0, SampleMode::Noiseless);
    CHECK_FALSE(d.failed);
    CHECK(d.true_rank == 0);
    CHECK(d.rank_recovered);
}

TEST_CASE("pinned p=20, n=5000 replicate recovers the exact support") {
    // Pilot-calibrated configuration: C2 ~ 1.6 at this shape, so C1 = 3.2;
    // theta must sit near 30*Mp*tau here (the clime shrinkage fraction is
    // larger than at p=40) and the cell budgets are raised to admit it.
    ModelSpec spec;
    spec.p = 20;
    spec.n = 5000;
    spec.s0 = 2;
    spec.r0 = 1;
    spec.c0 = 10.0;
    spec.sigma = 0.3;
    spec.M = 1000.0;
    spec.seed = 0x20ACE;
    EstimatorConfig cfg;
    cfg.C1 = 3.2;
    cfg.Mp_proxy = 4.0;
    cfg.C3 = 1.0;
    const double tau = compute_tau(spec.p, spec.n, cfg);
    spec.theta = 30.0 * cfg.Mp_proxy * tau;
    spec.Mp = 4.0 * spec.theta + 2.5;

    TrialReport t = run_replicate(spec, cfg, 0, 0);
    CHECK_FALSE(t.failed);
    CHECK(t.sign_recovered);
}

TEST_CASE("pinned noiseless p=20 replicate recovers rank 1") {
    ModelSpec spec;
    spec.p = 20;
    spec.n = 5000;
    spec.s0 = 2;
    spec.r0 = 1;
    spec.c0 = 10.0;
    spec.theta = 0.5;
    spec.sigma = 0.5;
    spec.Mp = 4.5;
    spec.M = 100.0;
    spec.seed = 0x20ACF;
    EstimatorConfig cfg;
    cfg.C1 = 0.5;
    cfg.Mp_proxy = 1.0;
    cfg.C3 = 4.0;  // threshold 0.25: above the shrink residual, below sigma

    TrialReport t = run_replicate(spec, cfg, 0, 0, SampleMode::Noiseless);
    CHECK_FALSE(t.failed);
    CHECK(t.sign_recovered);
    CHECK(t.rank_estimate == 1);
    CHECK(t.rank_recovered);
}

TEST_CASE("failed replicates are recorded, not dropped") {
    ModelSpec spec = harness_spec();
    spec.n = 6;  // far below p: the sample covariance is singular
    EstimatorConfig cfg;
    TrialReport t = run_replicate(spec, cfg, 0, 0);
    CHECK(t.failed);
    CHECK_FALSE(t.failure.empty());
}

TEST_CASE("plan validation and cell expansion") {
    ExperimentPlan plan;
    plan.base_spec = harness_spec();
    plan.replicates = 2;
    plan.sweeps = {{"n", {1000, 2000}}, {"sigma", {0.2, 0.3, 0.4}}};
    const auto cells = expand_cells(plan);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0].spec.n == 1000);
    CHECK(cells[0].spec.sigma == 0.2);
    CHECK(cells[5].spec.n == 2000);
    CHECK(cells[5].spec.sigma == 0.4);
    CHECK(cells[3].index == 3);

    plan.sweeps = {{"bogus", {1.0}}};
    CHECK_THROWS_AS(plan.validate(), SpecInfeasible);
    plan.sweeps = {{"C3", {}}};
    CHECK_THROWS_AS(plan.validate(), SpecInfeasible);
}

TEST_CASE("run_plan: cardinality, determinism across thread counts, csv shape") {
    namespace fs = std::filesystem;
    ExperimentPlan plan;
    plan.base_spec = harness_spec();
    plan.base_spec.p = 8;
    plan.base_spec.n = 300;
    plan.replicates = 3;
    plan.sweeps = {{"theta", {0.4, 0.6}}};
    plan.estimator_cfg.C1 = 1.0;
    plan.estimator_cfg.Mp_proxy = 1.0;

    RunResult serial = run_plan(plan, 1);
    RunResult parallel = run_plan(plan, 8);
    REQUIRE(serial.trials.size() == 6);
    REQUIRE(parallel.trials.size() == 6);

    std::ostringstream s1, s2;
    write_trials_csv(s1, serial, /*with_timestamp=*/false);
    write_trials_csv(s2, parallel, false);
    CHECK(s1.str() == s2.str());

    // single cell, single replicate -> exactly one data row
    ExperimentPlan one;
    one.base_spec = plan.base_spec;
    one.replicates = 1;
    one.estimator_cfg = plan.estimator_cfg;
    RunResult r1 = run_plan(one, 1);
    std::ostringstream os;
    write_trials_csv(os, r1, false);
    const std::string body = strip_comment_lines(os.str());
    CHECK(std::count(body.begin(), body.end(), '\n') == 2);  // header + 1 row

    // execute_plan writes both files and reruns byte-identically modulo '#'
    const std::string dir1 = (fs::temp_directory_path() / "lvggm_run_a").string();
    const std::string dir2 = (fs::temp_directory_path() / "lvggm_run_b").string();
    execute_plan(plan, 1, dir1);
    execute_plan(plan, 8, dir2);
    CHECK(strip_comment_lines(slurp(dir1 + "/trials.csv")) ==
          strip_comment_lines(slurp(dir2 + "/trials.csv")));
    CHECK(slurp(dir1 + "/aggregates.json") == slurp(dir2 + "/aggregates.json"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("plan json round trip") {
    namespace fs = std::filesystem;
    ExperimentPlan plan;
    plan.base_spec = harness_spec();
    plan.replicates = 4;
    plan.sweeps = {{"n", {500, 1000}}, {"C3", {0.5, 1.0}}};
    plan.estimator_cfg.C1 = 3.25;
    plan.estimator_cfg.Mp_proxy = 2.0;
    plan.assumption_checks = false;
    plan.output_path = "results";

    const std::string path = (fs::temp_directory_path() / "lvggm_plan.json").string();
    save_plan(path, plan);
    ExperimentPlan back = load_plan(path);
    CHECK(back.base_spec.p == plan.base_spec.p);
    CHECK(back.base_spec.theta == plan.base_spec.theta);
    CHECK(back.replicates == plan.replicates);
    CHECK(back.sweeps == plan.sweeps);
    CHECK(back.estimator_cfg.C1 == plan.estimator_cfg.C1);
    CHECK(back.assumption_checks == plan.assumption_checks);
    CHECK(back.output_path == plan.output_path);
    fs::remove(path);
}

TEST_CASE("percentile helper uses nearest rank") {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    CHECK(percentile_nearest_rank(v, 0.95) == 95.0);
    CHECK(percentile_nearest_rank(v, 1.0) == 100.0);
    CHECK(percentile_nearest_rank({7.0}, 0.95) == 7.0);
    CHECK_THROWS_AS(percentile_nearest_rank({}, 0.5), std::invalid_argument);
}

TEST_CASE("oracle support threshold masks to the true support") {
    SymMatrix s_star(3);
    s_star.set(0, 0, 2.0);
    s_star.set(1, 1, 2.0);
    s_star.set(2, 2, 2.0);
    s_star.set(0, 1, 0.5);
    SymMatrix s_hat(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i; j < 3; ++j) s_hat.set(i, j, 1.0 + i + 3.0 * j);
    SymMatrix masked = oracle_support_threshold(s_hat, s_star);
    CHECK(masked(0, 1) == s_hat(0, 1));
    CHECK(masked(0, 2) == 0.0);
    CHECK(masked(1, 2) == 0.0);
    CHECK(masked(2, 2) == s_hat(2, 2));
}

TEST_CASE("calibrate_constants is reproducible and scale-stable in n") {
    ModelSpec spec = harness_spec();
    spec.p = 10;
    spec.n = 400;
    CalibrationResult a = calibrate_constants(spec, 50);
    CalibrationResult b = calibrate_constants(spec, 50);
    CHECK(a.C2 == b.C2);
    CHECK(a.C3 == b.C3);
    CHECK(a.C1 == 2.0 * a.C2);
    CHECK(a.C2 > 0.0);
    CHECK(a.C3 > 0.0);

    ModelSpec doubled = spec;
    doubled.n = 800;
    CalibrationResult c = calibrate_constants(doubled, 50);
    CHECK(std::fabs(c.C2 - a.C2) <= 0.25 * a.C2);  // C2 tracks M, not n

    CHECK_THROWS_AS(calibrate_constants(spec, 10), std::invalid_argument);
}

TEST_CASE("covariance tail check: exceedance rate under calibrated C2 and monotonicity") {
    // p=20, n=500 replicate batch; C2 from a 300-pilot calibration at the
    // same configuration, fresh replicates evaluated against it.
    ModelSpec spec = harness_spec();
    spec.p = 20;
    spec.n = 500;
    spec.seed = 777;
    const double q = std::sqrt(std::log(20.0) / 500.0);

    std::vector<double> pilot;
    for (std::size_t k = 0; k < 300; ++k) {
        Rng keys = Rng::stream(spec.seed, 100, k);
        ModelSpec rs = spec;
        rs.seed = keys.next_u64();
        LatentModel m = assemble_model(rs);
        Rng srng = Rng::stream(keys.next_u64(), 0x73616d70ull);
        pilot.push_back(entrywise_max_norm(m.Sigma_star - sample_covariance(m, spec.n, srng)) / q);
    }
    const double c2 = percentile_nearest_rank(pilot, 0.95);

    auto exceed_rate = [&](double c) {
        int hits = 0;
        const int reps = 200;
        for (int k = 0; k < reps; ++k) {
            Rng keys = Rng::stream(spec.seed, 200, static_cast<std::size_t>(k));
            ModelSpec rs = spec;
            rs.seed = keys.next_u64();
            LatentModel m = assemble_model(rs);
            Rng srng = Rng::stream(keys.next_u64(), 0x73616d70ull);
            const double ratio =
                entrywise_max_norm(m.Sigma_star - sample_covariance(m, spec.n, srng)) / q;
            hits += ratio > c;
        }
        return hits / 200.0;
    };
    const double at_c2 = exceed_rate(c2);
    CHECK(at_c2 < 0.05);
    CHECK(exceed_rate(1.2 * c2) <= at_c2);  // monotone decreasing in C2
    CHECK(exceed_rate(1.5 * c2) <= exceed_rate(1.2 * c2));
}
