// Command-line front end: generate synthetic models, run the estimation
// pipeline on a sample covariance file, execute experiment plans, and run
// the pilot calibration.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lvggm/errors.hpp"
#include "lvggm/estimator.hpp"
#include "lvggm/harness.hpp"
#include "lvggm/linalg.hpp"
#include "lvggm/model.hpp"

namespace {

int run_generate(const std::string& spec_path, const std::string& out_dir,
                 bool seed_set, std::uint64_t seed) {
    lvggm::ModelSpec spec = lvggm::load_spec_file(spec_path);
    if (seed_set) spec.seed = seed;
    const lvggm::LatentModel model = lvggm::assemble_model(spec);
    const auto violations = lvggm::check_model(model);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "invariant violation: " << v << "\n";
        return 2;
    }
    lvggm::save_model(out_dir, model);
    std::cout << "model written to " << out_dir << " (rank " << model.true_rank
              << ", sigma_effective " << model.sigma_effective << ", M_effective "
              << model.M_effective << ")\n";
    return 0;
}

int run_estimate(const std::string& input, std::size_t n, const std::string& out_dir,
                 const lvggm::EstimatorConfig& cfg) {
    const lvggm::SymMatrix sigma_n = lvggm::read_matrix_file(input);
    const lvggm::EstimateResult est = lvggm::estimate(sigma_n, n, cfg);

    std::filesystem::create_directories(out_dir);
    lvggm::write_matrix_file(out_dir + "/S_hat.txt", est.sparse.S_hat);
    lvggm::write_matrix_file(out_dir + "/S_tilde.txt", est.sparse.S_tilde);
    lvggm::write_matrix_file(out_dir + "/L_hat.txt", est.lowrank.L_hat);
    lvggm::write_matrix_file(out_dir + "/L_tilde.txt", est.lowrank.L_tilde);

    nlohmann::json j{{"schema_version", 1},
                     {"p", sigma_n.dim()},
                     {"n", n},
                     {"tau_n", est.sparse.tau_n},
                     {"sparse_threshold", est.sparse.sparse_threshold},
                     {"eigen_threshold", est.lowrank.eigen_threshold},
                     {"feasibility_slack", est.sparse.feasibility_slack},
                     {"rank_estimate", est.lowrank.rank_estimate},
                     {"eigenvalues_L_hat", est.lowrank.eigenvalues},
                     {"negative_eigenvalues_discarded", est.lowrank.negative_discarded},
                     {"estimator", {{"C1", cfg.C1},
                                    {"C3", cfg.C3},
                                    {"Mp_proxy", cfg.Mp_proxy},
                                    {"lp_tol", cfg.lp_tol},
                                    {"cond_limit", cfg.cond_limit}}}};
    std::ofstream os(out_dir + "/estimate.json");
    if (!os) throw lvggm::IoError("cannot open for writing: " + out_dir + "/estimate.json");
    os << j.dump(2) << "\n";

    if (est.sparse.feasibility_slack > est.sparse.tau_n + 1e-8) {
        std::cerr << "feasibility slack " << est.sparse.feasibility_slack
                  << " exceeds tau_n + 1e-8\n";
        return 2;
    }
    std::cout << "estimate written to " << out_dir << " (rank_estimate "
              << est.lowrank.rank_estimate << ", slack " << est.sparse.feasibility_slack
              << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"latent-variable Gaussian graphical model selection toolkit"};
    app.require_subcommand(1);

    std::string spec_path, plan_path, input_path, config_path;
    std::string out_path = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t threads = 0;
    std::string format = "csv";
    std::size_t n = 0;
    std::size_t pilots = 100;
    lvggm::EstimatorConfig cfg;

    auto* gen = app.add_subcommand("generate", "emit model files from a spec");
    gen->add_option("--spec", spec_path, "ModelSpec JSON file")->required();
    gen->add_option("--out", out_path, "output directory");
    gen->add_option("--seed", seed, "override the spec seed")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* est = app.add_subcommand("estimate", "run the pipeline on a sample covariance file");
    est->add_option("--input", input_path, "Sigma_n in matrix text format")->required();
    est->add_option("--n", n, "sample size behind the covariance")->required();
    est->add_option("--out", out_path, "output directory");
    est->add_option("--config", config_path, "calibration JSON (C1/C3/Mp_proxy)");
    est->add_option("--c1", cfg.C1, "tau constant C1");
    est->add_option("--c3", cfg.C3, "eigen-threshold constant C3");
    est->add_option("--mp-proxy", cfg.Mp_proxy, "Mp plug-in used by tau and the support cut");
    est->add_option("--lp-tol", cfg.lp_tol, "LP tolerance");
    est->add_option("--cond-limit", cfg.cond_limit, "condition limit for inversion");

    auto* run = app.add_subcommand("run", "execute an experiment plan");
    run->add_option("--plan", plan_path, "ExperimentPlan JSON file")->required();
    run->add_option("--out", out_path, "output directory (overrides plan output_path)");
    run->add_option("--threads", threads, "worker threads (0 = hardware)");
    run->add_option("--format", format, "per-trial output: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--seed", seed, "override the plan base seed")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* cal = app.add_subcommand("calibrate", "pilot calibration of C2 (hence C1) and C3");
    cal->add_option("--spec", spec_path, "ModelSpec JSON file")->required();
    cal->add_option("--pilots", pilots, "pilot replicates (>= 50)");
    cal->add_option("--out", out_path, "output config JSON path");
    cal->add_option("--seed", seed, "override the spec seed")->each([&](const std::string&) {
        seed_set = true;
    });

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return run_generate(spec_path, out_path, seed_set, seed);
        }
        if (est->parsed()) {
            if (!config_path.empty()) {
                std::ifstream is(config_path);
                if (!is) throw lvggm::IoError("cannot open config: " + config_path);
                nlohmann::json j;
                is >> j;
                cfg.C1 = j.value("C1", cfg.C1);
                cfg.C3 = j.value("C3", cfg.C3);
                cfg.Mp_proxy = j.value("Mp_proxy", cfg.Mp_proxy);
            }
            return run_estimate(input_path, n, out_path, cfg);
        }
        if (run->parsed()) {
            lvggm::ExperimentPlan plan = lvggm::load_plan(plan_path);
            if (seed_set) plan.base_spec.seed = seed;
            const std::size_t workers =
                threads > 0 ? threads
                            : std::max(1u, std::thread::hardware_concurrency());
            const std::string dir = out_path == "out" && !plan.output_path.empty()
                                        ? plan.output_path
                                        : out_path;
            const lvggm::RunResult result = lvggm::execute_plan(plan, workers, dir, format);
            std::size_t failures = 0;
            for (const auto& c : result.cells) failures += c.failures;
            std::cout << "plan complete: " << result.trials.size() << " trials in "
                      << result.cells.size() << " cells, " << failures
                      << " failed; outputs in " << dir << "\n";
            return failures == 0 ? 0 : 2;
        }
        if (cal->parsed()) {
            lvggm::ModelSpec spec = lvggm::load_spec_file(spec_path);
            if (seed_set) spec.seed = seed;
            const lvggm::CalibrationResult result = lvggm::calibrate_constants(spec, pilots);
            std::ofstream os(out_path);
            if (!os) throw lvggm::IoError("cannot open for writing: " + out_path);
            lvggm::write_calibration_json(os, spec, result);
            std::cout << "C2 = " << result.C2 << ", C1 = " << result.C1
                      << ", C3 = " << result.C3 << " -> " << out_path << "\n";
            return 0;
        }
    } catch (const lvggm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const lvggm::SpecInfeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const lvggm::IncoherenceUnreachable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
