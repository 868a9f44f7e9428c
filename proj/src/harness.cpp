#include "lvggm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "lvggm/errors.hpp"
#include "lvggm/linalg.hpp"
#include "lvggm/rng.hpp"

namespace lvggm {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

double percentile_nearest_rank(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return values[k - 1];
}

bool sample_size_condition(std::size_t p, std::size_t n, double M) {
    return std::sqrt(static_cast<double>(p) / static_cast<double>(n)) <=
           1.0 / (16.0 * std::sqrt(2.0) * M * M);
}

bool sparsity_budget_condition(double Mp, std::size_t s0, std::size_t p) {
    return Mp * Mp * static_cast<double>(s0) <=
           std::sqrt(static_cast<double>(p) / std::log(static_cast<double>(p)));
}

AssumptionReport check_assumptions(const LatentModel& model, const EstimatorConfig& cfg) {
    const ModelSpec& spec = model.spec;
    const double tau = compute_tau(spec.p, spec.n, cfg);
    AssumptionReport rep;
    rep.linf_L_within_Mp_tau = entrywise_max_norm(model.L_star) <= cfg.Mp_proxy * tau;
    rep.sample_ratio_ok = sample_size_condition(spec.p, spec.n, model.M_effective);
    rep.sparsity_budget_ok = sparsity_budget_condition(spec.Mp, spec.s0, spec.p);
    rep.theta_margin_ok = realized_theta(model.S_star) > 18.0 * cfg.Mp_proxy * tau;
    if (model.true_rank == 0) {
        rep.sigma_margin_ok = true;
    } else {
        const EigenDecomposition ed = eig_sym(model.L_star);
        double min_nonzero = 0.0;
        for (std::size_t k = 0; k < ed.values.size(); ++k) {
            if (ed.values[k] > 1e-10) min_nonzero = ed.values[k];  // descending: last > 1e-10
        }
        rep.sigma_margin_ok =
            min_nonzero >
            2.0 * cfg.C3 *
                std::sqrt(static_cast<double>(spec.p) / static_cast<double>(spec.n));
    }
    return rep;
}

TrialReport run_replicate(const ModelSpec& spec, const EstimatorConfig& cfg,
                          std::size_t cell_index, std::size_t replicate_index,
                          SampleMode mode) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialReport rep;
    rep.cell_index = cell_index;
    rep.replicate = replicate_index;
    rep.spec = spec;

    Rng keys = Rng::stream(spec.seed, cell_index, replicate_index);
    ModelSpec rspec = spec;
    rspec.seed = keys.next_u64();
    const std::uint64_t sampling_seed = keys.next_u64();
    rep.spec.seed = rspec.seed;

    try {
        const LatentModel model = assemble_model(rspec);
        rep.true_rank = model.true_rank;
        rep.sigma_effective = model.sigma_effective;
        rep.M_effective = model.M_effective;

        SymMatrix sigma_n;
        if (mode == SampleMode::Noiseless) {
            sigma_n = model.Sigma_star;
        } else {
            Rng srng = Rng::stream(sampling_seed, 0x73616d70ull);
            sigma_n = sample_covariance(model, spec.n, srng);
        }

        const EstimateResult est = estimate(sigma_n, spec.n, cfg);
        rep.tau_n = est.sparse.tau_n;
        rep.sparse_threshold = est.sparse.sparse_threshold;
        rep.eigen_threshold = est.lowrank.eigen_threshold;
        rep.feasibility_slack = est.sparse.feasibility_slack;
        rep.rank_estimate = est.lowrank.rank_estimate;
        rep.rank_recovered = est.lowrank.rank_estimate == model.true_rank;
        rep.sign_recovered = sign_pattern(est.sparse.S_tilde) == sign_pattern(model.S_star);
        rep.sup_error = entrywise_max_norm(est.sparse.S_hat - model.S_star);
        rep.spectral_error = spectral_norm(est.lowrank.L_hat - model.L_star);

        const double c2 = cfg.C1 / 2.0;
        const double dev = entrywise_max_norm(model.Sigma_star - sigma_n);
        rep.event_A_held =
            dev <= c2 * std::sqrt(std::log(static_cast<double>(spec.p)) /
                                  static_cast<double>(spec.n));
        rep.assumptions = check_assumptions(model, cfg);
        rep.assumptions_held = rep.assumptions.all();
    } catch (const std::exception& e) {
        rep.failed = true;
        rep.failure = e.what();
    }
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void ExperimentPlan::validate() const {
    base_spec.validate();
    estimator_cfg.validate();
    if (replicates < 1) throw SpecInfeasible("plan: replicates must be >= 1");
    static const char* kNames[] = {"p",  "n",     "s0",    "r0",       "c0",
                                   "theta", "sigma", "Mp", "M",        "seed",
                                   "C1",    "C3",    "Mp_proxy", "lp_tol", "cond_limit"};
    for (const auto& [name, values] : sweeps) {
        bool known = false;
        for (const char* k : kNames) known = known || name == k;
        if (!known) throw SpecInfeasible("plan: unknown sweep parameter '" + name + "'");
        if (values.empty()) throw SpecInfeasible("plan: empty sweep for '" + name + "'");
    }
}

namespace {

void apply_param(Cell& cell, const std::string& name, double v) {
    auto as_size = [&](const char* what) {
        if (v < 0 || v != std::floor(v)) {
            throw SpecInfeasible(std::string("plan: ") + what + " must be a nonnegative integer");
        }
        return static_cast<std::size_t>(v);
    };
    if (name == "p") cell.spec.p = as_size("p");
    else if (name == "n") cell.spec.n = as_size("n");
    else if (name == "s0") cell.spec.s0 = as_size("s0");
    else if (name == "r0") cell.spec.r0 = as_size("r0");
    else if (name == "c0") cell.spec.c0 = v;
    else if (name == "theta") cell.spec.theta = v;
    else if (name == "sigma") cell.spec.sigma = v;
    else if (name == "Mp") cell.spec.Mp = v;
    else if (name == "M") cell.spec.M = v;
    else if (name == "seed") cell.spec.seed = static_cast<std::uint64_t>(v);
    else if (name == "C1") cell.cfg.C1 = v;
    else if (name == "C3") cell.cfg.C3 = v;
    else if (name == "Mp_proxy") cell.cfg.Mp_proxy = v;
    else if (name == "lp_tol") cell.cfg.lp_tol = v;
    else if (name == "cond_limit") cell.cfg.cond_limit = v;
    else throw SpecInfeasible("plan: unknown parameter '" + name + "'");
}

} // namespace

std::vector<Cell> expand_cells(const ExperimentPlan& plan) {
    plan.validate();
    std::vector<Cell> cells;
    Cell base;
    base.spec = plan.base_spec;
    base.cfg = plan.estimator_cfg;
    cells.push_back(base);
    for (const auto& [name, values] : plan.sweeps) {
        std::vector<Cell> next;
        next.reserve(cells.size() * values.size());
        for (const Cell& c : cells) {
            for (double v : values) {
                Cell nc = c;
                nc.assignment.emplace_back(name, v);
                apply_param(nc, name, v);
                next.push_back(std::move(nc));
            }
        }
        cells = std::move(next);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].index = i;
    return cells;
}

RunResult run_plan(const ExperimentPlan& plan, std::size_t threads) {
    const std::vector<Cell> cells = expand_cells(plan);
    const std::size_t total = cells.size() * plan.replicates;

    RunResult result;
    result.trials.resize(total);

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= total) return;
            const std::size_t ci = k / plan.replicates;
            const std::size_t r = k % plan.replicates;
            result.trials[k] =
                run_replicate(cells[ci].spec, cells[ci].cfg, cells[ci].index, r);
        }
    };
    const std::size_t nw = std::max<std::size_t>(1, threads);
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (std::size_t i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Trials are already in (cell, replicate) order by construction.
    for (const Cell& cell : cells) {
        CellAggregate agg;
        agg.cell = cell;
        agg.replicates = plan.replicates;
        std::vector<double> sup, spec_err, slack;
        std::size_t sign_ok = 0, rank_ok = 0, event_a = 0, assume_ok = 0, done = 0;
        for (std::size_t r = 0; r < plan.replicates; ++r) {
            const TrialReport& t = result.trials[cell.index * plan.replicates + r];
            agg.wall_time_total_s += t.wall_time_s;
            if (t.failed) {
                ++agg.failures;
                continue;
            }
            ++done;
            sign_ok += t.sign_recovered;
            rank_ok += t.rank_recovered;
            event_a += t.event_A_held;
            assume_ok += t.assumptions_held;
            sup.push_back(t.sup_error);
            spec_err.push_back(t.spectral_error);
            slack.push_back(t.feasibility_slack);
        }
        if (done > 0) {
            const double d = static_cast<double>(done);
            agg.sign_recovery_rate = sign_ok / d;
            agg.rank_recovery_rate = rank_ok / d;
            agg.event_A_rate = event_a / d;
            agg.assumptions_rate = assume_ok / d;
            agg.mean_sup_error = mean_of(sup);
            agg.p95_sup_error = percentile_nearest_rank(sup, 0.95);
            agg.mean_spectral_error = mean_of(spec_err);
            agg.p95_spectral_error = percentile_nearest_rank(spec_err, 0.95);
            agg.mean_feasibility_slack = mean_of(slack);
        }
        result.cells.push_back(std::move(agg));
    }
    return result;
}

namespace {

std::string csv_sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return out;
}

} // namespace

void write_trials_csv(std::ostream& os, const RunResult& result, bool with_timestamp) {
    if (with_timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "# generated " << buf << "\n";
    }
    os << "cell,replicate,p,n,s0,r0,c0,theta,sigma,Mp,M,model_seed,failed,failure,"
          "sign_recovered,rank_recovered,rank_estimate,true_rank,sup_error,spectral_error,"
          "feasibility_slack,tau_n,sparse_threshold,eigen_threshold,event_A_held,"
          "linf_L_within_Mp_tau,sample_ratio_ok,sparsity_budget_ok,theta_margin_ok,"
          "sigma_margin_ok,assumptions_held,sigma_effective,M_effective\n";
    for (const TrialReport& t : result.trials) {
        os << t.cell_index << ',' << t.replicate << ',' << t.spec.p << ',' << t.spec.n << ','
           << t.spec.s0 << ',' << t.spec.r0 << ',' << fmt17(t.spec.c0) << ','
           << fmt17(t.spec.theta) << ',' << fmt17(t.spec.sigma) << ',' << fmt17(t.spec.Mp)
           << ',' << fmt17(t.spec.M) << ',' << t.spec.seed << ',' << (t.failed ? 1 : 0) << ','
           << csv_sanitize(t.failure) << ',' << (t.sign_recovered ? 1 : 0) << ','
           << (t.rank_recovered ? 1 : 0) << ',' << t.rank_estimate << ',' << t.true_rank << ','
           << fmt17(t.sup_error) << ',' << fmt17(t.spectral_error) << ','
           << fmt17(t.feasibility_slack) << ',' << fmt17(t.tau_n) << ','
           << fmt17(t.sparse_threshold) << ',' << fmt17(t.eigen_threshold) << ','
           << (t.event_A_held ? 1 : 0) << ',' << (t.assumptions.linf_L_within_Mp_tau ? 1 : 0)
           << ',' << (t.assumptions.sample_ratio_ok ? 1 : 0) << ','
           << (t.assumptions.sparsity_budget_ok ? 1 : 0) << ','
           << (t.assumptions.theta_margin_ok ? 1 : 0) << ','
           << (t.assumptions.sigma_margin_ok ? 1 : 0) << ',' << (t.assumptions_held ? 1 : 0)
           << ',' << fmt17(t.sigma_effective) << ',' << fmt17(t.M_effective) << "\n";
    }
}

namespace {

nlohmann::json spec_json(const ModelSpec& s) {
    return nlohmann::json{{"p", s.p},         {"n", s.n},   {"s0", s.s0},   {"r0", s.r0},
                          {"c0", s.c0},       {"theta", s.theta}, {"sigma", s.sigma},
                          {"Mp", s.Mp},       {"M", s.M},   {"seed", s.seed}};
}

nlohmann::json cfg_json(const EstimatorConfig& c) {
    return nlohmann::json{{"C1", c.C1},
                          {"C3", c.C3},
                          {"Mp_proxy", c.Mp_proxy},
                          {"lp_tol", c.lp_tol},
                          {"cond_limit", c.cond_limit}};
}

nlohmann::json trial_json(const TrialReport& t) {
    return nlohmann::json{
        {"cell", t.cell_index},
        {"replicate", t.replicate},
        {"model_seed", t.spec.seed},
        {"failed", t.failed},
        {"failure", t.failure},
        {"sign_recovered", t.sign_recovered},
        {"rank_recovered", t.rank_recovered},
        {"rank_estimate", t.rank_estimate},
        {"true_rank", t.true_rank},
        {"sup_error", t.sup_error},
        {"spectral_error", t.spectral_error},
        {"feasibility_slack", t.feasibility_slack},
        {"tau_n", t.tau_n},
        {"sparse_threshold", t.sparse_threshold},
        {"eigen_threshold", t.eigen_threshold},
        {"event_A_held", t.event_A_held},
        {"assumptions",
         {{"linf_L_within_Mp_tau", t.assumptions.linf_L_within_Mp_tau},
          {"sample_ratio_ok", t.assumptions.sample_ratio_ok},
          {"sparsity_budget_ok", t.assumptions.sparsity_budget_ok},
          {"theta_margin_ok", t.assumptions.theta_margin_ok},
          {"sigma_margin_ok", t.assumptions.sigma_margin_ok}}},
        {"assumptions_held", t.assumptions_held},
        {"sigma_effective", t.sigma_effective},
        {"M_effective", t.M_effective}};
}

} // namespace

void write_trials_json(std::ostream& os, const RunResult& result) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TrialReport& t : result.trials) arr.push_back(trial_json(t));
    os << arr.dump(2) << "\n";
}

void write_aggregates_json(std::ostream& os, const ExperimentPlan& plan,
                           const RunResult& result) {
    nlohmann::json cells = nlohmann::json::array();
    for (const CellAggregate& a : result.cells) {
        nlohmann::json assignment = nlohmann::json::array();
        for (const auto& [k, v] : a.cell.assignment) assignment.push_back({{k, v}});
        cells.push_back(nlohmann::json{{"cell", a.cell.index},
                                       {"assignment", std::move(assignment)},
                                       {"spec", spec_json(a.cell.spec)},
                                       {"estimator", cfg_json(a.cell.cfg)},
                                       {"replicates", a.replicates},
                                       {"failures", a.failures},
                                       {"sign_recovery_rate", a.sign_recovery_rate},
                                       {"rank_recovery_rate", a.rank_recovery_rate},
                                       {"event_A_rate", a.event_A_rate},
                                       {"assumptions_rate", a.assumptions_rate},
                                       {"mean_sup_error", a.mean_sup_error},
                                       {"p95_sup_error", a.p95_sup_error},
                                       {"mean_spectral_error", a.mean_spectral_error},
                                       {"p95_spectral_error", a.p95_spectral_error},
                                       {"mean_feasibility_slack", a.mean_feasibility_slack}});
    }
    nlohmann::json j{{"schema_version", 1},
                     {"replicates", plan.replicates},
                     {"base_spec", spec_json(plan.base_spec)},
                     {"estimator", cfg_json(plan.estimator_cfg)},
                     {"cells", std::move(cells)}};
    os << j.dump(2) << "\n";
}

RunResult execute_plan(const ExperimentPlan& plan, std::size_t threads,
                       const std::string& out_dir, const std::string& format) {
    if (format != "csv" && format != "json") {
        throw SpecInfeasible("execute_plan: format must be csv or json");
    }
    const std::string dir = out_dir.empty() ? plan.output_path : out_dir;
    std::filesystem::create_directories(dir);

    RunResult result = run_plan(plan, threads);

    if (format == "csv") {
        std::ofstream os(dir + "/trials.csv");
        if (!os) throw IoError("cannot open for writing: " + dir + "/trials.csv");
        write_trials_csv(os, result);
    } else {
        std::ofstream os(dir + "/trials.json");
        if (!os) throw IoError("cannot open for writing: " + dir + "/trials.json");
        write_trials_json(os, result);
    }
    std::ofstream agg(dir + "/aggregates.json");
    if (!agg) throw IoError("cannot open for writing: " + dir + "/aggregates.json");
    write_aggregates_json(agg, plan, result);
    return result;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open plan: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("plan json: " + std::string(e.what()));
    }
    ExperimentPlan plan;
    try {
        const auto& s = j.at("base_spec");
        plan.base_spec.p = s.at("p").get<std::size_t>();
        plan.base_spec.n = s.at("n").get<std::size_t>();
        plan.base_spec.s0 = s.at("s0").get<std::size_t>();
        plan.base_spec.r0 = s.at("r0").get<std::size_t>();
        plan.base_spec.c0 = s.at("c0").get<double>();
        plan.base_spec.theta = s.at("theta").get<double>();
        plan.base_spec.sigma = s.at("sigma").get<double>();
        plan.base_spec.Mp = s.at("Mp").get<double>();
        plan.base_spec.M = s.at("M").get<double>();
        plan.base_spec.seed = s.at("seed").get<std::uint64_t>();
        if (j.contains("sweeps")) {
            for (const auto& e : j.at("sweeps")) {
                plan.sweeps.emplace_back(e.at("param").get<std::string>(),
                                         e.at("values").get<std::vector<double>>());
            }
        }
        plan.replicates = j.at("replicates").get<std::size_t>();
        if (j.contains("estimator")) {
            const auto& c = j.at("estimator");
            plan.estimator_cfg.C1 = c.value("C1", plan.estimator_cfg.C1);
            plan.estimator_cfg.C3 = c.value("C3", plan.estimator_cfg.C3);
            plan.estimator_cfg.Mp_proxy = c.value("Mp_proxy", plan.estimator_cfg.Mp_proxy);
            plan.estimator_cfg.lp_tol = c.value("lp_tol", plan.estimator_cfg.lp_tol);
            plan.estimator_cfg.cond_limit = c.value("cond_limit", plan.estimator_cfg.cond_limit);
        }
        plan.assumption_checks = j.value("assumption_checks", true);
        plan.output_path = j.value("output_path", std::string("out"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("plan json: " + std::string(e.what()));
    }
    plan.validate();
    return plan;
}

void save_plan(const std::string& path, const ExperimentPlan& plan) {
    nlohmann::json sweeps = nlohmann::json::array();
    for (const auto& [name, values] : plan.sweeps) {
        sweeps.push_back({{"param", name}, {"values", values}});
    }
    nlohmann::json j{{"base_spec", spec_json(plan.base_spec)},
                     {"sweeps", std::move(sweeps)},
                     {"replicates", plan.replicates},
                     {"estimator", cfg_json(plan.estimator_cfg)},
                     {"assumption_checks", plan.assumption_checks},
                     {"output_path", plan.output_path}};
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

SymMatrix oracle_support_threshold(const SymMatrix& s_hat, const SymMatrix& s_star) {
    const std::size_t p = s_hat.dim();
    SymMatrix out(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j)
            if (s_star(i, j) != 0.0) out.set(i, j, s_hat(i, j));
    return out;
}

double calibrate_c2(const ModelSpec& spec, std::size_t pilots) {
    if (pilots < 50) throw std::invalid_argument("calibrate_c2: need pilots >= 50");
    spec.validate();
    const double q = std::sqrt(std::log(static_cast<double>(spec.p)) /
                               static_cast<double>(spec.n));
    std::vector<double> ratios;
    ratios.reserve(pilots);
    for (std::size_t k = 0; k < pilots; ++k) {
        Rng keys = Rng::stream(spec.seed, 0xC2u, k);
        ModelSpec rspec = spec;
        rspec.seed = keys.next_u64();
        const LatentModel model = assemble_model(rspec);
        Rng srng = Rng::stream(keys.next_u64(), 0x73616d70ull);
        const SymMatrix sigma_n = sample_covariance(model, spec.n, srng);
        ratios.push_back(entrywise_max_norm(model.Sigma_star - sigma_n) / q);
    }
    return percentile_nearest_rank(ratios, 0.95);
}

static CalibrationResult calibrate_c3_with(const ModelSpec& spec, std::size_t pilots,
                                           const EstimatorConfig& cfg, CalibrationResult cal);

CalibrationResult calibrate_constants(const ModelSpec& spec, std::size_t pilots) {
    CalibrationResult cal;
    cal.pilots = pilots;
    cal.seed = spec.seed;
    cal.C2 = calibrate_c2(spec, pilots);
    cal.C1 = 2.0 * cal.C2;
    EstimatorConfig cfg;
    cfg.C1 = cal.C1;
    cfg.Mp_proxy = spec.Mp;
    return calibrate_c3_with(spec, pilots, cfg, cal);
}

CalibrationResult calibrate_constants(const ModelSpec& spec, std::size_t pilots,
                                      const EstimatorConfig& pipeline_cfg) {
    CalibrationResult cal;
    cal.pilots = pilots;
    cal.seed = spec.seed;
    cal.C2 = calibrate_c2(spec, pilots);
    cal.C1 = 2.0 * cal.C2;
    return calibrate_c3_with(spec, pilots, pipeline_cfg, cal);
}

static CalibrationResult calibrate_c3_with(const ModelSpec& spec, std::size_t pilots,
                                           const EstimatorConfig& cfg, CalibrationResult cal) {
    // C3: worst pilot spectral error of the inverse-minus-oracle-S step on
    // the null configuration, in units of sqrt(p/n).
    ModelSpec null_spec = spec;
    null_spec.r0 = 0;
    const double root_pn =
        std::sqrt(static_cast<double>(spec.p) / static_cast<double>(spec.n));
    double worst = 0.0;
    for (std::size_t k = 0; k < pilots; ++k) {
        Rng keys = Rng::stream(spec.seed, 0xC3u, k);
        ModelSpec rspec = null_spec;
        rspec.seed = keys.next_u64();
        const LatentModel model = assemble_model(rspec);
        Rng srng = Rng::stream(keys.next_u64(), 0x73616d70ull);
        const SymMatrix sigma_n = sample_covariance(model, spec.n, srng);
        const SparseEstimate sparse = estimate_sparse(sigma_n, spec.n, cfg);
        const SymMatrix oracle = oracle_support_threshold(sparse.S_hat, model.S_star);
        const SymMatrix l_hat = oracle - spd_inverse(sigma_n, cfg.cond_limit);
        worst = std::max(worst, spectral_norm(l_hat - model.L_star) / root_pn);
    }
    cal.C3 = 1.1 * worst;
    return cal;
}

void write_calibration_json(std::ostream& os, const ModelSpec& spec,
                            const CalibrationResult& cal) {
    nlohmann::json j{
        {"schema_version", 1},
        {"C1", cal.C1},
        {"C2", cal.C2},
        {"C3", cal.C3},
        {"Mp_proxy", spec.Mp},
        {"pilots", cal.pilots},
        {"seed", cal.seed},
        {"spec", spec_json(spec)},
        {"method",
         {{"C2", "95th percentile (nearest rank) of ||Sigma*-Sigma_n||_inf / sqrt(log p / n)"},
          {"C1", "2 * C2"},
          {"C3",
           "1.1 x max over null-configuration pilots of spectral_norm(L_hat - L*) / "
           "sqrt(p/n), with S-tilde replaced by the true-support restriction of S_hat"}}}};
    os << j.dump(2) << "\n";
}

} // namespace lvggm
