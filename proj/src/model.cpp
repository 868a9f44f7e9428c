#include "lvggm/model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "lvggm/errors.hpp"
#include "lvggm/linalg.hpp"

namespace lvggm {

void ModelSpec::validate() const {
    if (p < 2) throw SpecInfeasible("spec: p must be >= 2");
    if (n < 2) throw SpecInfeasible("spec: n must be >= 2");
    if (s0 < 1 || s0 > p) throw SpecInfeasible("spec: need 1 <= s0 <= p");
    if (r0 >= p) throw SpecInfeasible("spec: need r0 < p");
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!pos(c0) || !pos(theta) || !pos(sigma) || !pos(Mp) || !pos(M)) {
        throw SpecInfeasible("spec: c0, theta, sigma, Mp, M must be positive and finite");
    }
}

SymMatrix generate_sparse_component(const ModelSpec& spec, Rng& rng) {
    spec.validate();
    const std::size_t p = spec.p;
    if (static_cast<double>(spec.s0) * 2.0 * spec.theta + 2.0 > spec.Mp) {
        throw SpecInfeasible("generate_sparse_component: s0*2*theta + 2 exceeds Mp budget");
    }

    SymMatrix s(p);
    std::vector<std::size_t> degree(p, 0);
    const std::size_t max_off = spec.s0 - 1;

    if (max_off > 0) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        pairs.reserve(p * (p - 1) / 2);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
        // Fisher-Yates with the model stream, then greedy acceptance under
        // the per-row degree cap.
        for (std::size_t k = pairs.size(); k > 1; --k) {
            const std::size_t r = static_cast<std::size_t>(rng.next_below(k));
            std::swap(pairs[k - 1], pairs[r]);
        }
        for (const auto& [i, j] : pairs) {
            if (degree[i] >= max_off || degree[j] >= max_off) continue;
            const double mag = rng.uniform(spec.theta, 2.0 * spec.theta);
            const double val = rng.next_bool() ? mag : -mag;
            s.set(i, j, val);
            ++degree[i];
            ++degree[j];
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            if (j != i) off += std::fabs(s(i, j));
        s.set(i, i, off + rng.uniform(1.0, 2.0));
    }
    return s;
}

SymMatrix generate_lowrank_component(const ModelSpec& spec, Rng& rng) {
    return generate_lowrank_component(spec, spec.sigma, rng);
}

SymMatrix generate_lowrank_component(const ModelSpec& spec, double sigma, Rng& rng) {
    spec.validate();
    const std::size_t p = spec.p;
    const std::size_t r = spec.r0;
    if (r == 0) return SymMatrix(p);

    const double incoherence = std::sqrt(spec.c0 / static_cast<double>(p));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        // p x r Gaussian, orthonormalized column by column (modified
        // Gram-Schmidt); a degenerate draw counts as a rejection.
        std::vector<std::vector<double>> u(r, std::vector<double>(p));
        for (std::size_t k = 0; k < r; ++k)
            for (std::size_t i = 0; i < p; ++i) u[k][i] = rng.next_gaussian();
        bool ok = true;
        for (std::size_t k = 0; k < r && ok; ++k) {
            for (std::size_t j = 0; j < k; ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < p; ++i) dot += u[j][i] * u[k][i];
                for (std::size_t i = 0; i < p; ++i) u[k][i] -= dot * u[j][i];
            }
            double norm2 = 0.0;
            for (double v : u[k]) norm2 += v * v;
            if (norm2 < 1e-12) {
                ok = false;
                break;
            }
            const double inv = 1.0 / std::sqrt(norm2);
            double maxabs = 0.0;
            for (double& v : u[k]) {
                v *= inv;
                maxabs = std::max(maxabs, std::fabs(v));
            }
            if (maxabs > incoherence) ok = false;
        }
        if (!ok) continue;

        SymMatrix l(p);
        for (std::size_t k = 0; k < r; ++k) {
            const double lam = rng.uniform(sigma, 2.0 * sigma);
            for (std::size_t i = 0; i < p; ++i) {
                const double li = lam * u[k][i];
                for (std::size_t j = i; j < p; ++j) {
                    l.set(i, j, l(i, j) + li * u[k][j]);
                }
            }
        }
        return l;
    }
    throw IncoherenceUnreachable(
        "generate_lowrank_component: no draw met ||u||_inf <= sqrt(c0/p) in 1000 attempts "
        "(c0 too small for p; need roughly c0 > 2 log p)");
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> support_of(const SymMatrix& s) {
    std::vector<std::pair<std::size_t, std::size_t>> sup;
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = i; j < s.dim(); ++j)
            if (s(i, j) != 0.0) sup.emplace_back(i, j);
    return sup;
}

} // namespace

double realized_theta(const SymMatrix& s_star) {
    double t = std::numeric_limits<double>::infinity();
    for (double v : s_star.data())
        if (v != 0.0) t = std::min(t, std::fabs(v));
    return std::isfinite(t) ? t : 0.0;
}

LatentModel assemble_model(const ModelSpec& spec) {
    spec.validate();
    Rng rng = Rng::stream(spec.seed, 0x6d6f64656cull);  // model stream

    std::map<std::string, int> failures;
    const int plain_attempts = 100;  // fresh redraws at nominal sigma
    const int max_attempts = 400;    // beyond 100, L* shrinks by 0.9 each try

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const double scale =
            attempt < plain_attempts ? 1.0 : std::pow(0.9, attempt - plain_attempts + 1);
        const double sigma_eff = spec.sigma * scale;

        SymMatrix s = generate_sparse_component(spec, rng);
        SymMatrix l = generate_lowrank_component(spec, sigma_eff, rng);

        if (matrix_one_norm(s) > spec.Mp) {
            ++failures["||S*||_1->1 <= Mp"];
            continue;
        }
        if (realized_theta(s) < spec.theta) {
            ++failures["min nonzero |S*_ij| >= theta (unpaired diagonal below theta)"];
            continue;
        }
        if (spec.r0 > 0 && matrix_one_norm(l) > spec.Mp) {
            ++failures["||L*||_1->1 <= Mp"];
            continue;
        }
        const SymMatrix k = s - l;
        SymMatrix sigma_star;
        try {
            sigma_star = spd_inverse(k, 1e12);
        } catch (const NotPositiveDefinite&) {
            ++failures["S* - L* positive definite"];
            continue;
        } catch (const IllConditioned&) {
            ++failures["S* - L* condition"];
            continue;
        }
        const EigenDecomposition ed = eig_sym(sigma_star);
        const double lmax = ed.values.front();
        const double lmin = ed.values.back();
        if (lmin <= 0.0) {
            ++failures["S* - L* positive definite"];
            continue;
        }
        const double m_eff = std::max(lmax, 1.0 / lmin);
        if (m_eff > spec.M) {
            ++failures["spectrum of Sigma* within [1/M, M]"];
            continue;
        }

        LatentModel model;
        model.spec = spec;
        model.S_star = std::move(s);
        model.L_star = std::move(l);
        model.Sigma_star = std::move(sigma_star);
        model.support = support_of(model.S_star);
        model.true_rank = spec.r0;
        model.sigma_effective = spec.r0 > 0 ? sigma_eff : 0.0;
        model.M_effective = m_eff;
        return model;
    }

    std::string dominant = "none";
    int worst = 0;
    for (const auto& [k, v] : failures) {
        if (v > worst) {
            worst = v;
            dominant = k;
        }
    }
    throw SpecInfeasible("assemble_model: no draw satisfied all invariants in " +
                         std::to_string(max_attempts) + " attempts; most frequent failure: " +
                         dominant + " (" + std::to_string(worst) + "x)");
}

SymMatrix sample_covariance(const LatentModel& model, std::size_t n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("sample_covariance: n must be >= 2");
    const std::size_t p = model.spec.p;
    const std::vector<double> chol = cholesky_factor(model.Sigma_star);

    std::vector<double> acc(p * p, 0.0);
    std::vector<double> z(p), x(p);
    for (std::size_t draw = 0; draw < n; ++draw) {
        for (std::size_t i = 0; i < p; ++i) z[i] = rng.next_gaussian();
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k) s += chol[i * p + k] * z[k];
            x[i] = s;
        }
        for (std::size_t i = 0; i < p; ++i) {
            const double xi = x[i];
            for (std::size_t j = i; j < p; ++j) acc[i * p + j] += xi * x[j];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            acc[i * p + j] *= inv_n;
            acc[j * p + i] = acc[i * p + j];
        }
    return SymMatrix(p, std::move(acc), 1e-9);
}

std::vector<std::string> check_model(const LatentModel& m) {
    std::vector<std::string> bad;
    const ModelSpec& spec = m.spec;
    const std::size_t p = spec.p;

    if (m.S_star.dim() != p || m.L_star.dim() != p || m.Sigma_star.dim() != p) {
        bad.push_back("dimension mismatch");
        return bad;
    }
    try {
        cholesky_factor(m.S_star);
    } catch (const NotPositiveDefinite&) {
        bad.push_back("S* not positive definite");
    }
    for (std::size_t i = 0; i < p; ++i) {
        std::size_t nz = 0;
        for (std::size_t j = 0; j < p; ++j)
            if (m.S_star(i, j) != 0.0) ++nz;
        if (nz > spec.s0) {
            bad.push_back("row " + std::to_string(i) + " of S* has " + std::to_string(nz) +
                          " nonzeros > s0");
            break;
        }
    }
    if (matrix_one_norm(m.S_star) > spec.Mp * (1.0 + 1e-12)) bad.push_back("||S*||_1->1 > Mp");
    if (realized_theta(m.S_star) < spec.theta * (1.0 - 1e-12))
        bad.push_back("a nonzero of S* is below theta");

    const EigenDecomposition el = eig_sym(m.L_star);
    std::size_t rank = 0;
    const double inc = std::sqrt(spec.c0 / static_cast<double>(p)) * (1.0 + 1e-9);
    for (std::size_t k = 0; k < p; ++k) {
        if (el.values[k] < -1e-10) {
            bad.push_back("L* has a negative eigenvalue");
            break;
        }
        if (el.values[k] > 1e-10) {
            ++rank;
            if (m.sigma_effective > 0.0 && el.values[k] < m.sigma_effective * (1.0 - 1e-9))
                bad.push_back("nonzero eigenvalue of L* below sigma_effective");
            double maxabs = 0.0;
            for (std::size_t i = 0; i < p; ++i) maxabs = std::max(maxabs, std::fabs(el.vec(k, i)));
            if (maxabs > inc) bad.push_back("eigenvector of L* violates incoherence");
        }
    }
    if (rank != m.true_rank || rank != spec.r0) bad.push_back("rank(L*) != r0");
    if (matrix_one_norm(m.L_star) > spec.Mp * (1.0 + 1e-12)) bad.push_back("||L*||_1->1 > Mp");
    if (matrix_one_norm(m.L_star) >
        spec.c0 * static_cast<double>(std::max<std::size_t>(spec.r0, 1)) * (1.0 + 1e-12)) {
        bad.push_back("||L*||_1->1 > c0 * r0");
    }

    const EigenDecomposition es = eig_sym(m.Sigma_star);
    const double lmax = es.values.front();
    const double lmin = es.values.back();
    if (!(lmin > 0.0)) {
        bad.push_back("Sigma* not positive definite");
    } else {
        const double m_eff = std::max(lmax, 1.0 / lmin);
        if (m_eff > spec.M * (1.0 + 1e-9)) bad.push_back("spectrum of Sigma* leaves [1/M, M]");
        if (std::fabs(m_eff - m.M_effective) > 1e-6 * m_eff)
            bad.push_back("recorded M_effective stale");
    }

    // (Sigma*)^-1 == S* - L*, checked through the defining product.
    const SymMatrix k = m.S_star - m.L_star;
    double resid = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < p; ++t) s += m.Sigma_star(i, t) * k(t, j);
            resid = std::max(resid, std::fabs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    if (resid > 1e-6) bad.push_back("Sigma* (S*-L*) != I beyond tolerance");

    if (m.support != support_of(m.S_star)) bad.push_back("recorded support stale");
    return bad;
}

namespace {

nlohmann::json spec_to_json(const ModelSpec& s) {
    return nlohmann::json{{"p", s.p},         {"n", s.n},         {"s0", s.s0},
                          {"r0", s.r0},       {"c0", s.c0},       {"theta", s.theta},
                          {"sigma", s.sigma}, {"Mp", s.Mp},       {"M", s.M},
                          {"seed", s.seed}};
}

ModelSpec spec_from_json(const nlohmann::json& j) {
    ModelSpec s;
    s.p = j.at("p").get<std::size_t>();
    s.n = j.at("n").get<std::size_t>();
    s.s0 = j.at("s0").get<std::size_t>();
    s.r0 = j.at("r0").get<std::size_t>();
    s.c0 = j.at("c0").get<double>();
    s.theta = j.at("theta").get<double>();
    s.sigma = j.at("sigma").get<double>();
    s.Mp = j.at("Mp").get<double>();
    s.M = j.at("M").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

} // namespace

void save_model(const std::string& dir, const LatentModel& model) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_matrix_file(dir + "/S.txt", model.S_star);
    write_matrix_file(dir + "/L.txt", model.L_star);
    write_matrix_file(dir + "/Sigma.txt", model.Sigma_star);

    nlohmann::json j;
    j["schema_version"] = 1;
    j["spec"] = spec_to_json(model.spec);
    j["true_rank"] = model.true_rank;
    j["sigma_effective"] = model.sigma_effective;
    j["M_effective"] = model.M_effective;
    nlohmann::json sup = nlohmann::json::array();
    for (const auto& [i, jdx] : model.support) sup.push_back({i, jdx});
    j["support"] = std::move(sup);

    std::ofstream os(dir + "/model.json");
    if (!os) throw IoError("cannot open for writing: " + dir + "/model.json");
    os << j.dump(2) << "\n";
}

ModelSpec load_spec_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open spec: " + path);
    nlohmann::json j;
    try {
        is >> j;
        ModelSpec s = spec_from_json(j);
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("spec json: " + std::string(e.what()));
    }
}

void save_spec_file(const std::string& path, const ModelSpec& spec) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << spec_to_json(spec).dump(2) << "\n";
}

LatentModel load_model(const std::string& dir) {
    std::ifstream is(dir + "/model.json");
    if (!is) throw IoError("cannot open: " + dir + "/model.json");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model.json: " + std::string(e.what()));
    }
    LatentModel m;
    try {
        m.spec = spec_from_json(j.at("spec"));
        m.true_rank = j.at("true_rank").get<std::size_t>();
        m.sigma_effective = j.at("sigma_effective").get<double>();
        m.M_effective = j.at("M_effective").get<double>();
        for (const auto& e : j.at("support")) {
            m.support.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model.json: " + std::string(e.what()));
    }
    m.S_star = read_matrix_file(dir + "/S.txt");
    m.L_star = read_matrix_file(dir + "/L.txt");
    m.Sigma_star = read_matrix_file(dir + "/Sigma.txt");
    return m;
}

} // namespace lvggm
