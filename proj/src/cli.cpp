#include "ecoplex/cli.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "ecoplex/artifacts.hpp"
#include "ecoplex/cocluster.hpp"
#include "ecoplex/complexity.hpp"
#include "ecoplex/csv.hpp"
#include "ecoplex/errors.hpp"
#include "ecoplex/interpretation.hpp"
#include "ecoplex/matrix.hpp"
#include "ecoplex/simulate.hpp"
#include "ecoplex/stats.hpp"
#include "ecoplex/synthetic.hpp"
#include "ecoplex/trade.hpp"

namespace ecoplex {

namespace {

namespace fs = std::filesystem;
using artifacts::ojson;

ojson config_to_json(const RunConfig& c) {
    ojson j;
    j["command"] = c.command;
    j["input"] = c.input;
    j["out"] = c.out;
    j["year"] = c.year;
    j["rca_threshold"] = c.rca_threshold;
    j["prune_policy"] = c.prune_policy;
    j["route"] = c.route;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
    j["iters"] = c.iters;
    j["seed"] = c.seed;
    j["verify"] = c.verify;
    j["audit"] = c.audit;
    j["target"] = c.target;
    j["candidates"] = c.candidates;
    j["country"] = c.country;
    j["product_set"] = c.product_set;
    j["high_threshold"] = c.high_threshold;
    j["borderline_threshold"] = c.borderline_threshold;
    j["greedy_max_iter"] = c.greedy_max_iter;
    return j;
}

void config_from_json(const ojson& j, RunConfig* c) {
    c->input = j.value("input", c->input);
    c->out = j.value("out", c->out);
    c->year = j.value("year", c->year);
    c->rca_threshold = j.value("rca_threshold", c->rca_threshold);
    c->prune_policy = j.value("prune_policy", c->prune_policy);
    c->route = j.value("route", c->route);
    c->tol = j.value("tol", c->tol);
    c->max_iter = j.value("max_iter", c->max_iter);
    c->iters = j.value("iters", c->iters);
    c->seed = j.value("seed", c->seed);
    c->verify = j.value("verify", c->verify);
    c->audit = j.value("audit", c->audit);
    c->target = j.value("target", c->target);
    c->candidates = j.value("candidates", c->candidates);
    c->country = j.value("country", c->country);
    c->product_set = j.value("product_set", c->product_set);
    c->high_threshold = j.value("high_threshold", c->high_threshold);
    c->borderline_threshold = j.value("borderline_threshold", c->borderline_threshold);
    c->greedy_max_iter = j.value("greedy_max_iter", c->greedy_max_iter);
}

SpecializationMatrix load_matrix(const RunConfig& cfg) {
    if (cfg.input.empty()) throw FormatError("missing --input artifact directory");
    if (!artifacts::matrix_exists(cfg.input)) {
        throw FormatError("no matrix artifacts in '" + cfg.input + "' (run ingest first)");
    }
    return artifacts::read_matrix(cfg.input);
}

void require_scores(const RunConfig& cfg) {
    if (!artifacts::scores_exist(cfg.input)) {
        throw FormatError("no score artifacts in '" + cfg.input + "' (run scores first)");
    }
}

ScoreOptions score_options(const RunConfig& cfg) {
    ScoreOptions options;
    options.tol = cfg.tol;
    options.max_iter = cfg.max_iter;
    return options;
}

SimulateOptions simulate_options(const RunConfig& cfg) {
    SimulateOptions options;
    options.audit = cfg.audit;
    options.score = score_options(cfg);
    options.gmm.seed = cfg.seed;
    return options;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.input.empty()) throw FormatError("ingest requires --input trade CSV");
    std::ifstream file(cfg.input, std::ios::binary);
    if (!file) throw FormatError("cannot open input file '" + cfg.input + "'");

    PrunePolicy policy;
    if (cfg.prune_policy == "component") {
        policy = PrunePolicy::LargestComponent;
    } else if (cfg.prune_policy == "strict") {
        policy = PrunePolicy::Strict;
    } else {
        throw FormatError("unknown prune policy '" + cfg.prune_policy +
                          "' (use strict or component)");
    }

    const TradeFlowTable table = parse_trade_flows(file);
    const RcaMatrix rca = compute_rca(table, cfg.year);
    const SpecializationMatrix unpruned = binarize(rca, cfg.rca_threshold);
    PruneResult result = prune(unpruned, policy);
    if (!result.report.empty()) {
        err << "warning: pruned " << result.report.dropped_countries.size()
            << " countries and " << result.report.dropped_products.size()
            << " products (kept largest of " << result.report.component_sizes.size()
            << " components)\n";
    }

    const fs::path dir = artifacts::ensure_dir(cfg.out);
    artifacts::write_matrix(dir, result.matrix, result.report, cfg.prune_policy);
    artifacts::write_config(dir, config_to_json(cfg));
    out << "ingest: " << result.matrix.country_count() << " countries x "
        << result.matrix.product_count() << " products, " << result.matrix.edge_count()
        << " specializations -> " << cfg.out << "\n";
    return 0;
}

int cmd_scores(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.route != "svd" && cfg.route != "eigen" && cfg.route != "mor") {
        throw FormatError("unknown route '" + cfg.route + "' (use svd, eigen or mor)");
    }
    const SpecializationMatrix m = load_matrix(cfg);
    const fs::path dir = artifacts::ensure_dir(cfg.out);

    const ComplexityScores svd_scores = eci_pci_svd(m, score_options(cfg));
    const ComplexityScores eigen_scores = eci_pci_eigen(m);
    const double cross =
        (svd_scores.eci_raw - eigen_scores.eci_raw).cwiseAbs().maxCoeff();

    const ComplexityScores& primary = cfg.route == "eigen" ? eigen_scores : svd_scores;
    artifacts::write_scores(dir, m, primary, cross);

    if (cfg.route == "mor") {
        const ReflectionsTrace trace = method_of_reflections(m, cfg.iters, true);
        std::vector<double> spearman;
        spearman.reserve(trace.countries.size());
        for (const auto& iterate : trace.countries) {
            spearman.push_back(stats::spearman(iterate, svd_scores.eci_raw));
        }
        artifacts::write_reflections(dir, m, trace, spearman);
    }

    bool verified = true;
    if (cfg.verify) {
        const auto checks = verify_identities(m, primary);
        artifacts::write_verify(dir, checks);
        verified = all_gating_pass(checks);
    }
    artifacts::write_config(dir, config_to_json(cfg));
    out << "scores: route " << cfg.route << ", sigma2 = " << csv::format_number(primary.sigma2)
        << ", lambda2 = " << csv::format_number(primary.lambda2)
        << ", cross-route residual = " << csv::format_number(cross) << "\n";
    if (!verified) {
        out << "scores: identity verification FAILED (see verify.json)\n";
        return 1;
    }
    return 0;
}

int cmd_cocluster(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const SpecializationMatrix m = load_matrix(cfg);
    require_scores(cfg);

    const ComplexityScores scores = eci_pci_svd(m, score_options(cfg));
    const JointEmbedding embedding = embed(m, scores);
    GmmOptions gmm_options;
    gmm_options.seed = cfg.seed;
    const GmmModel model = fit_gmm_1d(embedding, gmm_options);
    const CoClusterAssignment assignment = assign(model, embedding, scores);
    const JointMembership joint = joint_membership(assignment);
    const ProductSets sets =
        select_product_sets(assignment, cfg.high_threshold, cfg.borderline_threshold);

    if (assignment.empty_cluster) err << "warning: one co-cluster is empty\n";
    if (assignment.near_empty_component) {
        err << "warning: a mixture component holds almost no responsibility mass\n";
    }
    if (sets.all_empty) err << "warning: all selected product sets are empty\n";

    const fs::path dir = artifacts::ensure_dir(cfg.out);
    artifacts::write_assignment(dir, assignment);
    artifacts::write_gmm(dir, model);
    artifacts::write_joint_membership(dir, assignment, joint);
    artifacts::write_product_sets(dir, sets);
    artifacts::write_cocluster_reports(dir, m, scores, assignment, joint);
    artifacts::write_config(dir, config_to_json(cfg));

    const auto count_b = std::count(assignment.labels.begin(), assignment.labels.end(),
                                    ClusterLabel::B);
    out << "cocluster: " << count_b << " of " << assignment.labels.size()
        << " entities in co-cluster B; gmm converged = "
        << (model.converged ? "true" : "false") << "\n";
    return 0;
}

std::vector<std::pair<std::string, std::string>> read_candidates(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw FormatError("cannot open candidates file '" + path + "'");
    std::string line;
    if (!std::getline(file, line) || csv::trim(line) != "country,product") {
        throw FormatError("candidates file: expected header 'country,product'");
    }
    std::vector<std::pair<std::string, std::string>> candidates;
    while (std::getline(file, line)) {
        const std::string trimmed = csv::trim(line);
        if (trimmed.empty()) continue;
        const auto cells = csv::split(trimmed, ',');
        if (cells.size() != 2) {
            throw FormatError("candidates file: malformed row '" + trimmed + "'");
        }
        candidates.emplace_back(csv::trim(cells[0]), csv::trim(cells[1]));
    }
    return candidates;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const SpecializationMatrix m = load_matrix(cfg);
    require_scores(cfg);
    const SimulateOptions options = simulate_options(cfg);

    std::vector<std::pair<std::string, std::string>> candidates;
    const Baseline baseline = make_baseline(m, options);
    if (!cfg.candidates.empty()) {
        candidates = read_candidates(cfg.candidates);
    } else {
        // Absent pairs, optionally restricted to one country and/or a
        // membership-selected product set.
        std::vector<bool> product_allowed(static_cast<size_t>(m.product_count()), true);
        if (!cfg.product_set.empty()) {
            const ProductSets sets = select_product_sets(
                baseline.assignment, cfg.high_threshold, cfg.borderline_threshold);
            const std::vector<std::string>* chosen = nullptr;
            if (cfg.product_set == "a-core") chosen = &sets.a_core;
            else if (cfg.product_set == "b-core") chosen = &sets.b_core;
            else if (cfg.product_set == "borderline") chosen = &sets.borderline;
            else {
                throw FormatError("unknown product set '" + cfg.product_set +
                                  "' (use a-core, b-core or borderline)");
            }
            product_allowed.assign(static_cast<size_t>(m.product_count()), false);
            for (const auto& code : *chosen) {
                product_allowed[static_cast<size_t>(m.product_index(code))] = true;
            }
        }
        std::vector<Eigen::Index> country_rows;
        if (cfg.country.empty()) {
            for (Eigen::Index c = 0; c < m.country_count(); ++c) country_rows.push_back(c);
        } else {
            const Eigen::Index c = m.country_index(cfg.country);
            if (c < 0) throw FormatError("unknown country code '" + cfg.country + "'");
            country_rows.push_back(c);
        }
        for (const Eigen::Index c : country_rows) {
            for (Eigen::Index p = 0; p < m.product_count(); ++p) {
                if (!product_allowed[static_cast<size_t>(p)] || m.has_edge(c, p)) continue;
                candidates.emplace_back(m.countries[static_cast<size_t>(c)],
                                        m.products[static_cast<size_t>(p)]);
            }
        }
    }

    const std::vector<SimulationRecord> records =
        sweep_single_additions(m, candidates, options, &baseline);
    const fs::path dir = artifacts::ensure_dir(cfg.out);
    artifacts::write_sweep(dir, records);
    artifacts::write_config(dir, config_to_json(cfg));
    out << "sweep: " << records.size() << " counterfactual additions -> " << cfg.out << "\n";
    return 0;
}

int cmd_greedy(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const SpecializationMatrix m = load_matrix(cfg);
    require_scores(cfg);
    if (cfg.target.empty()) throw FormatError("simulate greedy requires --target");

    const GreedyTrajectory trajectory =
        greedy_maximize(m, cfg.target, cfg.greedy_max_iter, simulate_options(cfg));
    const fs::path dir = artifacts::ensure_dir(cfg.out);
    artifacts::write_greedy(dir, trajectory);
    artifacts::write_config(dir, config_to_json(cfg));
    out << "greedy: target " << cfg.target << ", " << trajectory.steps.size()
        << " additions, termination = " << trajectory.termination << "\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const SpecializationMatrix m = load_matrix(cfg);
    const ComplexityScores scores = eci_pci_svd(m, score_options(cfg));
    const auto checks = verify_identities(m, scores);

    const fs::path dir = artifacts::ensure_dir(cfg.out);
    artifacts::write_verify(dir, checks);
    artifacts::write_config(dir, config_to_json(cfg));
    for (const auto& check : checks) {
        out << (check.pass ? "pass" : "FAIL") << "  " << check.name
            << "  residual=" << csv::format_number(check.residual)
            << (check.gating ? "" : "  (informational)") << "\n";
    }
    return all_gating_pass(checks) ? 0 : 1;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const std::vector<std::pair<int, int>> sizes = {{50, 100}, {100, 200}, {300, 600}};
    constexpr double kDensity = 0.2;

    std::string body = "m,n,density,route,wall_seconds,residual\n";
    for (size_t i = 0; i < sizes.size(); ++i) {
        const SpecializationMatrix instance = random_connected_instance(
            sizes[i].first, sizes[i].second, kDensity, cfg.seed + i);

        const auto t0 = std::chrono::steady_clock::now();
        const ComplexityScores svd_scores = eci_pci_svd(instance, score_options(cfg));
        const auto t1 = std::chrono::steady_clock::now();
        const ComplexityScores eigen_scores = eci_pci_eigen(instance);
        const auto t2 = std::chrono::steady_clock::now();

        const double residual =
            (svd_scores.eci_raw - eigen_scores.eci_raw).cwiseAbs().maxCoeff();
        const double svd_seconds = std::chrono::duration<double>(t1 - t0).count();
        const double eigen_seconds = std::chrono::duration<double>(t2 - t1).count();

        const std::string prefix = std::to_string(instance.country_count()) + "," +
                                   std::to_string(instance.product_count()) + "," +
                                   csv::format_number(kDensity) + ",";
        body += prefix + "svd," + csv::format_number(svd_seconds) + "," +
                csv::format_number(residual) + "\n";
        body += prefix + "eigen," + csv::format_number(eigen_seconds) + "," +
                csv::format_number(residual) + "\n";
        out << "bench " << instance.country_count() << "x" << instance.product_count()
            << ": svd " << csv::format_number(svd_seconds) << "s, eigen "
            << csv::format_number(eigen_seconds)
            << "s, residual " << csv::format_number(residual) << "\n";
    }

    const fs::path dir = artifacts::ensure_dir(cfg.out);
    artifacts::write_text(dir / "bench.csv", body);
    artifacts::write_config(dir, config_to_json(cfg));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;

    // --config is applied before flag parsing, so explicit flags override
    // the loaded values.
    for (size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
        if (!path.empty()) {
            try {
                const ojson loaded = ojson::parse(artifacts::read_text(path));
                config_from_json(loaded, &cfg);
            } catch (const nlohmann::json::exception& e) {
                err << "error: invalid config '" << path << "': " << e.what() << "\n";
                return 2;
            } catch (const FormatError& e) {
                err << "error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{"ecoplex: economic complexity indices via spectral co-clustering"};
    app.require_subcommand(1);
    std::string config_path;  // registered so the flag is accepted; handled above

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config supplying defaults");
        sub->add_option("--seed", cfg.seed, "random seed for stochastic steps");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--tol", cfg.tol, "solver tolerance");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "trade CSV -> specialization matrix");
    add_common(ingest);
    ingest->add_option("--input", cfg.input, "trade-flow CSV (year,country,product,value)");
    ingest->add_option("--year", cfg.year, "year to extract");
    ingest->add_option("--rca-threshold", cfg.rca_threshold, "specialization cutoff");
    ingest->add_option("--prune-policy", cfg.prune_policy, "strict or component");

    CLI::App* scores = app.add_subcommand("scores", "matrix artifacts -> ECI/PCI scores");
    add_common(scores);
    scores->add_option("--input", cfg.input, "matrix artifact directory");
    scores->add_option("--route", cfg.route, "svd, eigen or mor");
    scores->add_option("--iters", cfg.iters, "method-of-reflections iterations");
    scores->add_flag("--verify", cfg.verify, "also emit the identity report");

    CLI::App* cocluster = app.add_subcommand("cocluster", "scores -> soft co-clusters");
    add_common(cocluster);
    cocluster->add_option("--input", cfg.input, "artifact directory with matrix + scores");
    cocluster->add_option("--high-thr", cfg.high_threshold, "core membership threshold");
    cocluster->add_option("--borderline-thr", cfg.borderline_threshold,
                          "borderline membership threshold");

    CLI::App* simulate = app.add_subcommand("simulate", "counterfactual specializations");
    simulate->require_subcommand(1);
    CLI::App* sweep = simulate->add_subcommand("sweep", "single-addition sweep");
    add_common(sweep);
    sweep->add_option("--input", cfg.input, "artifact directory with matrix + scores");
    sweep->add_option("--candidates", cfg.candidates, "candidate CSV (country,product)");
    sweep->add_option("--country", cfg.country, "sweep one country's absent products");
    sweep->add_option("--product-set", cfg.product_set, "a-core, b-core or borderline");
    sweep->add_option("--high-thr", cfg.high_threshold, "core membership threshold");
    sweep->add_option("--borderline-thr", cfg.borderline_threshold,
                      "borderline membership threshold");
    sweep->add_flag("--audit", cfg.audit, "refit the mixture per counterfactual");

    CLI::App* greedy = simulate->add_subcommand("greedy", "iterative ECI maximization");
    add_common(greedy);
    greedy->add_option("--input", cfg.input, "artifact directory with matrix + scores");
    greedy->add_option("--target", cfg.target, "country whose ECI is maximized");
    greedy->add_option("--max-iter", cfg.greedy_max_iter, "iteration budget");
    greedy->add_flag("--audit", cfg.audit, "record per-candidate evaluations");

    CLI::App* verify = app.add_subcommand("verify", "numeric identity certification");
    add_common(verify);
    verify->add_option("--input", cfg.input, "matrix artifact directory");

    CLI::App* bench = app.add_subcommand("bench", "truncated-SVD vs dense-eigen timings");
    add_common(bench);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("ecoplex");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (ingest->parsed()) {
            cfg.command = "ingest";
            return cmd_ingest(cfg, out, err);
        }
        if (scores->parsed()) {
            cfg.command = "scores";
            return cmd_scores(cfg, out, err);
        }
        if (cocluster->parsed()) {
            cfg.command = "cocluster";
            return cmd_cocluster(cfg, out, err);
        }
        if (simulate->parsed()) {
            if (sweep->parsed()) {
                cfg.command = "simulate sweep";
                return cmd_sweep(cfg, out, err);
            }
            cfg.command = "simulate greedy";
            return cmd_greedy(cfg, out, err);
        }
        if (verify->parsed()) {
            cfg.command = "verify";
            return cmd_verify(cfg, out, err);
        }
        if (bench->parsed()) {
            cfg.command = "bench";
            return cmd_bench(cfg, out, err);
        }
        err << "error: no command selected\n";
        return 2;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DuplicateKeyError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const EmptyYearError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ecoplex
