#include "ecoplex/artifacts.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ecoplex/csv.hpp"
#include "ecoplex/errors.hpp"

namespace ecoplex::artifacts {

namespace fs = std::filesystem;

std::filesystem::path ensure_dir(const std::string& dir) {
    fs::path path(dir);
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    return path;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double json_number(double v) {
    return std::stod(csv::format_number(v));
}

namespace {

const char* kMatrixCsv = "matrix.csv";
const char* kMatrixJson = "matrix.json";

std::string fm(double v) { return csv::format_number(v); }

}  // namespace

void write_matrix(const fs::path& dir, const SpecializationMatrix& m,
                  const PruneReport& report, const std::string& policy) {
    std::string csv_body = "country,product\n";
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            csv_body += m.countries[static_cast<size_t>(it.row())];
            csv_body += ',';
            csv_body += m.products[static_cast<size_t>(it.col())];
            csv_body += '\n';
        }
    }
    write_text(dir / kMatrixCsv, csv_body);

    ojson meta;
    meta["countries"] = m.countries;
    meta["products"] = m.products;
    meta["diversity"] = std::vector<int>(m.diversity.data(), m.diversity.data() + m.diversity.size());
    meta["ubiquity"] = std::vector<int>(m.ubiquity.data(), m.ubiquity.data() + m.ubiquity.size());
    ojson prune_report;
    prune_report["policy"] = policy;
    prune_report["dropped_countries"] = report.dropped_countries;
    prune_report["dropped_products"] = report.dropped_products;
    ojson sizes = ojson::array();
    for (const auto& [c, p] : report.component_sizes) {
        sizes.push_back(ojson::array({c, p}));
    }
    prune_report["component_sizes"] = sizes;
    meta["prune"] = prune_report;
    write_text(dir / kMatrixJson, meta.dump(2) + "\n");
}

bool matrix_exists(const fs::path& dir) {
    return fs::exists(dir / kMatrixCsv) && fs::exists(dir / kMatrixJson);
}

bool scores_exist(const fs::path& dir) {
    return fs::exists(dir / "eci.csv") && fs::exists(dir / "pci.csv");
}

SpecializationMatrix read_matrix(const fs::path& dir) {
    ojson meta;
    try {
        meta = ojson::parse(read_text(dir / kMatrixJson));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid matrix sidecar JSON: " + std::string(e.what()));
    }
    std::vector<std::string> countries = meta.at("countries").get<std::vector<std::string>>();
    std::vector<std::string> products = meta.at("products").get<std::vector<std::string>>();

    std::istringstream in(read_text(dir / kMatrixCsv));
    std::string line;
    if (!std::getline(in, line) || csv::trim(line) != "country,product") {
        throw FormatError("matrix.csv: malformed header");
    }
    std::vector<std::pair<int, int>> edges;
    std::vector<std::string>::const_iterator it;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = csv::trim(line);
        if (trimmed.empty()) continue;
        const auto cells = csv::split(trimmed, ',');
        if (cells.size() != 2) {
            throw FormatError("matrix.csv line " + std::to_string(line_no) +
                              ": expected 'country,product'");
        }
        it = std::lower_bound(countries.begin(), countries.end(), cells[0]);
        if (it == countries.end() || *it != cells[0]) {
            throw FormatError("matrix.csv line " + std::to_string(line_no) +
                              ": unknown country '" + cells[0] + "'");
        }
        const int c = static_cast<int>(it - countries.begin());
        it = std::lower_bound(products.begin(), products.end(), cells[1]);
        if (it == products.end() || *it != cells[1]) {
            throw FormatError("matrix.csv line " + std::to_string(line_no) +
                              ": unknown product '" + cells[1] + "'");
        }
        const int p = static_cast<int>(it - products.begin());
        edges.emplace_back(c, p);
    }

    SpecializationMatrix m =
        SpecializationMatrix::from_edges(edges, std::move(countries), std::move(products));

    const auto div = meta.at("diversity").get<std::vector<int>>();
    const auto ubi = meta.at("ubiquity").get<std::vector<int>>();
    if (static_cast<Eigen::Index>(div.size()) != m.country_count() ||
        static_cast<Eigen::Index>(ubi.size()) != m.product_count()) {
        throw FormatError("matrix sidecar: count vectors do not match code lists");
    }
    for (Eigen::Index c = 0; c < m.country_count(); ++c) {
        if (m.diversity[c] != div[static_cast<size_t>(c)]) {
            throw FormatError("matrix sidecar: diversity mismatch for '" +
                              m.countries[static_cast<size_t>(c)] + "'");
        }
    }
    for (Eigen::Index p = 0; p < m.product_count(); ++p) {
        if (m.ubiquity[p] != ubi[static_cast<size_t>(p)]) {
            throw FormatError("matrix sidecar: ubiquity mismatch for '" +
                              m.products[static_cast<size_t>(p)] + "'");
        }
    }
    return m;
}

void write_scores(const fs::path& dir, const SpecializationMatrix& m,
                  const ComplexityScores& scores, double cross_route_residual) {
    std::string eci = "code,eci_raw,eci_std\n";
    for (Eigen::Index c = 0; c < m.country_count(); ++c) {
        eci += m.countries[static_cast<size_t>(c)] + "," + fm(scores.eci_raw[c]) + "," +
               fm(scores.eci_std[c]) + "\n";
    }
    write_text(dir / "eci.csv", eci);

    std::string pci = "code,pci_raw,pci_std\n";
    for (Eigen::Index p = 0; p < m.product_count(); ++p) {
        pci += m.products[static_cast<size_t>(p)] + "," + fm(scores.pci_raw[p]) + "," +
               fm(scores.pci_std[p]) + "\n";
    }
    write_text(dir / "pci.csv", pci);

    ojson meta;
    meta["sigma2"] = json_number(scores.sigma2);
    meta["lambda2"] = json_number(scores.lambda2);
    ojson orientation;
    orientation["flipped"] = scores.orientation.flipped;
    orientation["rule"] = scores.orientation.rule;
    orientation["diversity_corr"] = json_number(scores.orientation.diversity_corr);
    meta["orientation"] = orientation;
    ojson solver;
    solver["route"] = scores.solver.route;
    solver["iterations"] = scores.solver.iterations;
    solver["residual"] = json_number(scores.solver.residual);
    solver["warnings"] = scores.solver.warnings;
    meta["solver"] = solver;
    meta["cross_route_max_abs_diff"] = json_number(cross_route_residual);
    write_text(dir / "scores.json", meta.dump(2) + "\n");
}

void write_verify(const fs::path& dir, const std::vector<IdentityCheck>& checks) {
    ojson report = ojson::array();
    for (const auto& check : checks) {
        ojson entry;
        entry["identity"] = check.name;
        entry["residual"] = json_number(check.residual);
        entry["tolerance"] = check.tolerance;
        entry["pass"] = check.pass;
        entry["gating"] = check.gating;
        report.push_back(entry);
    }
    ojson top;
    top["checks"] = report;
    top["all_pass"] = all_gating_pass(checks);
    write_text(dir / "verify.json", top.dump(2) + "\n");
}

void write_reflections(const fs::path& dir, const SpecializationMatrix& m,
                       const ReflectionsTrace& trace,
                       const std::vector<double>& spearman_by_iteration) {
    std::string body = "iteration,kind,code,value\n";
    for (size_t it = 0; it < trace.countries.size(); ++it) {
        for (Eigen::Index c = 0; c < m.country_count(); ++c) {
            body += std::to_string(it) + ",country," + m.countries[static_cast<size_t>(c)] +
                    "," + fm(trace.countries[it][c]) + "\n";
        }
        for (Eigen::Index p = 0; p < m.product_count(); ++p) {
            body += std::to_string(it) + ",product," + m.products[static_cast<size_t>(p)] +
                    "," + fm(trace.products[it][p]) + "\n";
        }
    }
    write_text(dir / "mor_trace.csv", body);

    ojson summary;
    summary["iterations"] = static_cast<int>(trace.countries.size()) - 1;
    ojson spearman = ojson::array();
    for (double s : spearman_by_iteration) spearman.push_back(json_number(s));
    summary["spearman_vs_spectral_by_iteration"] = spearman;
    summary["spearman_vs_spectral_final"] =
        spearman_by_iteration.empty() ? 0.0 : json_number(spearman_by_iteration.back());
    write_text(dir / "mor_summary.json", summary.dump(2) + "\n");
}

void write_assignment(const fs::path& dir, const CoClusterAssignment& assignment) {
    std::string body = "code,kind,prob_B,label\n";
    for (Eigen::Index i = 0; i < assignment.prob_b.size(); ++i) {
        body += assignment.codes[static_cast<size_t>(i)];
        body += ',';
        body += to_string(assignment.kinds[static_cast<size_t>(i)]);
        body += ',';
        body += fm(assignment.prob_b[i]);
        body += ',';
        body += to_string(assignment.labels[static_cast<size_t>(i)]);
        body += '\n';
    }
    write_text(dir / "assignment.csv", body);
}

void write_gmm(const fs::path& dir, const GmmModel& model) {
    ojson meta;
    meta["weights"] = {json_number(model.weight[0]), json_number(model.weight[1])};
    meta["means"] = {json_number(model.mean[0]), json_number(model.mean[1])};
    meta["variances"] = {json_number(model.variance[0]), json_number(model.variance[1])};
    meta["converged"] = model.converged;
    meta["iterations"] = model.iterations;
    ojson trace = ojson::array();
    for (double ll : model.loglik) trace.push_back(json_number(ll));
    meta["loglik_trace"] = trace;
    write_text(dir / "gmm.json", meta.dump(2) + "\n");
}

void write_joint_membership(const fs::path& dir, const CoClusterAssignment& assignment,
                            const JointMembership& joint) {
    std::string body = "country";
    const Eigen::Index offset = assignment.num_countries;
    for (Eigen::Index p = 0; p < assignment.num_products; ++p) {
        body += ',';
        body += assignment.codes[static_cast<size_t>(offset + p)];
    }
    body += '\n';
    for (Eigen::Index c = 0; c < assignment.num_countries; ++c) {
        body += assignment.codes[static_cast<size_t>(c)];
        for (Eigen::Index p = 0; p < assignment.num_products; ++p) {
            body += ',';
            body += fm(joint.prob_both_b(c, p));
        }
        body += '\n';
    }
    write_text(dir / "joint_membership.csv", body);
}

void write_product_sets(const fs::path& dir, const ProductSets& sets) {
    ojson meta;
    meta["high_threshold"] = sets.high_threshold;
    meta["borderline_threshold"] = sets.borderline_threshold;
    meta["a_core"] = sets.a_core;
    meta["b_core"] = sets.b_core;
    meta["borderline"] = sets.borderline;
    meta["all_empty"] = sets.all_empty;
    write_text(dir / "product_sets.json", meta.dump(2) + "\n");
}

namespace {

void write_histogram(const fs::path& path, const Eigen::VectorXd& probabilities) {
    // 20 bins of width 0.05: 0.5 is exactly a bin edge, so the histogram
    // partitions at the assignment threshold.
    constexpr int kBins = 20;
    std::vector<int> counts(kBins, 0);
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
        int bin = static_cast<int>(probabilities[i] * kBins);
        if (bin >= kBins) bin = kBins - 1;
        if (bin < 0) bin = 0;
        counts[static_cast<size_t>(bin)]++;
    }
    std::string body = "bin_low,bin_high,count\n";
    for (int b = 0; b < kBins; ++b) {
        body += fm(b * 0.05) + "," + fm((b + 1) * 0.05) + "," +
                std::to_string(counts[static_cast<size_t>(b)]) + "\n";
    }
    write_text(path, body);
}

std::vector<int> rank_order(const Eigen::VectorXd& values) {
    std::vector<int> order(static_cast<size_t>(values.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&values](int a, int b) { return values[a] < values[b]; });
    std::vector<int> rank(order.size());
    for (size_t i = 0; i < order.size(); ++i) rank[static_cast<size_t>(order[i])] = static_cast<int>(i);
    return rank;
}

}  // namespace

void write_cocluster_reports(const fs::path& dir, const SpecializationMatrix& m,
                             const ComplexityScores& scores,
                             const CoClusterAssignment& assignment,
                             const JointMembership& joint) {
    write_histogram(dir / "hist_countries.csv", assignment.country_prob_b());
    write_histogram(dir / "hist_products.csv", assignment.product_prob_b());

    // Matrix coordinates with rows/columns arranged by score (ascending:
    // co-cluster A lands in the lower-left corner).
    const std::vector<int> row_rank = rank_order(scores.eci_raw);
    const std::vector<int> col_rank = rank_order(scores.pci_raw);
    std::string sorted = "row,col,country,product,same_cluster_prob\n";
    const Eigen::Index mm = m.country_count();
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            sorted += std::to_string(row_rank[static_cast<size_t>(it.row())]) + "," +
                      std::to_string(col_rank[static_cast<size_t>(it.col())]) + "," +
                      m.countries[static_cast<size_t>(it.row())] + "," +
                      m.products[static_cast<size_t>(it.col())] + "," +
                      fm(joint.same_cluster(it.row(), it.col())) + "\n";
        }
    }
    write_text(dir / "sorted_matrix.csv", sorted);

    std::string scatter =
        "country,product,eci_raw,pci_raw,same_cluster,same_cluster_prob\n";
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            const bool same = assignment.labels[static_cast<size_t>(it.row())] ==
                              assignment.labels[static_cast<size_t>(mm + it.col())];
            scatter += m.countries[static_cast<size_t>(it.row())] + "," +
                       m.products[static_cast<size_t>(it.col())] + "," +
                       fm(scores.eci_raw[it.row()]) + "," + fm(scores.pci_raw[it.col()]) +
                       "," + (same ? "1" : "0") + "," +
                       fm(joint.same_cluster(it.row(), it.col())) + "\n";
        }
    }
    write_text(dir / "scatter.csv", scatter);

    const AveragePciProfile profile = average_pci_profile(m, scores);
    std::string country_overlay = "country,eci_raw,mean_pci\n";
    for (Eigen::Index c = 0; c < mm; ++c) {
        country_overlay += m.countries[static_cast<size_t>(c)] + "," + fm(scores.eci_raw[c]) +
                           "," + fm(profile.country_mean_pci[c]) + "\n";
    }
    write_text(dir / "overlay_countries.csv", country_overlay);

    std::string product_overlay = "product,pci_raw,mean_eci\n";
    for (Eigen::Index p = 0; p < m.product_count(); ++p) {
        product_overlay += m.products[static_cast<size_t>(p)] + "," + fm(scores.pci_raw[p]) +
                           "," + fm(profile.product_mean_eci[p]) + "\n";
    }
    write_text(dir / "overlay_products.csv", product_overlay);
}

void write_sweep(const fs::path& dir, const std::vector<SimulationRecord>& records) {
    std::string body =
        "country,product,eci_before,eci_after,pci_before,pci_after,"
        "prob_b_country_before,prob_b_country_after,prob_b_product_before,"
        "prob_b_product_after,label_country_before,label_country_after,"
        "label_product_before,label_product_after,sigma2_before,sigma2_after\n";
    for (const auto& rec : records) {
        body += rec.country + "," + rec.product + "," + fm(rec.eci_before) + "," +
                fm(rec.eci_after) + "," + fm(rec.pci_before) + "," + fm(rec.pci_after) + "," +
                fm(rec.prob_b_country_before) + "," + fm(rec.prob_b_country_after) + "," +
                fm(rec.prob_b_product_before) + "," + fm(rec.prob_b_product_after) + "," +
                to_string(rec.label_country_before) + "," +
                std::string(to_string(rec.label_country_after)) + "," +
                to_string(rec.label_product_before) + "," +
                std::string(to_string(rec.label_product_after)) + "," +
                fm(rec.sigma2_before) + "," + fm(rec.sigma2_after) + "\n";
    }
    write_text(dir / "sweep.csv", body);
}

void write_greedy(const fs::path& dir, const GreedyTrajectory& trajectory) {
    ojson meta;
    meta["target"] = trajectory.target;
    meta["baseline_eci"] = json_number(trajectory.baseline_eci);
    meta["baseline_rank"] = trajectory.baseline_rank;
    meta["termination"] = trajectory.termination;
    ojson steps = ojson::array();
    for (const auto& step : trajectory.steps) {
        ojson s;
        s["iteration"] = step.iteration;
        s["product"] = step.product;
        s["rank"] = step.rank;
        s["eci"] = json_number(step.eci);
        steps.push_back(s);
    }
    meta["steps"] = steps;
    if (!trajectory.evaluations.empty()) {
        ojson evals = ojson::array();
        for (const auto& iteration_evals : trajectory.evaluations) {
            ojson per_iter = ojson::array();
            for (const auto& eval : iteration_evals) {
                ojson e;
                e["product"] = eval.product;
                e["target_eci"] = json_number(eval.target_eci);
                per_iter.push_back(e);
            }
            evals.push_back(per_iter);
        }
        meta["evaluations"] = evals;
    }
    write_text(dir / "trajectory.json", meta.dump(2) + "\n");

    // ranking.csv: one row per country per iteration; snapshots are eci
    // descending, rank counts from the bottom to match GreedyStep::rank.
    std::string ranking = "iteration,rank,code,eci_raw\n";
    for (const auto& step : trajectory.steps) {
        const int n = static_cast<int>(step.ranking.size());
        for (int i = 0; i < n; ++i) {
            const auto& [code, eci] = step.ranking[static_cast<size_t>(i)];
            ranking += std::to_string(step.iteration) + "," + std::to_string(n - 1 - i) + "," +
                       code + "," + fm(eci) + "\n";
        }
    }
    write_text(dir / "ranking.csv", ranking);
}

void write_config(const fs::path& dir, const ojson& config) {
    std::string name = config.value("command", std::string("run"));
    for (auto& c : name) {
        if (c == ' ') c = '_';
    }
    write_text(dir / ("config." + name + ".json"), config.dump(2) + "\n");
}

}  // namespace ecoplex::artifacts
