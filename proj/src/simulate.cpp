#include "ecoplex/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "ecoplex/errors.hpp"
#include "ecoplex/parallel.hpp"
#include "ecoplex/stats.hpp"

namespace ecoplex {

ProductSets select_product_sets(const CoClusterAssignment& assignment, double high_threshold,
                                double borderline_threshold) {
    if (!(borderline_threshold > 0.5 && borderline_threshold < high_threshold &&
          high_threshold <= 1.0)) {
        throw ContractViolation(
            "select_product_sets: need 0.5 < borderline_thr < high_thr <= 1");
    }
    ProductSets sets;
    sets.high_threshold = high_threshold;
    sets.borderline_threshold = borderline_threshold;
    const Eigen::Index offset = assignment.num_countries;
    for (Eigen::Index p = 0; p < assignment.num_products; ++p) {
        const double pb = assignment.prob_b[offset + p];
        const std::string& code = assignment.codes[static_cast<size_t>(offset + p)];
        if (1.0 - pb > high_threshold) sets.a_core.push_back(code);
        if (pb > high_threshold) sets.b_core.push_back(code);
        if (std::max(pb, 1.0 - pb) < borderline_threshold) sets.borderline.push_back(code);
    }
    sets.all_empty = sets.a_core.empty() && sets.b_core.empty() && sets.borderline.empty();
    return sets;
}

Baseline make_baseline(const SpecializationMatrix& m, const SimulateOptions& options) {
    Baseline baseline;
    baseline.matrix = m;
    baseline.scores = eci_pci_svd(m, options.score);
    baseline.embedding = embed(m, baseline.scores);
    baseline.gmm = fit_gmm_1d(baseline.embedding, options.gmm);
    baseline.assignment = assign(baseline.gmm, baseline.embedding, baseline.scores);
    return baseline;
}

ComplexityScores align_orientation(ComplexityScores counterfactual,
                                   const ComplexityScores& baseline,
                                   const SpecializationMatrix& m) {
    if (counterfactual.eci_raw.size() != baseline.eci_raw.size()) {
        throw ContractViolation("align_orientation: country lists differ");
    }
    const double corr = stats::pearson(counterfactual.eci_raw, baseline.eci_raw);
    if (corr < -1e-12) {
        counterfactual.eci_raw = -counterfactual.eci_raw;
        counterfactual.pci_raw = -counterfactual.pci_raw;
        if (counterfactual.eci_std.size() > 0) counterfactual.eci_std = -counterfactual.eci_std;
        if (counterfactual.pci_std.size() > 0) counterfactual.pci_std = -counterfactual.pci_std;
        counterfactual.orientation.flipped = !counterfactual.orientation.flipped;
        counterfactual.orientation.rule = "baseline-alignment";
    } else if (corr > 1e-12) {
        counterfactual.orientation.rule = "baseline-alignment";
    } else {
        // Degenerate correlation; keep the static rule's answer, flagged.
        counterfactual = orient_sign(std::move(counterfactual), m);
        counterfactual.orientation.rule = "baseline-alignment-fallback";
    }
    return counterfactual;
}

namespace {

// Scores the matrix with one extra edge, aligned to the reference scores.
ComplexityScores score_with_edge(const SpecializationMatrix& m, Eigen::Index c,
                                 Eigen::Index p, const ComplexityScores& reference,
                                 const SimulateOptions& options,
                                 SpecializationMatrix* out_matrix = nullptr) {
    SpecializationMatrix cf = m.with_added_edge(c, p);
    ScoreOptions score_options = options.score;
    // Warm start from the reference second left vector u2 = D^(1/2) eci.
    score_options.warm_start =
        reference.eci_raw.cwiseProduct(cf.diversity.cast<double>().cwiseSqrt());
    ComplexityScores scores = eci_pci_svd(cf, score_options);
    scores = align_orientation(std::move(scores), reference, cf);
    if (out_matrix) *out_matrix = std::move(cf);
    return scores;
}

}  // namespace

std::vector<SimulationRecord> sweep_single_additions(
    const SpecializationMatrix& m,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const SimulateOptions& options, const Baseline* shared_baseline) {
    const Baseline owned = shared_baseline ? Baseline{} : make_baseline(m, options);
    const Baseline& baseline = shared_baseline ? *shared_baseline : owned;

    // Resolve and validate all candidates up front.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> resolved;
    resolved.reserve(candidates.size());
    for (const auto& [country, product] : candidates) {
        const Eigen::Index c = m.country_index(country);
        const Eigen::Index p = m.product_index(product);
        if (c < 0) throw FormatError("sweep: unknown country code '" + country + "'");
        if (p < 0) throw FormatError("sweep: unknown product code '" + product + "'");
        if (m.has_edge(c, p)) {
            throw ContractViolation("sweep: candidate edge (" + country + ", " + product +
                                    ") is already present");
        }
        resolved.emplace_back(c, p);
    }

    std::vector<SimulationRecord> records(resolved.size());
    parallel_for(resolved.size(), [&](std::size_t i) {
        const auto [c, p] = resolved[i];
        SpecializationMatrix cf_matrix;
        const ComplexityScores cf =
            score_with_edge(m, c, p, baseline.scores, options, &cf_matrix);
        const JointEmbedding cf_embedding = embed(cf_matrix, cf);
        const CoClusterAssignment cf_assignment = [&]() {
            if (options.audit) {
                const GmmModel refit = fit_gmm_1d(cf_embedding, options.gmm);
                return assign(refit, cf_embedding, cf);
            }
            return assign(baseline.gmm, cf_embedding, cf);
        }();

        SimulationRecord rec;
        rec.country = m.countries[static_cast<size_t>(c)];
        rec.product = m.products[static_cast<size_t>(p)];
        rec.eci_before = baseline.scores.eci_raw[c];
        rec.eci_after = cf.eci_raw[c];
        rec.pci_before = baseline.scores.pci_raw[p];
        rec.pci_after = cf.pci_raw[p];
        rec.sigma2_before = baseline.scores.sigma2;
        rec.sigma2_after = cf.sigma2;
        const Eigen::Index mm = m.country_count();
        rec.prob_b_country_before = baseline.assignment.prob_b[c];
        rec.prob_b_country_after = cf_assignment.prob_b[c];
        rec.prob_b_product_before = baseline.assignment.prob_b[mm + p];
        rec.prob_b_product_after = cf_assignment.prob_b[mm + p];
        rec.label_country_before = baseline.assignment.labels[static_cast<size_t>(c)];
        rec.label_country_after = cf_assignment.labels[static_cast<size_t>(c)];
        rec.label_product_before = baseline.assignment.labels[static_cast<size_t>(mm + p)];
        rec.label_product_after = cf_assignment.labels[static_cast<size_t>(mm + p)];
        records[i] = std::move(rec);
    });
    return records;
}

namespace {

int rank_from_bottom(const Eigen::VectorXd& eci, Eigen::Index target) {
    int rank = 0;
    for (Eigen::Index i = 0; i < eci.size(); ++i) {
        if (eci[i] < eci[target]) ++rank;
    }
    return rank;
}

std::vector<std::pair<std::string, double>> ranking_snapshot(
    const std::vector<std::string>& countries, const Eigen::VectorXd& eci) {
    std::vector<std::pair<std::string, double>> snapshot;
    snapshot.reserve(countries.size());
    for (size_t i = 0; i < countries.size(); ++i) {
        snapshot.emplace_back(countries[i], eci[static_cast<Eigen::Index>(i)]);
    }
    std::sort(snapshot.begin(), snapshot.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return snapshot;
}

}  // namespace

GreedyTrajectory greedy_maximize(const SpecializationMatrix& m, const std::string& target,
                                 int max_iter, const SimulateOptions& options) {
    if (max_iter < 1) throw ContractViolation("greedy_maximize: max_iter must be >= 1");
    const Eigen::Index t = m.country_index(target);
    if (t < 0) throw FormatError("greedy_maximize: unknown country code '" + target + "'");

    GreedyTrajectory trajectory;
    trajectory.target = target;

    SpecializationMatrix current = m;
    ComplexityScores current_scores = eci_pci_svd(m, options.score);
    trajectory.baseline_eci = current_scores.eci_raw[t];
    trajectory.baseline_rank = rank_from_bottom(current_scores.eci_raw, t);

    for (int iteration = 1; iteration <= max_iter; ++iteration) {
        std::vector<Eigen::Index> absent;
        for (Eigen::Index p = 0; p < current.product_count(); ++p) {
            if (!current.has_edge(t, p)) absent.push_back(p);
        }
        if (absent.empty()) {
            trajectory.termination = "saturated";
            return trajectory;
        }

        std::vector<ComplexityScores> evals(absent.size());
        std::vector<SpecializationMatrix> matrices(absent.size());
        parallel_for(absent.size(), [&](std::size_t i) {
            evals[i] = score_with_edge(current, t, absent[i], current_scores, options,
                                       &matrices[i]);
        });

        if (options.audit) {
            std::vector<CandidateEvaluation> recorded;
            recorded.reserve(absent.size());
            for (size_t i = 0; i < absent.size(); ++i) {
                recorded.push_back(
                    {current.products[static_cast<size_t>(absent[i])], evals[i].eci_raw[t]});
            }
            trajectory.evaluations.push_back(std::move(recorded));
        }

        // Products are scanned in ascending code order, so strict > keeps
        // the lowest code on ties.
        size_t best = 0;
        for (size_t i = 1; i < absent.size(); ++i) {
            if (evals[i].eci_raw[t] > evals[best].eci_raw[t]) best = i;
        }
        if (evals[best].eci_raw[t] <= current_scores.eci_raw[t]) {
            trajectory.termination = "no_improvement";
            return trajectory;
        }

        current = std::move(matrices[best]);
        current_scores = std::move(evals[best]);

        GreedyStep step;
        step.iteration = iteration;
        step.product = current.products[static_cast<size_t>(absent[best])];
        step.rank = rank_from_bottom(current_scores.eci_raw, t);
        step.eci = current_scores.eci_raw[t];
        step.ranking = ranking_snapshot(current.countries, current_scores.eci_raw);
        trajectory.steps.push_back(std::move(step));
    }
    trajectory.termination = "max_iter";
    return trajectory;
}

}  // namespace ecoplex
