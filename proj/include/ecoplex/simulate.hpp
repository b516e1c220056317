#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ecoplex/cocluster.hpp"
#include "ecoplex/complexity.hpp"
#include "ecoplex/matrix.hpp"

namespace ecoplex {

// Product sets selected by membership probability: cores hold products
// firmly in one co-cluster, the borderline set those committed to neither.
struct ProductSets {
    std::vector<std::string> a_core;
    std::vector<std::string> b_core;
    std::vector<std::string> borderline;
    double high_threshold = 0.997;
    double borderline_threshold = 0.6;
    bool all_empty = false;
};

// Requires 0.5 < borderline_threshold < high_threshold <= 1.
ProductSets select_product_sets(const CoClusterAssignment& assignment,
                                double high_threshold = 0.997,
                                double borderline_threshold = 0.6);

// One counterfactual edge addition with before/after scores and
// memberships for the touched country and product.
struct SimulationRecord {
    std::string country;
    std::string product;
    double eci_before = 0.0, eci_after = 0.0;
    double pci_before = 0.0, pci_after = 0.0;
    double prob_b_country_before = 0.0, prob_b_country_after = 0.0;
    double prob_b_product_before = 0.0, prob_b_product_after = 0.0;
    ClusterLabel label_country_before = ClusterLabel::A;
    ClusterLabel label_country_after = ClusterLabel::A;
    ClusterLabel label_product_before = ClusterLabel::A;
    ClusterLabel label_product_after = ClusterLabel::A;
    double sigma2_before = 0.0, sigma2_after = 0.0;
};

struct SimulateOptions {
    // Default: counterfactual embeddings are scored against the baseline
    // GMM (fixed reference frame). Audit mode refits the mixture per
    // counterfactual and records per-candidate evaluations in greedy runs.
    bool audit = false;
    ScoreOptions score;
    GmmOptions gmm;
};

// Everything computed once per matrix and shared by all counterfactuals.
struct Baseline {
    SpecializationMatrix matrix;
    ComplexityScores scores;
    JointEmbedding embedding;
    GmmModel gmm;
    CoClusterAssignment assignment;
};

Baseline make_baseline(const SpecializationMatrix& m, const SimulateOptions& options = {});

// Flips the counterfactual (eci, pci) jointly when its eci correlates
// negatively with the baseline's; a zero correlation falls back to the
// static sign rule and is flagged in the orientation record.
ComplexityScores align_orientation(ComplexityScores counterfactual,
                                   const ComplexityScores& baseline,
                                   const SpecializationMatrix& m);

// Evaluates every candidate absent edge independently against the shared
// baseline. Candidates must name existing codes and absent edges. A
// precomputed baseline may be passed to avoid refitting it.
std::vector<SimulationRecord> sweep_single_additions(
    const SpecializationMatrix& m,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const SimulateOptions& options = {}, const Baseline* baseline = nullptr);

struct GreedyStep {
    int iteration = 0;  // 1-based
    std::string product;
    int rank = 0;       // countries with strictly lower aligned eci
    double eci = 0.0;   // target's aligned raw eci after the commit
    std::vector<std::pair<std::string, double>> ranking;  // eci descending
};

struct CandidateEvaluation {
    std::string product;
    double target_eci = 0.0;
};

struct GreedyTrajectory {
    std::string target;
    double baseline_eci = 0.0;
    int baseline_rank = 0;
    std::vector<GreedyStep> steps;
    std::string termination;  // "saturated" | "no_improvement" | "max_iter"
    // Filled in audit mode: per-iteration candidate evaluations, so the
    // argmax choice can be re-derived.
    std::vector<std::vector<CandidateEvaluation>> evaluations;
};

// Iteratively commits the absent product maximizing the target's aligned
// raw ECI (ties to the lowest product code) until no candidate strictly
// improves it.
GreedyTrajectory greedy_maximize(const SpecializationMatrix& m, const std::string& target,
                                 int max_iter, const SimulateOptions& options = {});

}  // namespace ecoplex
