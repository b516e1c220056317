#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ecoplex/complexity.hpp"
#include "ecoplex/matrix.hpp"

namespace ecoplex {

enum class EntityKind { Country, Product };
enum class ClusterLabel { A, B };

inline const char* to_string(EntityKind kind) {
    return kind == EntityKind::Country ? "country" : "product";
}
inline const char* to_string(ClusterLabel label) { return label == ClusterLabel::A ? "A" : "B"; }

// z2 = [D^(-1/2) u2, U^(-1/2) v2]: the country block is eci_raw and the
// product block is sigma2 * pci_raw.
struct JointEmbedding {
    Eigen::VectorXd values;  // countries first, then products
    std::vector<EntityKind> kinds;
    std::vector<std::string> codes;
    Eigen::Index num_countries = 0;
    Eigen::Index num_products = 0;

    Eigen::Index size() const { return values.size(); }
    auto country_block() const { return values.head(num_countries); }
    auto product_block() const { return values.tail(num_products); }
};

JointEmbedding embed(const SpecializationMatrix& m, const ComplexityScores& scores);

// Two-component univariate Gaussian mixture fitted by EM.
struct GmmModel {
    std::array<double, 2> weight{0.5, 0.5};
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 2> variance{1.0, 1.0};
    std::vector<double> loglik;  // one entry per EM iteration, non-decreasing
    bool converged = false;
    int iterations = 0;

    double log_density(double x, int component) const;
    // Posterior P(component | x); the two responsibilities sum to 1.
    double responsibility(double x, int component) const;
};

struct GmmOptions {
    std::uint64_t seed = 1;
    double tol = 1e-8;  // on log-likelihood change
    int max_iter = 500;
    int restarts = 1;  // 1 = deterministic percentile init only
};

// Deterministic initialization: the sorted lower/upper halves seed the two
// components (means land near the 25th/75th percentiles). Additional
// restarts draw quantile pairs from the seed. Component variances are
// floored at 1e-12; a component collapsing onto fewer than two effective
// points throws DegenerateFitError.
GmmModel fit_gmm_1d(const JointEmbedding& embedding, const GmmOptions& options = {});
GmmModel fit_gmm_1d(const Eigen::VectorXd& values, const GmmOptions& options = {});

struct CoClusterAssignment {
    std::vector<std::string> codes;
    std::vector<EntityKind> kinds;
    Eigen::VectorXd prob_b;
    std::vector<ClusterLabel> labels;  // B iff prob_b > 0.5
    Eigen::Index num_countries = 0;
    Eigen::Index num_products = 0;

    int b_component = 1;  // GMM component aligned to co-cluster B
    std::vector<Eigen::Index> boundary_ties;  // prob exactly 0.5, assigned A
    bool empty_cluster = false;               // some label unused
    bool near_empty_component = false;        // a component holds almost no mass

    Eigen::VectorXd country_prob_b() const { return prob_b.head(num_countries); }
    Eigen::VectorXd product_prob_b() const { return prob_b.tail(num_products); }
};

// Soft assignment: B is the component with the higher mean (the high-ECI
// side under the orientation rule), labels threshold prob_b at 0.5 with
// exact ties going to A.
CoClusterAssignment assign(const GmmModel& model, const JointEmbedding& embedding,
                           const ComplexityScores& scores);

// Exact 1-D 2-means via the sorted-split scan minimizing within-cluster
// SSE; SSE ties keep the later split (the boundary point stays with the
// low cluster A). prob_b is hard {0,1}. The seed is accepted for interface
// parity and unused.
CoClusterAssignment kmeans_baseline(const JointEmbedding& embedding, std::uint64_t seed = 0);

struct JointMembership {
    Eigen::MatrixXd prob_both_b;   // P(c in B) P(p in B)
    Eigen::MatrixXd same_cluster;  // P(c in B)P(p in B) + P(c in A)P(p in A)
};

// Joint probabilities under the hypothesis of independence.
JointMembership joint_membership(const CoClusterAssignment& assignment);

}  // namespace ecoplex
