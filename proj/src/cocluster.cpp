#include "ecoplex/cocluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecoplex/errors.hpp"

namespace ecoplex {

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr double kLogTwoPi = 1.8378770664093454836;

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double rand01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * (1.0 / 9007199254740992.0);
}

struct EmOutcome {
    GmmModel model;
    double final_loglik = -std::numeric_limits<double>::infinity();
};

EmOutcome run_em(const Eigen::VectorXd& x, std::array<double, 2> weight,
                 std::array<double, 2> mean, std::array<double, 2> variance,
                 const GmmOptions& options) {
    const Eigen::Index n = x.size();
    GmmModel model;
    model.weight = weight;
    model.mean = mean;
    model.variance = {std::max(variance[0], kVarianceFloor),
                      std::max(variance[1], kVarianceFloor)};

    Eigen::VectorXd resp_b(n);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options.max_iter; ++it) {
        model.iterations = it;

        // E step
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double la = std::log(model.weight[0]) + model.log_density(x[i], 0);
            const double lb = std::log(model.weight[1]) + model.log_density(x[i], 1);
            const double hi = std::max(la, lb);
            const double lse = hi + std::log1p(std::exp(std::min(la, lb) - hi));
            ll += lse;
            resp_b[i] = std::exp(lb - lse);
        }
        model.loglik.push_back(ll);

        if (it > 1 && std::abs(ll - prev_ll) < options.tol) {
            model.converged = true;
            break;
        }
        prev_ll = ll;

        // M step
        const double nb = resp_b.sum();
        const double na = static_cast<double>(n) - nb;
        const std::array<double, 2> counts{na, nb};
        for (int k = 0; k < 2; ++k) {
            if (counts[k] < 1e-10) {
                throw DegenerateFitError(k, "fit_gmm_1d: component " + std::to_string(k) +
                                                " lost all responsibility mass");
            }
            double sum = 0.0, sq = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r = k == 1 ? resp_b[i] : 1.0 - resp_b[i];
                sum += r * x[i];
            }
            const double mu = sum / counts[k];
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r = k == 1 ? resp_b[i] : 1.0 - resp_b[i];
                sq += r * (x[i] - mu) * (x[i] - mu);
            }
            const double raw_var = sq / counts[k];
            if (raw_var < kVarianceFloor && counts[k] < 2.0) {
                // Singular collapse: one effective point, likelihood unbounded.
                throw DegenerateFitError(
                    k, "fit_gmm_1d: variance of component " + std::to_string(k) +
                           " collapsed below 1e-12 on <2 effective points");
            }
            model.weight[k] = counts[k] / static_cast<double>(n);
            model.mean[k] = mu;
            model.variance[k] = std::max(raw_var, kVarianceFloor);
        }
    }

    EmOutcome out;
    out.final_loglik = model.loglik.empty() ? -std::numeric_limits<double>::infinity()
                                            : model.loglik.back();
    out.model = std::move(model);
    return out;
}

}  // namespace

double GmmModel::log_density(double x, int component) const {
    const double var = variance[static_cast<size_t>(component)];
    const double diff = x - mean[static_cast<size_t>(component)];
    return -0.5 * (kLogTwoPi + std::log(var) + diff * diff / var);
}

double GmmModel::responsibility(double x, int component) const {
    const double la = std::log(weight[0]) + log_density(x, 0);
    const double lb = std::log(weight[1]) + log_density(x, 1);
    const double hi = std::max(la, lb);
    const double lse = hi + std::log1p(std::exp(std::min(la, lb) - hi));
    return std::exp((component == 0 ? la : lb) - lse);
}

JointEmbedding embed(const SpecializationMatrix& m, const ComplexityScores& scores) {
    if (scores.eci_raw.size() != m.country_count() ||
        scores.pci_raw.size() != m.product_count()) {
        throw ContractViolation("embed: score dimensions do not match the matrix");
    }
    JointEmbedding z;
    z.num_countries = m.country_count();
    z.num_products = m.product_count();
    z.values.resize(z.num_countries + z.num_products);
    z.values.head(z.num_countries) = scores.eci_raw;
    z.values.tail(z.num_products) = scores.sigma2 * scores.pci_raw;
    z.kinds.reserve(static_cast<size_t>(z.size()));
    z.codes.reserve(static_cast<size_t>(z.size()));
    for (const auto& c : m.countries) {
        z.kinds.push_back(EntityKind::Country);
        z.codes.push_back(c);
    }
    for (const auto& p : m.products) {
        z.kinds.push_back(EntityKind::Product);
        z.codes.push_back(p);
    }
    return z;
}

GmmModel fit_gmm_1d(const Eigen::VectorXd& x, const GmmOptions& options) {
    const Eigen::Index n = x.size();
    if (n < 4) throw ContractViolation("fit_gmm_1d: need at least 4 observations");
    if (!(options.tol > 0.0)) throw ContractViolation("fit_gmm_1d: tol must be positive");

    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end());
    auto half_stats = [&sorted](size_t lo, size_t hi, double* mean, double* var) {
        double sum = 0.0;
        for (size_t i = lo; i < hi; ++i) sum += sorted[i];
        *mean = sum / static_cast<double>(hi - lo);
        double sq = 0.0;
        for (size_t i = lo; i < hi; ++i) sq += (sorted[i] - *mean) * (sorted[i] - *mean);
        *var = sq / static_cast<double>(hi - lo);
    };

    // Percentile-split init: lower/upper halves of the sorted sample.
    const size_t mid = sorted.size() / 2;
    std::array<double, 2> mean{}, variance{};
    half_stats(0, mid, &mean[0], &variance[0]);
    half_stats(mid, sorted.size(), &mean[1], &variance[1]);

    EmOutcome best = run_em(x, {0.5, 0.5}, mean, variance, options);

    std::uint64_t state = options.seed * 0x9E3779B97F4A7C15ULL + 1;
    for (int r = 1; r < options.restarts; ++r) {
        const double q0 = rand01(state);
        const double q1 = rand01(state);
        const auto lo = static_cast<size_t>(q0 * 0.5 * static_cast<double>(n - 1));
        const auto hi =
            static_cast<size_t>((0.5 + q1 * 0.5) * static_cast<double>(n - 1));
        std::array<double, 2> rm{sorted[lo], sorted[hi]};
        const double pooled = std::max(
            kVarianceFloor,
            (rm[1] - rm[0]) * (rm[1] - rm[0]) / 4.0 + kVarianceFloor);
        EmOutcome trial = run_em(x, {0.5, 0.5}, rm, {pooled, pooled}, options);
        if (trial.final_loglik > best.final_loglik) best = std::move(trial);
    }
    return best.model;
}

GmmModel fit_gmm_1d(const JointEmbedding& embedding, const GmmOptions& options) {
    return fit_gmm_1d(embedding.values, options);
}

CoClusterAssignment assign(const GmmModel& model, const JointEmbedding& embedding,
                           const ComplexityScores& scores) {
    if (embedding.num_countries != scores.eci_raw.size()) {
        throw ContractViolation("assign: embedding and scores disagree on country count");
    }
    CoClusterAssignment out;
    out.codes = embedding.codes;
    out.kinds = embedding.kinds;
    out.num_countries = embedding.num_countries;
    out.num_products = embedding.num_products;

    // Co-cluster B sits on the high side of the oriented axis.
    out.b_component = model.mean[1] >= model.mean[0] ? 1 : 0;

    const Eigen::Index n = embedding.size();
    out.prob_b.resize(n);
    out.labels.resize(static_cast<size_t>(n));
    std::array<double, 2> mass{0.0, 0.0};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double pb = model.responsibility(embedding.values[i], out.b_component);
        out.prob_b[i] = pb;
        mass[1] += pb;
        mass[0] += 1.0 - pb;
        if (pb == 0.5) {
            out.boundary_ties.push_back(i);
            out.labels[static_cast<size_t>(i)] = ClusterLabel::A;
        } else {
            out.labels[static_cast<size_t>(i)] =
                pb > 0.5 ? ClusterLabel::B : ClusterLabel::A;
        }
    }

    const auto count_b = static_cast<Eigen::Index>(
        std::count(out.labels.begin(), out.labels.end(), ClusterLabel::B));
    out.empty_cluster = count_b == 0 || count_b == n;
    const double near_empty_mass = std::max(1.0, 0.05 * static_cast<double>(n));
    out.near_empty_component = std::min(mass[0], mass[1]) < near_empty_mass;
    return out;
}

CoClusterAssignment kmeans_baseline(const JointEmbedding& embedding, std::uint64_t) {
    const Eigen::Index n = embedding.size();
    if (n < 2) throw ContractViolation("kmeans_baseline: need at least 2 observations");

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&embedding](Eigen::Index a, Eigen::Index b) {
        return embedding.values[a] < embedding.values[b];
    });

    std::vector<double> prefix(static_cast<size_t>(n) + 1, 0.0);
    std::vector<double> prefix_sq(static_cast<size_t>(n) + 1, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = embedding.values[order[static_cast<size_t>(i)]];
        prefix[static_cast<size_t>(i) + 1] = prefix[static_cast<size_t>(i)] + v;
        prefix_sq[static_cast<size_t>(i) + 1] = prefix_sq[static_cast<size_t>(i)] + v * v;
    }
    auto sse = [&](size_t lo, size_t hi) {  // half-open over sorted order
        const double cnt = static_cast<double>(hi - lo);
        const double sum = prefix[hi] - prefix[lo];
        const double sq = prefix_sq[hi] - prefix_sq[lo];
        return sq - sum * sum / cnt;
    };

    // Split after index s (left = [0, s]); ties keep the larger left side,
    // so a boundary point lands in the low cluster.
    size_t best_split = 0;
    double best_sse = sse(0, 1) + sse(1, static_cast<size_t>(n));
    for (size_t s = 1; s + 1 < static_cast<size_t>(n); ++s) {
        const double total = sse(0, s + 1) + sse(s + 1, static_cast<size_t>(n));
        const double slack = 1e-12 * (1.0 + std::abs(best_sse));
        if (total < best_sse - slack) {
            best_sse = total;
            best_split = s;
        } else if (total <= best_sse + slack) {
            best_split = s;
            best_sse = std::min(best_sse, total);
        }
    }

    CoClusterAssignment out;
    out.codes = embedding.codes;
    out.kinds = embedding.kinds;
    out.num_countries = embedding.num_countries;
    out.num_products = embedding.num_products;
    out.prob_b = Eigen::VectorXd::Zero(n);
    out.labels.assign(static_cast<size_t>(n), ClusterLabel::A);
    for (size_t i = best_split + 1; i < static_cast<size_t>(n); ++i) {
        out.prob_b[order[i]] = 1.0;
        out.labels[static_cast<size_t>(order[i])] = ClusterLabel::B;
    }
    out.empty_cluster = false;  // both sides nonempty by construction
    return out;
}

JointMembership joint_membership(const CoClusterAssignment& assignment) {
    const Eigen::VectorXd pc = assignment.country_prob_b();
    const Eigen::VectorXd pp = assignment.product_prob_b();
    JointMembership joint;
    joint.prob_both_b = pc * pp.transpose();
    joint.same_cluster =
        joint.prob_both_b +
        (Eigen::VectorXd::Ones(pc.size()) - pc) * (Eigen::VectorXd::Ones(pp.size()) - pp).transpose();
    return joint;
}

}  // namespace ecoplex
