#include "ecoplex/complexity.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ecoplex/errors.hpp"
#include "ecoplex/stats.hpp"

namespace ecoplex {

namespace {

constexpr double kDisconnectedBand = 1e-9;   // sigma2 within this of 1
constexpr double kZeroSigma = 1e-12;

void check_degeneracy(double sigma2) {
    if (sigma2 >= 1.0 - kDisconnectedBand) {
        throw DegeneracyError(DegeneracyError::Kind::Disconnected,
                              "sigma2 = " + std::to_string(sigma2) +
                                  " is numerically 1: disconnected instance slipped through");
    }
    if (sigma2 < kZeroSigma) {
        throw DegeneracyError(DegeneracyError::Kind::ZeroVariance,
                              "sigma2 = " + std::to_string(sigma2) +
                                  " is numerically 0: rank-1 instance, scores have no variance");
    }
}

}  // namespace

ComplexityScores orient_sign(ComplexityScores scores, const SpecializationMatrix& m) {
    const Eigen::VectorXd d = m.diversity.cast<double>();
    const double corr = stats::pearson(scores.eci_raw, d);

    bool flip = false;
    OrientationRecord record;
    record.diversity_corr = corr;
    if (corr > 1e-12) {
        record.rule = "diversity-correlation";
    } else if (corr < -1e-12) {
        record.rule = "diversity-correlation";
        flip = true;
    } else {
        record.rule = "first-component";
        for (Eigen::Index i = 0; i < scores.eci_raw.size(); ++i) {
            if (scores.eci_raw[i] != 0.0) {
                flip = scores.eci_raw[i] < 0.0;
                break;
            }
        }
    }
    if (flip) {
        scores.eci_raw = -scores.eci_raw;
        scores.pci_raw = -scores.pci_raw;
        if (scores.eci_std.size() > 0) scores.eci_std = -scores.eci_std;
        if (scores.pci_std.size() > 0) scores.pci_std = -scores.pci_std;
    }
    record.flipped = flip;
    record.diversity_corr = flip ? -corr : corr;
    scores.orientation = record;
    return scores;
}

ComplexityScores standardize(ComplexityScores scores) {
    const double mean = stats::mean(scores.eci_raw);
    const double sd = stats::stddev(scores.eci_raw);
    if (sd < 1e-14) {
        throw DegeneracyError(DegeneracyError::Kind::ZeroVariance,
                              "standardize: eci_raw has zero variance");
    }
    scores.eci_std = (scores.eci_raw.array() - mean) / sd;
    scores.pci_std = (scores.pci_raw.array() - mean) / sd;  // ECI's moments, per definition
    return scores;
}

ComplexityScores eci_pci_svd(const SpecializationMatrix& m, const ScoreOptions& options) {
    const NormalizedMatrix a = normalize_sym(m);
    SvdOptions svd_options;
    svd_options.k = 2;
    svd_options.tol = options.tol;
    svd_options.max_iter = options.max_iter;
    svd_options.warm_start_left = options.warm_start;
    const SvdResult svd = truncated_svd(a, svd_options);

    const SpectralPair& second = svd.pairs[1];
    check_degeneracy(second.sigma);

    ComplexityScores scores;
    scores.sigma2 = second.sigma;
    scores.lambda2 = 1.0 - second.sigma * second.sigma;
    scores.eci_raw = second.left.cwiseQuotient(a.sqrt_div);
    scores.pci_raw = second.right.cwiseQuotient(a.sqrt_ubi) / second.sigma;
    scores.solver.route = "svd";
    scores.solver.iterations = svd.iterations.back();
    scores.solver.residual = svd.residual;
    scores.solver.warnings = svd.warnings;

    return standardize(orient_sign(std::move(scores), m));
}

ComplexityScores eci_pci_eigen(const SpecializationMatrix& m) {
    const NormalizedMatrix a = normalize_sym(m);
    const Eigen::MatrixXd ad = a.dense();
    const Eigen::Index rows = ad.rows();
    const Eigen::Index cols = ad.cols();
    if (rows < 2 || cols < 2) {
        throw ContractViolation("eci_pci_eigen: need at least 2 countries and 2 products");
    }

    // S_c^rw and S_p^rw conjugated to symmetric form: D^(1/2) S_c^rw D^(-1/2)
    // = M_sym M_sym^T and likewise on the product side.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_c(ad * ad.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_p(ad.transpose() * ad);
    if (es_c.info() != Eigen::Success || es_p.info() != Eigen::Success) {
        throw ConvergenceError("eci_pci_eigen: dense eigensolver failed", 0.0);
    }

    const double mu_c = es_c.eigenvalues()[rows - 2];  // ascending order
    const double mu_p = es_p.eigenvalues()[cols - 2];
    const double sigma2 = std::sqrt(std::max(mu_c, 0.0));
    check_degeneracy(sigma2);

    ComplexityScores scores;
    scores.sigma2 = sigma2;
    scores.lambda2 = 1.0 - mu_c;
    scores.eci_raw = es_c.eigenvectors().col(rows - 2).cwiseQuotient(a.sqrt_div);
    scores.pci_raw =
        es_p.eigenvectors().col(cols - 2).cwiseQuotient(a.sqrt_ubi) / sigma2;

    // The two eigenproblems fix signs independently; couple them through
    // eci = D^(-1) M pci.
    const Eigen::VectorXd averaged = m.entries * scores.pci_raw;
    const Eigen::VectorXd d_inv_avg = averaged.cwiseQuotient(m.diversity.cast<double>());
    if (scores.eci_raw.dot(d_inv_avg) < 0.0) scores.pci_raw = -scores.pci_raw;

    scores.solver.route = "eigen";
    scores.solver.residual = std::abs(mu_c - mu_p);

    return standardize(orient_sign(std::move(scores), m));
}

ReflectionsTrace method_of_reflections(const SpecializationMatrix& m, int n_iter,
                                       bool renormalize) {
    if (n_iter < 1) throw ContractViolation("method_of_reflections: n_iter must be >= 1");

    const Eigen::VectorXd d = m.diversity.cast<double>();
    const Eigen::VectorXd u = m.ubiquity.cast<double>();

    auto center_scale = [](Eigen::VectorXd v) {
        const double mean = stats::mean(v);
        const double sd = stats::stddev(v);
        v.array() -= mean;
        if (sd > 1e-15) v /= sd;
        return v;
    };

    ReflectionsTrace trace;
    trace.countries.push_back(d);
    trace.products.push_back(u);
    for (int it = 1; it <= n_iter; ++it) {
        const Eigen::VectorXd& kc_prev = trace.countries.back();
        const Eigen::VectorXd& kp_prev = trace.products.back();
        Eigen::VectorXd kc = (m.entries * kp_prev).cwiseQuotient(d);
        Eigen::VectorXd kp = (m.entries.transpose() * kc_prev).cwiseQuotient(u);
        if (renormalize) {
            kc = center_scale(std::move(kc));
            kp = center_scale(std::move(kp));
        }
        if (!kc.allFinite() || !kp.allFinite()) {
            throw ConvergenceError("method_of_reflections: non-finite iterate at iteration " +
                                       std::to_string(it),
                                   0.0);
        }
        trace.countries.push_back(std::move(kc));
        trace.products.push_back(std::move(kp));
    }
    return trace;
}

}  // namespace ecoplex
