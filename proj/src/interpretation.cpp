#include "ecoplex/interpretation.hpp"

#include <cmath>

#include "ecoplex/errors.hpp"
#include "ecoplex/linalg.hpp"
#include "ecoplex/stats.hpp"

namespace ecoplex {

namespace {

constexpr Eigen::Index kDenseWalkGate = 5000;

Eigen::MatrixXd similarity_countries(const SpecializationMatrix& m) {
    const Eigen::MatrixXd md = m.dense();
    const Eigen::VectorXd u_inv = m.ubiquity.cast<double>().cwiseInverse();
    return md * u_inv.asDiagonal() * md.transpose();
}

Eigen::MatrixXd similarity_products(const SpecializationMatrix& m) {
    const Eigen::MatrixXd md = m.dense();
    const Eigen::VectorXd d_inv = m.diversity.cast<double>().cwiseInverse();
    return md.transpose() * d_inv.asDiagonal() * md;
}

double ncut_on_similarity(const Eigen::MatrixXd& similarity, const Eigen::VectorXd& volumes,
                          const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != similarity.rows()) {
        throw ContractViolation("ncut: label count does not match partitioned side");
    }
    double cut = 0.0, vol_a = 0.0, vol_b = 0.0;
    for (Eigen::Index i = 0; i < similarity.rows(); ++i) {
        (labels[static_cast<size_t>(i)] ? vol_b : vol_a) += volumes[i];
        for (Eigen::Index j = 0; j < similarity.cols(); ++j) {
            if (labels[static_cast<size_t>(i)] == 0 && labels[static_cast<size_t>(j)] == 1) {
                cut += similarity(i, j);
            }
        }
    }
    if (vol_a <= 0.0 || vol_b <= 0.0) {
        throw UndefinedPartitionError("ncut: a partition side is empty");
    }
    return cut / vol_a + cut / vol_b;
}

}  // namespace

BipartiteWalk build_walk(const SpecializationMatrix& m) {
    const Eigen::Index mm = m.country_count();
    const Eigen::Index nn = m.product_count();
    if (mm + nn > kDenseWalkGate) {
        throw SizeGuardError("build_walk: dense construction gated to m+n <= 5000");
    }
    const Eigen::MatrixXd md = m.dense();
    const Eigen::VectorXd d_inv = m.diversity.cast<double>().cwiseInverse();
    const Eigen::VectorXd u_inv = m.ubiquity.cast<double>().cwiseInverse();

    BipartiteWalk walk;
    walk.walk = Eigen::MatrixXd::Zero(mm + nn, mm + nn);
    walk.walk.topRightCorner(mm, nn) = d_inv.asDiagonal() * md;
    walk.walk.bottomLeftCorner(nn, mm) = u_inv.asDiagonal() * md.transpose();

    walk.s_c_rw = d_inv.asDiagonal() * similarity_countries(m);
    walk.s_p_rw = u_inv.asDiagonal() * similarity_products(m);

    walk.chi_rw = Eigen::MatrixXd::Zero(mm + nn, mm + nn);
    walk.chi_rw.topLeftCorner(mm, mm) = walk.s_c_rw;
    walk.chi_rw.bottomRightCorner(nn, nn) = walk.s_p_rw;
    return walk;
}

ComplementationCheck verify_stochastic_complementation(const SpecializationMatrix& m,
                                                       int probes) {
    const Eigen::Index mm = m.country_count();
    const Eigen::Index nn = m.product_count();
    ComplementationCheck check;

    if (mm + nn <= kDenseWalkGate) {
        const BipartiteWalk walk = build_walk(m);
        const Eigen::MatrixXd two_step = walk.walk * walk.walk;
        check.residual_country =
            (two_step.topLeftCorner(mm, mm) - walk.s_c_rw).cwiseAbs().maxCoeff();
        check.residual_product =
            (two_step.bottomRightCorner(nn, nn) - walk.s_p_rw).cwiseAbs().maxCoeff();
        return check;
    }

    // Column probes: W(W e_i) restricted to a block vs S^rw e_i, on a
    // deterministic sample of columns.
    check.sampled = true;
    const Eigen::VectorXd d_inv = m.diversity.cast<double>().cwiseInverse();
    const Eigen::VectorXd u_inv = m.ubiquity.cast<double>().cwiseInverse();
    const auto& e = m.entries;
    for (int s = 0; s < probes; ++s) {
        {
            const Eigen::Index col = (mm * static_cast<Eigen::Index>(s)) / probes;
            Eigen::VectorXd basis = Eigen::VectorXd::Zero(mm);
            basis[col] = 1.0;
            // S_c^rw e_col via sparse products
            const Eigen::VectorXd via_similarity =
                d_inv.asDiagonal() * (e * (u_inv.asDiagonal() * (e.transpose() * basis)));
            // (W^2) country block column: product step then country step
            const Eigen::VectorXd to_products = u_inv.asDiagonal() * (e.transpose() * basis);
            const Eigen::VectorXd back = d_inv.asDiagonal() * (e * to_products);
            check.residual_country = std::max(
                check.residual_country, (via_similarity - back).cwiseAbs().maxCoeff());
        }
        {
            const Eigen::Index col = (nn * static_cast<Eigen::Index>(s)) / probes;
            Eigen::VectorXd basis = Eigen::VectorXd::Zero(nn);
            basis[col] = 1.0;
            const Eigen::VectorXd via_similarity =
                u_inv.asDiagonal() * (e.transpose() * (d_inv.asDiagonal() * (e * basis)));
            const Eigen::VectorXd to_countries = d_inv.asDiagonal() * (e * basis);
            const Eigen::VectorXd back = u_inv.asDiagonal() * (e.transpose() * to_countries);
            check.residual_product = std::max(
                check.residual_product, (via_similarity - back).cwiseAbs().maxCoeff());
        }
    }
    return check;
}

double ncut_countries(const SpecializationMatrix& m, const std::vector<int>& labels) {
    return ncut_on_similarity(similarity_countries(m), m.diversity.cast<double>(), labels);
}

double ncut_products(const SpecializationMatrix& m, const std::vector<int>& labels) {
    return ncut_on_similarity(similarity_products(m), m.ubiquity.cast<double>(), labels);
}

double ncut_joint(const SpecializationMatrix& m, const std::vector<int>& labels) {
    const Eigen::Index mm = m.country_count();
    const Eigen::Index nn = m.product_count();
    if (static_cast<Eigen::Index>(labels.size()) != mm + nn) {
        throw ContractViolation("ncut_joint: need one label per country and product");
    }
    double cut = 0.0, vol_a = 0.0, vol_b = 0.0;
    for (Eigen::Index c = 0; c < mm; ++c) {
        (labels[static_cast<size_t>(c)] ? vol_b : vol_a) += m.diversity[c];
    }
    for (Eigen::Index p = 0; p < nn; ++p) {
        (labels[static_cast<size_t>(mm + p)] ? vol_b : vol_a) += m.ubiquity[p];
    }
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            if (labels[static_cast<size_t>(it.row())] !=
                labels[static_cast<size_t>(mm + it.col())]) {
                cut += 1.0;
            }
        }
    }
    if (vol_a <= 0.0 || vol_b <= 0.0) {
        throw UndefinedPartitionError("ncut_joint: a partition side is empty");
    }
    return cut / vol_a + cut / vol_b;
}

IncidencePair build_incidence(const SpecializationMatrix& m) {
    IncidencePair pair;
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            pair.edges.emplace_back(it.row(), it.col());
        }
    }
    const auto k = static_cast<Eigen::Index>(pair.edges.size());
    pair.country_incidence.resize(k, m.country_count());
    pair.product_incidence.resize(k, m.product_count());
    std::vector<Eigen::Triplet<double>> rt, ct;
    rt.reserve(pair.edges.size());
    ct.reserve(pair.edges.size());
    for (Eigen::Index e = 0; e < k; ++e) {
        rt.emplace_back(e, pair.edges[static_cast<size_t>(e)].first, 1.0);
        ct.emplace_back(e, pair.edges[static_cast<size_t>(e)].second, 1.0);
    }
    pair.country_incidence.setFromTriplets(rt.begin(), rt.end());
    pair.product_incidence.setFromTriplets(ct.begin(), ct.end());
    return pair;
}

double canonical_correlation_check(const SpecializationMatrix& m,
                                   const ComplexityScores& scores) {
    const auto k = m.edge_count();
    Eigen::VectorXd country_score(k), product_score(k);
    Eigen::Index e = 0;
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            country_score[e] = scores.eci_raw[it.row()];
            product_score[e] = scores.sigma2 * scores.pci_raw[it.col()];
            ++e;
        }
    }
    const double sd_c = stats::stddev(country_score);
    const double sd_p = stats::stddev(product_score);
    if (sd_c < 1e-14 || sd_p < 1e-14) {
        throw DegeneracyError(DegeneracyError::Kind::ZeroVariance,
                              "canonical_correlation_check: zero edge-score variance");
    }
    return stats::pearson(country_score, product_score);
}

AveragePciProfile average_pci_profile(const SpecializationMatrix& m,
                                      const ComplexityScores& scores) {
    AveragePciProfile profile;
    profile.country_mean_pci =
        (m.entries * scores.pci_raw).cwiseQuotient(m.diversity.cast<double>());
    profile.product_mean_eci =
        (m.entries.transpose() * scores.eci_raw).cwiseQuotient(m.ubiquity.cast<double>());
    return profile;
}

std::vector<IdentityCheck> verify_identities(const SpecializationMatrix& m,
                                             const ComplexityScores& scores) {
    std::vector<IdentityCheck> checks;
    auto add = [&checks](std::string name, double residual, double tolerance,
                         bool gating = true, bool pass_if_above = false) {
        IdentityCheck check;
        check.name = std::move(name);
        check.residual = residual;
        check.tolerance = tolerance;
        check.pass = pass_if_above ? residual > tolerance : residual <= tolerance;
        check.gating = gating;
        checks.push_back(std::move(check));
    };

    const NormalizedMatrix a = normalize_sym(m);
    const Eigen::VectorXd v1 = a.sqrt_ubi / a.sqrt_ubi.norm();
    const Eigen::VectorXd u1 = a.sqrt_div / a.sqrt_div.norm();
    add("sigma1_unit", (a.apply(v1) - u1).norm(), 1e-10);

    const Eigen::Index mm = m.country_count();
    const Eigen::Index nn = m.product_count();
    if (mm + nn <= kDenseWalkGate) {
        const BipartiteWalk walk = build_walk(m);
        add("walk_row_stochastic",
            (walk.walk.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
        add("chi_rw_row_stochastic",
            (walk.chi_rw.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
        const Eigen::MatrixXd two_step = walk.walk * walk.walk;
        add("stochastic_complementation_countries",
            (two_step.topLeftCorner(mm, mm) - walk.s_c_rw).cwiseAbs().maxCoeff(), 1e-12);
        add("stochastic_complementation_products",
            (two_step.bottomRightCorner(nn, nn) - walk.s_p_rw).cwiseAbs().maxCoeff(), 1e-12);
    } else {
        const ComplementationCheck probe = verify_stochastic_complementation(m);
        add("stochastic_complementation_countries_sampled", probe.residual_country, 1e-12);
        add("stochastic_complementation_products_sampled", probe.residual_product, 1e-12);
    }

    const Eigen::VectorXd d = m.diversity.cast<double>();
    const Eigen::VectorXd u = m.ubiquity.cast<double>();
    const double s2 = scores.sigma2 * scores.sigma2;

    add("eci_equals_mean_pci",
        ((m.entries * scores.pci_raw).cwiseQuotient(d) - scores.eci_raw)
            .cwiseAbs()
            .maxCoeff(),
        1e-10);
    add("mean_eci_equals_sigma2sq_pci",
        ((m.entries.transpose() * scores.eci_raw).cwiseQuotient(u) - s2 * scores.pci_raw)
            .cwiseAbs()
            .maxCoeff(),
        1e-10);
    add("eci_std_equals_mean_pci_std",
        ((m.entries * scores.pci_std).cwiseQuotient(d) - scores.eci_std)
            .cwiseAbs()
            .maxCoeff(),
        1e-10);
    add("std_reverse_identity_residual",
        ((m.entries.transpose() * scores.eci_std).cwiseQuotient(u) / s2 - scores.pci_std)
            .cwiseAbs()
            .maxCoeff(),
        1e-3, /*gating=*/false, /*pass_if_above=*/true);

    add("cca_correlation_equals_sigma2",
        std::abs(canonical_correlation_check(m, scores) - scores.sigma2), 1e-8);

    return checks;
}

bool all_gating_pass(const std::vector<IdentityCheck>& checks) {
    for (const auto& check : checks) {
        if (check.gating && !check.pass) return false;
    }
    return true;
}

}  // namespace ecoplex
