#include "ecoplex/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "ecoplex/errors.hpp"

namespace ecoplex {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Subtract the projections onto previously found left vectors; two passes
// keep orthogonality at working precision.
void deflate(Eigen::VectorXd& z, const std::vector<SpectralPair>& pairs, size_t upto) {
    for (int pass = 0; pass < 2; ++pass) {
        for (size_t j = 0; j < upto; ++j) {
            z -= pairs[j].left.dot(z) * pairs[j].left;
        }
    }
}

}  // namespace

Eigen::VectorXd deterministic_start(Eigen::Index size, std::uint64_t salt) {
    Eigen::VectorXd v(size);
    std::uint64_t state = salt * 0x2545F4914F6CDD1DULL + 0x123456789ABCDEFULL;
    for (Eigen::Index i = 0; i < size; ++i) {
        v[i] = static_cast<double>(splitmix64(state) >> 11) *
                   (1.0 / 9007199254740992.0) -
               0.5;
    }
    return v;
}

NormalizedMatrix normalize_sym(const SpecializationMatrix& m) {
    for (Eigen::Index c = 0; c < m.country_count(); ++c) {
        if (m.diversity[c] <= 0) {
            throw ContractViolation("normalize_sym: zero diversity for country '" +
                                    m.countries[static_cast<size_t>(c)] +
                                    "' (instance must be pruned)");
        }
    }
    for (Eigen::Index p = 0; p < m.product_count(); ++p) {
        if (m.ubiquity[p] <= 0) {
            throw ContractViolation("normalize_sym: zero ubiquity for product '" +
                                    m.products[static_cast<size_t>(p)] +
                                    "' (instance must be pruned)");
        }
    }

    NormalizedMatrix out;
    out.sqrt_div = m.diversity.cast<double>().cwiseSqrt();
    out.sqrt_ubi = m.ubiquity.cast<double>().cwiseSqrt();
    out.csr = m.entries;
    for (Eigen::Index r = 0; r < out.csr.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(out.csr, r); it;
             ++it) {
            it.valueRef() = 1.0 / (out.sqrt_div[it.row()] * out.sqrt_ubi[it.col()]);
        }
    }
    out.csc = out.csr;
    return out;
}

SvdResult truncated_svd(const NormalizedMatrix& a, const SvdOptions& options) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    const Eigen::Index rank_cap = std::min(m, n);
    if (options.k < 1 || options.k > rank_cap) {
        throw ContractViolation("truncated_svd: k must be in [1, min(m,n)]");
    }
    if (!(options.tol > 0.0)) throw ContractViolation("truncated_svd: tol must be positive");

    SvdResult result;

    // Analytic leading pair: A (U^(1/2) 1) = D^(1/2) 1, both of squared
    // norm sum(d) = sum(u) = #edges, hence sigma1 = 1 on a connected
    // instance.
    SpectralPair lead;
    lead.left = a.sqrt_div / a.sqrt_div.norm();
    lead.right = a.sqrt_ubi / a.sqrt_ubi.norm();
    lead.sigma = lead.left.dot(a.apply(lead.right));
    result.pairs.push_back(std::move(lead));
    result.iterations.push_back(0);

    // Singular values of M_sym live in [0, 1] with sigma1 = 1, so anything
    // below this floor is a numerical zero. Normalizing the noise left by
    // deflation would resurrect the deflated directions instead.
    constexpr double kSigmaFloor = 1e-14;

    // One deflated power step on A A^T: u -> deflate(A A^T u)/|.|.
    // Returns the candidate triple built from the current u.
    auto power_solve = [&](Eigen::VectorXd u, size_t n_deflate, int max_iter, double tol,
                           int* used, double* last_residual) -> SpectralPair {
        deflate(u, result.pairs, n_deflate);
        double norm = u.norm();
        if (norm < 1e-12) {
            u = deterministic_start(m, 0xD1CEu + n_deflate);
            deflate(u, result.pairs, n_deflate);
            norm = u.norm();
        }
        u /= norm;

        auto zero_sigma_pair = [&](Eigen::VectorXd left) {
            SpectralPair pair;
            pair.left = std::move(left);
            pair.sigma = 0.0;
            pair.right = deterministic_start(n, 0xF00Du + n_deflate);
            for (int pass = 0; pass < 2; ++pass) {
                for (size_t j = 0; j < n_deflate; ++j) {
                    pair.right -=
                        result.pairs[j].right.dot(pair.right) * result.pairs[j].right;
                }
            }
            pair.right.normalize();
            return pair;
        };

        SpectralPair pair;
        double residual = std::numeric_limits<double>::infinity();
        int it = 0;
        for (it = 1; it <= max_iter; ++it) {
            Eigen::VectorXd w = a.apply_transpose(u);
            const double sigma = w.norm();
            if (sigma < kSigmaFloor) {
                // Deflated operator annihilates u: a zero singular value.
                pair = zero_sigma_pair(std::move(u));
                residual = a.apply(pair.right).norm();
                break;
            }
            Eigen::VectorXd v = w / sigma;
            Eigen::VectorXd t = a.apply(v);
            residual = (t - sigma * u).norm();
            if (residual < tol) {
                pair.left = u;
                pair.right = std::move(v);
                pair.sigma = sigma;
                break;
            }
            deflate(t, result.pairs, n_deflate);
            const double tn = t.norm();
            if (tn < kSigmaFloor * kSigmaFloor) {
                // The power step collapsed into the deflated subspace.
                pair = zero_sigma_pair(std::move(u));
                residual = a.apply(pair.right).norm();
                break;
            }
            u = t / tn;
        }
        *used = std::min(it, max_iter);
        *last_residual = residual;
        if (pair.left.size() == 0) {
            pair.left = u;  // not converged; report best iterate
            Eigen::VectorXd w = a.apply_transpose(u);
            pair.sigma = w.norm();
            pair.right = pair.sigma > 0 ? Eigen::VectorXd(w / pair.sigma)
                                        : deterministic_start(n, 1);
        }
        return pair;
    };

    for (int i = 2; i <= options.k; ++i) {
        Eigen::VectorXd start;
        if (i == 2 && options.warm_start_left && options.warm_start_left->size() == m) {
            start = *options.warm_start_left;
        } else {
            start = deterministic_start(m, static_cast<std::uint64_t>(i));
        }
        int used = 0;
        double residual = 0.0;
        SpectralPair pair = power_solve(std::move(start), static_cast<size_t>(i - 1),
                                        options.max_iter, options.tol, &used, &residual);
        if (residual >= options.tol && pair.sigma > 0.0) {
            throw ConvergenceError("truncated_svd: pair " + std::to_string(i) +
                                       " did not converge within " +
                                       std::to_string(options.max_iter) +
                                       " iterations (residual " + std::to_string(residual) +
                                       ")",
                                   residual);
        }
        result.residual = std::max(result.residual, residual);
        result.pairs.push_back(std::move(pair));
        result.iterations.push_back(used);
    }

    // Short probe for sigma_{k+1}: flags a vanishing spectral gap after the
    // last requested pair.
    if (options.k < rank_cap) {
        int used = 0;
        double residual = 0.0;
        SpectralPair probe =
            power_solve(deterministic_start(m, 0xBEEF), static_cast<size_t>(options.k), 200,
                        1e-6, &used, &residual);
        const double gap = result.pairs.back().sigma - probe.sigma;
        if (gap < 1e-12) {
            result.warnings.push_back("spectral-gap stagnation: sigma_" +
                                      std::to_string(options.k) + " - sigma_" +
                                      std::to_string(options.k + 1) + " = " +
                                      std::to_string(gap));
        }
    }
    return result;
}

SvdResult dense_oracle_svd(const Eigen::MatrixXd& a) {
    if (std::min(a.rows(), a.cols()) > 512) {
        throw SizeGuardError("dense_oracle_svd: refusing min(m,n) > 512");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult result;
    const Eigen::Index r = svd.singularValues().size();
    for (Eigen::Index i = 0; i < r; ++i) {
        SpectralPair pair;
        pair.left = svd.matrixU().col(i);
        pair.right = svd.matrixV().col(i);
        pair.sigma = svd.singularValues()[i];
        result.pairs.push_back(std::move(pair));
        result.iterations.push_back(0);
    }
    return result;
}

}  // namespace ecoplex
