#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecoplex/matrix.hpp"

namespace ecoplex {

// M_sym = D^(-1/2) M U^(-1/2), kept sparse. Row-compressed storage drives
// A*v; a column-compressed mirror drives A^T*u.
struct NormalizedMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> csr;
    Eigen::SparseMatrix<double> csc;
    Eigen::VectorXd sqrt_div;  // D^(1/2) diagonal
    Eigen::VectorXd sqrt_ubi;  // U^(1/2) diagonal

    Eigen::Index rows() const { return csr.rows(); }
    Eigen::Index cols() const { return csr.cols(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return csr * v; }
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd& u) const {
        return csc.transpose() * u;
    }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(csr); }
};

// Throws ContractViolation if any diversity/ubiquity count is zero (the
// instance must be pruned first).
NormalizedMatrix normalize_sym(const SpecializationMatrix& m);

// One singular triple. Signs are ambiguous at this layer; orientation is a
// scoring concern.
struct SpectralPair {
    Eigen::VectorXd left;
    Eigen::VectorXd right;
    double sigma = 0.0;

    double lambda() const { return 1.0 - sigma * sigma; }
};

struct SvdOptions {
    int k = 2;
    double tol = 1e-10;       // on the residual ||A v - sigma u||
    int max_iter = 10000;
    std::optional<Eigen::VectorXd> warm_start_left;  // initial guess for pair 2
};

struct SvdResult {
    std::vector<SpectralPair> pairs;  // sigma descending
    std::vector<int> iterations;      // per pair (0 for the analytic pair)
    double residual = 0.0;            // worst converged residual
    std::vector<std::string> warnings;
};

// Top-k singular triples of M_sym by orthogonal power iteration on
// M_sym M_sym^T applied implicitly (two sparse mat-vecs per step). The
// leading pair is analytic on any zero-free instance
// (u1 ~ D^(1/2) 1, v1 ~ U^(1/2) 1, sigma1 = 1 when connected) and seeds
// the deflation. Throws ConvergenceError past max_iter.
SvdResult truncated_svd(const NormalizedMatrix& a, const SvdOptions& options = {});

// Full SVD of a small dense matrix; the independent oracle for the
// truncated path. Refuses min(m,n) > 512.
SvdResult dense_oracle_svd(const Eigen::MatrixXd& a);

// Deterministic pseudo-random unit-ish vector (splitmix64-based), used for
// reproducible solver starts.
Eigen::VectorXd deterministic_start(Eigen::Index size, std::uint64_t salt);

}  // namespace ecoplex
