#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "ecoplex/linalg.hpp"
#include "ecoplex/matrix.hpp"

namespace ecoplex {

struct OrientationRecord {
    bool flipped = false;
    std::string rule;  // "diversity-correlation" | "first-component" | baseline rules
    double diversity_corr = 0.0;
};

struct SolverInfo {
    std::string route;
    int iterations = 0;
    double residual = 0.0;
    std::vector<std::string> warnings;
};

// Raw scores are the singular-vector coordinates
//   eci_raw = D^(-1/2) u2,   pci_raw = sigma2^(-1) U^(-1/2) v2,
// and standardized scores divide both by the ECI mean/sd. They satisfy
//   eci_raw = D^(-1) M pci_raw,
//   U^(-1) M^T eci_raw = sigma2^2 pci_raw,
//   eci_std = D^(-1) M pci_std,
// while the standardized reverse identity is genuinely broken.
struct ComplexityScores {
    Eigen::VectorXd eci_raw;
    Eigen::VectorXd pci_raw;
    Eigen::VectorXd eci_std;
    Eigen::VectorXd pci_std;
    double sigma2 = 0.0;
    double lambda2 = 0.0;
    OrientationRecord orientation;
    SolverInfo solver;
};

// Scoring converges tighter than the bare solver default so the averaging
// identities downstream hold at 1e-10.
struct ScoreOptions {
    double tol = 1e-12;
    int max_iter = 10000;
    std::optional<Eigen::VectorXd> warm_start;  // left singular vector guess
};

// SVD co-clustering route on the truncated sparse solver.
// Throws DegeneracyError when sigma2 is numerically 1 (disconnected
// instance slipped through) or numerically 0 (rank-1 instance, zero
// variance); convergence failures propagate.
ComplexityScores eci_pci_svd(const SpecializationMatrix& m, const ScoreOptions& options = {});

// Random-walk eigen-decomposition route: dense symmetric eigen-solves of
// the conjugated S_c^rw and S_p^rw, rescaled back and coupled in sign
// through the averaging identity. Equivalent to the SVD route.
ComplexityScores eci_pci_eigen(const SpecializationMatrix& m);

// Joint sign rule: flip (eci, pci) so corr(eci_raw, diversity) >= 0; on a
// zero correlation the first nonzero eci component is made positive.
// Idempotent.
ComplexityScores orient_sign(ComplexityScores scores, const SpecializationMatrix& m);

// Population-sd standardization; PCI standardized with ECI's moments.
// Throws DegeneracyError on zero eci variance.
ComplexityScores standardize(ComplexityScores scores);

// Method of Reflections iterates. Index N holds k_{c,N} / k_{p,N};
// iteration 0 is exactly (diversity, ubiquity). With renormalize each
// computed iterate is centered and scaled to unit sd before it feeds the
// next step (rank-preserving guard against collapse to the constant
// vector).
struct ReflectionsTrace {
    std::vector<Eigen::VectorXd> countries;
    std::vector<Eigen::VectorXd> products;
};

ReflectionsTrace method_of_reflections(const SpecializationMatrix& m, int n_iter,
                                       bool renormalize);

}  // namespace ecoplex
