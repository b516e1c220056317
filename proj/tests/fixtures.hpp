#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ecoplex/matrix.hpp"
#include "ecoplex/synthetic.hpp"

namespace ecoplex::testing {

// Brute-force component labeling over the bipartite nodes, independent of
// prune()'s traversal: repeated relabel-to-minimum passes until stable.
inline std::vector<int> oracle_component_labels(const Eigen::MatrixXd& binary) {
    const Eigen::Index m = binary.rows();
    const Eigen::Index n = binary.cols();
    std::vector<int> label(static_cast<size_t>(m + n));
    for (size_t i = 0; i < label.size(); ++i) label[i] = static_cast<int>(i);
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index c = 0; c < m; ++c) {
            for (Eigen::Index p = 0; p < n; ++p) {
                if (binary(c, p) == 0.0) continue;
                const int low = std::min(label[static_cast<size_t>(c)],
                                         label[static_cast<size_t>(m + p)]);
                if (label[static_cast<size_t>(c)] != low ||
                    label[static_cast<size_t>(m + p)] != low) {
                    label[static_cast<size_t>(c)] = low;
                    label[static_cast<size_t>(m + p)] = low;
                    changed = true;
                }
            }
        }
    }
    return label;
}

inline double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace ecoplex::testing
