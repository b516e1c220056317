#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>
#include <utility>
#include <vector>

namespace ecoplex {

// Binary country x product specialization matrix with row (diversity) and
// column (ubiquity) counts. Codes are strictly increasing; after prune()
// every count is positive and the bipartite graph is connected.
struct SpecializationMatrix {
    std::vector<std::string> countries;
    std::vector<std::string> products;
    Eigen::SparseMatrix<double, Eigen::RowMajor> entries;
    Eigen::VectorXi diversity;
    Eigen::VectorXi ubiquity;

    Eigen::Index country_count() const { return entries.rows(); }
    Eigen::Index product_count() const { return entries.cols(); }
    Eigen::Index edge_count() const { return entries.nonZeros(); }

    bool has_edge(Eigen::Index c, Eigen::Index p) const;
    Eigen::Index country_index(const std::string& code) const;  // -1 if absent
    Eigen::Index product_index(const std::string& code) const;

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(entries); }

    // Copy with one extra 1-entry; counts updated. The edge must be absent.
    SpecializationMatrix with_added_edge(Eigen::Index c, Eigen::Index p) const;

    static SpecializationMatrix from_dense(const Eigen::MatrixXd& binary,
                                           std::vector<std::string> countries,
                                           std::vector<std::string> products);
    static SpecializationMatrix from_edges(
        const std::vector<std::pair<int, int>>& edges,
        std::vector<std::string> countries, std::vector<std::string> products);
};

enum class PrunePolicy { Strict, LargestComponent };

struct PruneReport {
    std::vector<std::string> dropped_countries;
    std::vector<std::string> dropped_products;
    // (countries, products) per connected component of the zero-trimmed
    // matrix, largest first.
    std::vector<std::pair<int, int>> component_sizes;

    bool empty() const {
        return dropped_countries.empty() && dropped_products.empty() &&
               component_sizes.size() <= 1;
    }
};

struct PruneResult {
    SpecializationMatrix matrix;
    PruneReport report;
};

// Removes zero rows/columns to a fixed point, then resolves connectivity:
// Strict throws on a disconnected graph, LargestComponent keeps the biggest
// component (node-count ties broken toward the lowest country code).
// Throws PruneError when nothing usable remains.
PruneResult prune(const SpecializationMatrix& m,
                  PrunePolicy policy = PrunePolicy::LargestComponent);

// BFS over the bipartite graph reaches all m+n nodes.
bool is_connected(const SpecializationMatrix& m);

}  // namespace ecoplex
