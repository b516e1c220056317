#include "ecoplex/matrix.hpp"

#include <algorithm>
#include <queue>

#include "ecoplex/errors.hpp"

namespace ecoplex {

namespace {

void check_codes(const std::vector<std::string>& codes, const char* what) {
    for (size_t i = 1; i < codes.size(); ++i) {
        if (codes[i] <= codes[i - 1]) {
            throw FormatError(std::string(what) +
                              " codes must be strictly increasing, got '" + codes[i - 1] +
                              "' before '" + codes[i] + "'");
        }
    }
}

Eigen::Index find_code(const std::vector<std::string>& codes, const std::string& code) {
    auto it = std::lower_bound(codes.begin(), codes.end(), code);
    if (it == codes.end() || *it != code) return -1;
    return static_cast<Eigen::Index>(it - codes.begin());
}

void recount(SpecializationMatrix& m) {
    m.diversity = Eigen::VectorXi::Zero(m.entries.rows());
    m.ubiquity = Eigen::VectorXi::Zero(m.entries.cols());
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            m.diversity[it.row()] += 1;
            m.ubiquity[it.col()] += 1;
        }
    }
}

}  // namespace

bool SpecializationMatrix::has_edge(Eigen::Index c, Eigen::Index p) const {
    return entries.coeff(c, p) != 0.0;
}

Eigen::Index SpecializationMatrix::country_index(const std::string& code) const {
    return find_code(countries, code);
}

Eigen::Index SpecializationMatrix::product_index(const std::string& code) const {
    return find_code(products, code);
}

SpecializationMatrix SpecializationMatrix::with_added_edge(Eigen::Index c,
                                                           Eigen::Index p) const {
    if (has_edge(c, p)) {
        throw ContractViolation("edge (" + countries[static_cast<size_t>(c)] + ", " +
                                products[static_cast<size_t>(p)] + ") already present");
    }
    SpecializationMatrix out = *this;
    out.entries.coeffRef(c, p) = 1.0;
    out.entries.makeCompressed();
    out.diversity[c] += 1;
    out.ubiquity[p] += 1;
    return out;
}

SpecializationMatrix SpecializationMatrix::from_dense(const Eigen::MatrixXd& binary,
                                                      std::vector<std::string> countries,
                                                      std::vector<std::string> products) {
    if (binary.rows() != static_cast<Eigen::Index>(countries.size()) ||
        binary.cols() != static_cast<Eigen::Index>(products.size())) {
        throw ContractViolation("code list sizes do not match matrix dimensions");
    }
    check_codes(countries, "country");
    check_codes(products, "product");

    SpecializationMatrix m;
    m.countries = std::move(countries);
    m.products = std::move(products);
    m.entries.resize(binary.rows(), binary.cols());
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index r = 0; r < binary.rows(); ++r) {
        for (Eigen::Index c = 0; c < binary.cols(); ++c) {
            const double v = binary(r, c);
            if (v == 0.0) continue;
            if (v != 1.0) throw ContractViolation("specialization entries must be 0 or 1");
            trips.emplace_back(r, c, 1.0);
        }
    }
    m.entries.setFromTriplets(trips.begin(), trips.end());
    m.entries.makeCompressed();
    recount(m);
    return m;
}

SpecializationMatrix SpecializationMatrix::from_edges(
    const std::vector<std::pair<int, int>>& edges, std::vector<std::string> countries,
    std::vector<std::string> products) {
    check_codes(countries, "country");
    check_codes(products, "product");

    SpecializationMatrix m;
    m.entries.resize(static_cast<Eigen::Index>(countries.size()),
                     static_cast<Eigen::Index>(products.size()));
    m.countries = std::move(countries);
    m.products = std::move(products);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges.size());
    for (const auto& [c, p] : edges) trips.emplace_back(c, p, 1.0);
    m.entries.setFromTriplets(trips.begin(), trips.end(),
                              [](const double&, const double&) -> double {
                                  throw DuplicateKeyError("duplicate edge in edge list");
                              });
    m.entries.makeCompressed();
    recount(m);
    return m;
}

namespace {

// Connected components over the bipartite node set; countries are nodes
// [0, m), products [m, m+n).
std::vector<int> component_labels(const SpecializationMatrix& m, int* n_components) {
    const Eigen::Index mm = m.country_count();
    const Eigen::Index nn = m.product_count();
    std::vector<std::vector<Eigen::Index>> country_adj(static_cast<size_t>(mm));
    std::vector<std::vector<Eigen::Index>> product_adj(static_cast<size_t>(nn));
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            country_adj[static_cast<size_t>(it.row())].push_back(it.col());
            product_adj[static_cast<size_t>(it.col())].push_back(it.row());
        }
    }

    std::vector<int> label(static_cast<size_t>(mm + nn), -1);
    int comp = 0;
    for (Eigen::Index start = 0; start < mm + nn; ++start) {
        if (label[static_cast<size_t>(start)] != -1) continue;
        std::queue<Eigen::Index> bfs;
        bfs.push(start);
        label[static_cast<size_t>(start)] = comp;
        while (!bfs.empty()) {
            const Eigen::Index node = bfs.front();
            bfs.pop();
            if (node < mm) {
                for (Eigen::Index p : country_adj[static_cast<size_t>(node)]) {
                    if (label[static_cast<size_t>(mm + p)] == -1) {
                        label[static_cast<size_t>(mm + p)] = comp;
                        bfs.push(mm + p);
                    }
                }
            } else {
                for (Eigen::Index c : product_adj[static_cast<size_t>(node - mm)]) {
                    if (label[static_cast<size_t>(c)] == -1) {
                        label[static_cast<size_t>(c)] = comp;
                        bfs.push(c);
                    }
                }
            }
        }
        ++comp;
    }
    *n_components = comp;
    return label;
}

SpecializationMatrix restrict_to(const SpecializationMatrix& m,
                                 const std::vector<bool>& keep_country,
                                 const std::vector<bool>& keep_product,
                                 PruneReport& report) {
    std::vector<Eigen::Index> cmap(keep_country.size(), -1);
    std::vector<Eigen::Index> pmap(keep_product.size(), -1);
    std::vector<std::string> countries, products;
    for (size_t i = 0; i < keep_country.size(); ++i) {
        if (keep_country[i]) {
            cmap[i] = static_cast<Eigen::Index>(countries.size());
            countries.push_back(m.countries[i]);
        } else {
            report.dropped_countries.push_back(m.countries[i]);
        }
    }
    for (size_t j = 0; j < keep_product.size(); ++j) {
        if (keep_product[j]) {
            pmap[j] = static_cast<Eigen::Index>(products.size());
            products.push_back(m.products[j]);
        } else {
            report.dropped_products.push_back(m.products[j]);
        }
    }

    std::vector<std::pair<int, int>> edges;
    for (Eigen::Index r = 0; r < m.entries.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m.entries, r); it;
             ++it) {
            const Eigen::Index c = cmap[static_cast<size_t>(it.row())];
            const Eigen::Index p = pmap[static_cast<size_t>(it.col())];
            if (c >= 0 && p >= 0) edges.emplace_back(static_cast<int>(c), static_cast<int>(p));
        }
    }
    return SpecializationMatrix::from_edges(edges, std::move(countries), std::move(products));
}

}  // namespace

bool is_connected(const SpecializationMatrix& m) {
    if (m.country_count() + m.product_count() == 0) return false;
    int n_components = 0;
    component_labels(m, &n_components);
    return n_components == 1;
}

PruneResult prune(const SpecializationMatrix& input, PrunePolicy policy) {
    PruneReport report;

    // Zero rows/columns cannot reappear once dropped, so a single pass over
    // the counts reaches the fixed point.
    std::vector<bool> keep_country(static_cast<size_t>(input.country_count()));
    std::vector<bool> keep_product(static_cast<size_t>(input.product_count()));
    for (Eigen::Index c = 0; c < input.country_count(); ++c)
        keep_country[static_cast<size_t>(c)] = input.diversity[c] > 0;
    for (Eigen::Index p = 0; p < input.product_count(); ++p)
        keep_product[static_cast<size_t>(p)] = input.ubiquity[p] > 0;

    SpecializationMatrix trimmed = restrict_to(input, keep_country, keep_product, report);
    if (trimmed.country_count() == 0 || trimmed.product_count() == 0) {
        throw PruneError("unusable instance: no nonzero rows/columns remain after pruning");
    }

    int n_components = 0;
    const std::vector<int> label = component_labels(trimmed, &n_components);
    const Eigen::Index mm = trimmed.country_count();

    std::vector<std::pair<int, int>> sizes(static_cast<size_t>(n_components), {0, 0});
    for (Eigen::Index c = 0; c < mm; ++c) sizes[static_cast<size_t>(label[static_cast<size_t>(c)])].first++;
    for (Eigen::Index p = 0; p < trimmed.product_count(); ++p)
        sizes[static_cast<size_t>(label[static_cast<size_t>(mm + p)])].second++;

    if (n_components == 1) {
        report.component_sizes = sizes;
        return {std::move(trimmed), std::move(report)};
    }

    if (policy == PrunePolicy::Strict) {
        throw PruneError("disconnected specialization matrix (" +
                         std::to_string(n_components) + " components) under strict policy");
    }

    // Largest component by node count; ties resolved by the component that
    // appears first in country order (lowest code).
    int best = 0;
    auto nodes = [&sizes](int k) {
        return sizes[static_cast<size_t>(k)].first + sizes[static_cast<size_t>(k)].second;
    };
    for (int k = 1; k < n_components; ++k) {
        if (nodes(k) > nodes(best)) best = k;
    }
    if (nodes(best) > 0) {
        for (Eigen::Index c = 0; c < mm; ++c) {
            const int k = label[static_cast<size_t>(c)];
            if (nodes(k) == nodes(best)) {
                best = k;
                break;
            }
        }
    }

    std::vector<bool> keep_c(static_cast<size_t>(mm));
    std::vector<bool> keep_p(static_cast<size_t>(trimmed.product_count()));
    for (Eigen::Index c = 0; c < mm; ++c) keep_c[static_cast<size_t>(c)] = label[static_cast<size_t>(c)] == best;
    for (Eigen::Index p = 0; p < trimmed.product_count(); ++p)
        keep_p[static_cast<size_t>(p)] = label[static_cast<size_t>(mm + p)] == best;

    SpecializationMatrix kept = restrict_to(trimmed, keep_c, keep_p, report);

    std::sort(sizes.begin(), sizes.end(), [](const auto& a, const auto& b) {
        return a.first + a.second > b.first + b.second;
    });
    report.component_sizes = std::move(sizes);
    return {std::move(kept), std::move(report)};
}

}  // namespace ecoplex
