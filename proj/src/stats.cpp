#include "ecoplex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ecoplex::stats {

double mean(const Eigen::VectorXd& x) {
    return x.size() == 0 ? 0.0 : x.mean();
}

double stddev(const Eigen::VectorXd& x) {
    if (x.size() == 0) return 0.0;
    const double m = x.mean();
    return std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size()));
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const auto n = x.size();
    if (n == 0 || n != y.size()) return 0.0;
    const double mx = x.mean();
    const double my = y.mean();
    const Eigen::ArrayXd dx = x.array() - mx;
    const Eigen::ArrayXd dy = y.array() - my;
    const double sx = std::sqrt(dx.square().sum());
    const double sy = std::sqrt(dy.square().sum());
    if (sx == 0.0 || sy == 0.0) return 0.0;
    return (dx * dy).sum() / (sx * sy);
}

Eigen::VectorXd ranks(const Eigen::VectorXd& x) {
    const auto n = x.size();
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&x](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });

    Eigen::VectorXd r(n);
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && x[order[static_cast<size_t>(j + 1)]] == x[order[static_cast<size_t>(i)]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index k = i; k <= j; ++k) r[order[static_cast<size_t>(k)]] = shared;
        i = j + 1;
    }
    return r;
}

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return pearson(ranks(x), ranks(y));
}

}  // namespace ecoplex::stats
