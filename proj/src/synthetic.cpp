#include "ecoplex/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ecoplex/errors.hpp"

namespace ecoplex {

std::uint64_t SplitMix::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix::uniform() {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
}

namespace {

std::vector<std::string> padded_codes(char prefix, int count) {
    int width = 3;  // enough zero padding to keep codes lexicographically sorted
    for (int bound = 1000; bound <= count; bound *= 10) ++width;
    char buf[16];
    std::vector<std::string> codes;
    codes.reserve(static_cast<size_t>(count));
    for (int i = 1; i <= count; ++i) {
        std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, i);
        codes.emplace_back(buf);
    }
    return codes;
}

}  // namespace

SpecializationMatrix fixture_f1() {
    Eigen::MatrixXd m(2, 3);
    m << 1, 1, 0, 0, 1, 1;
    return SpecializationMatrix::from_dense(m, {"C001", "C002"}, {"P001", "P002", "P003"});
}

PlantedFixture fixture_f2(std::uint64_t seed) {
    constexpr int kCountries = 40;
    constexpr int kProducts = 60;
    constexpr int kBlockCountries = 15;  // countries 1-15 pair with products 1-20
    constexpr int kBlockProducts = 20;

    SplitMix rng(seed);
    Eigen::MatrixXd dense(kCountries, kProducts);
    for (int c = 0; c < kCountries; ++c) {
        for (int p = 0; p < kProducts; ++p) {
            const bool in_block_a = c < kBlockCountries && p < kBlockProducts;
            const bool in_block_b = c >= kBlockCountries && p >= kBlockProducts;
            const double density = (in_block_a || in_block_b) ? 0.8 : 0.1;
            dense(c, p) = rng.bernoulli(density) ? 1.0 : 0.0;
        }
    }

    SpecializationMatrix full = SpecializationMatrix::from_dense(
        dense, padded_codes('C', kCountries), padded_codes('P', kProducts));
    PruneResult pruned = prune(full, PrunePolicy::LargestComponent);

    PlantedFixture fixture;
    fixture.matrix = std::move(pruned.matrix);
    fixture.planted.reserve(
        static_cast<size_t>(fixture.matrix.country_count() + fixture.matrix.product_count()));
    for (const auto& code : fixture.matrix.countries) {
        const int index = std::stoi(code.substr(1));
        fixture.planted.push_back(index <= kBlockCountries ? ClusterLabel::A
                                                           : ClusterLabel::B);
    }
    for (const auto& code : fixture.matrix.products) {
        const int index = std::stoi(code.substr(1));
        fixture.planted.push_back(index <= kBlockProducts ? ClusterLabel::A
                                                          : ClusterLabel::B);
    }
    return fixture;
}

SpecializationMatrix random_connected_instance(int countries, int products, double density,
                                               std::uint64_t seed) {
    for (std::uint64_t salt = 0; salt < 64; ++salt) {
        SplitMix rng(seed * 0x9E3779B97F4A7C15ULL + salt);
        Eigen::MatrixXd dense(countries, products);
        for (int c = 0; c < countries; ++c) {
            for (int p = 0; p < products; ++p) {
                dense(c, p) = rng.bernoulli(density) ? 1.0 : 0.0;
            }
        }
        try {
            SpecializationMatrix full = SpecializationMatrix::from_dense(
                dense, padded_codes('C', countries), padded_codes('P', products));
            PruneResult pruned = prune(full, PrunePolicy::LargestComponent);
            if (pruned.matrix.country_count() >= 5 && pruned.matrix.product_count() >= 5) {
                return std::move(pruned.matrix);
            }
        } catch (const PruneError&) {
            // all-zero draw at low density; try the next salt
        }
    }
    throw ContractViolation("random_connected_instance: no usable instance in 64 attempts");
}

SpecializationMatrix random_nested_instance(int countries, int products, double steepness,
                                            std::uint64_t seed) {
    for (std::uint64_t salt = 0; salt < 64; ++salt) {
        SplitMix rng(seed * 0x94D049BB133111EBULL + salt);
        std::vector<double> capability(static_cast<size_t>(countries));
        std::vector<double> complexity(static_cast<size_t>(products));
        for (auto& v : capability) v = rng.uniform();
        for (auto& v : complexity) v = rng.uniform();

        Eigen::MatrixXd dense(countries, products);
        for (int c = 0; c < countries; ++c) {
            for (int p = 0; p < products; ++p) {
                const double gap = capability[static_cast<size_t>(c)] -
                                   complexity[static_cast<size_t>(p)];
                const double prob = 1.0 / (1.0 + std::exp(-steepness * gap));
                dense(c, p) = rng.bernoulli(prob) ? 1.0 : 0.0;
            }
        }
        try {
            SpecializationMatrix full = SpecializationMatrix::from_dense(
                dense, padded_codes('C', countries), padded_codes('P', products));
            PruneResult pruned = prune(full, PrunePolicy::LargestComponent);
            if (pruned.matrix.country_count() >= 5 && pruned.matrix.product_count() >= 5) {
                return std::move(pruned.matrix);
            }
        } catch (const PruneError&) {
        }
    }
    throw ContractViolation("random_nested_instance: no usable instance in 64 attempts");
}

TradeFlowTable synthetic_trade_flows(int n_years, int countries, int products,
                                     std::uint64_t seed) {
    SplitMix rng(seed);
    const auto country_codes = padded_codes('C', countries);
    const auto product_codes = padded_codes('P', products);

    TradeFlowTable table;
    for (int y = 0; y < n_years; ++y) {
        const int year = 1990 + y;
        for (int c = 0; c < countries; ++c) {
            for (int p = 0; p < products; ++p) {
                if (!rng.bernoulli(0.45)) continue;
                // Integral USD values spanning several orders of magnitude.
                const double magnitude = 1.0 + rng.uniform() * 8.0;
                const double value = std::floor(std::pow(10.0, magnitude));
                table.rows.push_back({year, country_codes[static_cast<size_t>(c)],
                                      product_codes[static_cast<size_t>(p)], value});
            }
        }
    }
    return table;
}

}  // namespace ecoplex
