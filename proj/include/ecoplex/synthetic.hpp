#pragma once

#include <cstdint>
#include <vector>

#include "ecoplex/cocluster.hpp"
#include "ecoplex/matrix.hpp"
#include "ecoplex/trade.hpp"

namespace ecoplex {

// Smallest connected non-degenerate instance: M = [[1,1,0],[0,1,1]].
SpecializationMatrix fixture_f1();

// Planted 40x60 checkerboard: countries 1-15 x products 1-20 and countries
// 16-40 x products 21-60 dense (p = 0.8), off-blocks sparse (p = 0.1).
// Pruned to the largest component; planted labels follow the survivors.
struct PlantedFixture {
    SpecializationMatrix matrix;
    // One label per entity, countries then products; B is the planted
    // high-diversity block (countries 16-40 with products 21-60).
    std::vector<ClusterLabel> planted;
};

inline constexpr std::uint64_t kFixtureF2Seed = 62;

PlantedFixture fixture_f2(std::uint64_t seed = kFixtureF2Seed);

// Bernoulli(density) matrix pruned to its largest connected component;
// salts the seed until the survivor keeps >= 5 countries and products.
SpecializationMatrix random_connected_instance(int countries, int products, double density,
                                               std::uint64_t seed);

// Noisy nested instance: P(M_cp = 1) = sigmoid(steepness * (x_c - y_p))
// with latent capability/complexity levels x, y ~ U(0,1). Mimics the
// triangular structure of trade matrices and carries a clear spectral gap,
// unlike i.i.d. Bernoulli draws.
SpecializationMatrix random_nested_instance(int countries, int products, double steepness,
                                            std::uint64_t seed);

// Integral-valued export table (values survive 12-significant-digit
// round-trips exactly), one or more years.
TradeFlowTable synthetic_trade_flows(int n_years, int countries, int products,
                                     std::uint64_t seed);

// Deterministic generator shared by the synthetic builders.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();  // [0, 1)
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

}  // namespace ecoplex
