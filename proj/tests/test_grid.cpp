#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "commsense/grid.hpp"
#include "commsense/io.hpp"

using namespace commsense;

TEST_CASE("pilot lattice covers the band with the configured stride") {
    const PilotGrid grid = build_pilot_grid({900, 6, 4, 42});
    CHECK(grid.n_pilots() == 150);
    for (size_t i = 1; i < grid.pilot_indices.size(); ++i)
        CHECK(grid.pilot_indices[i] - grid.pilot_indices[i - 1] == 6);
    CHECK(grid.pilot_indices.back() < 900);
}

TEST_CASE("stride equal to band size leaves a single pilot") {
    const PilotGrid grid = build_pilot_grid({12, 12, 1, 0});
    REQUIRE(grid.pilot_indices.size() == 1);
    CHECK(grid.pilot_indices[0] == 0);
}

TEST_CASE("same config regenerates an identical grid") {
    const GridConfig config{300, 5, 6, 1234};
    const PilotGrid a = build_pilot_grid(config);
    const PilotGrid b = build_pilot_grid(config);
    CHECK(a.config == b.config);
    CHECK(a.pilot_indices == b.pilot_indices);
    CHECK(a.symbols == b.symbols);
}

TEST_CASE("pilot symbols are unit-modulus QPSK with near-uniform frequencies") {
    const PilotGrid grid = build_pilot_grid({900, 2, 4, 7});
    REQUIRE(grid.symbols.size() >= 1000);

    std::map<std::pair<int, int>, int> freq;
    for (Eigen::Index p = 0; p < grid.symbols.rows(); ++p) {
        for (Eigen::Index s = 0; s < grid.symbols.cols(); ++s) {
            const cdouble v = grid.symbols(p, s);
            CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
            ++freq[{v.real() > 0 ? 1 : -1, v.imag() > 0 ? 1 : -1}];
        }
    }
    REQUIRE(freq.size() == 4);
    const double total = static_cast<double>(grid.symbols.size());
    for (const auto& [point, count] : freq)
        CHECK(std::abs(count / total - 0.25) < 0.05);
}

TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS_AS(build_pilot_grid({0, 1, 1, 0}), ConfigError);
    CHECK_THROWS_AS(build_pilot_grid({10, 0, 1, 0}), ConfigError);
    CHECK_THROWS_AS(build_pilot_grid({10, 11, 1, 0}), ConfigError);
    CHECK_THROWS_AS(build_pilot_grid({10, 2, 0, 0}), ConfigError);
}

TEST_CASE("grid config serializes with exactly its four fields") {
    const GridConfig config{600, 3, 8, 0xdeadbeefULL};
    const nlohmann::json j = to_json(config);
    CHECK(j.size() == 4);
    CHECK(grid_config_from_json(j) == config);
    CHECK_THROWS_AS(grid_config_from_json(nlohmann::json{{"pilot_spacing", 6}}), ParseError);
}
