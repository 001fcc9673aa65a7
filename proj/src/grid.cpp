#include "commsense/grid.hpp"

#include <cmath>

#include "commsense/rng.hpp"

namespace commsense {

void GridConfig::validate() const {
    if (n_subcarriers < 1)
        throw ConfigError("grid: n_subcarriers must be positive");
    if (pilot_spacing < 1 || pilot_spacing > n_subcarriers)
        throw ConfigError("grid: pilot_spacing must be in [1, n_subcarriers]");
    if (n_pilot_symbols_per_capture < 1)
        throw ConfigError("grid: n_pilot_symbols_per_capture must be positive");
}

PilotGrid build_pilot_grid(const GridConfig& config) {
    config.validate();

    PilotGrid grid;
    grid.config = config;
    for (int k = 0; k < config.n_subcarriers; k += config.pilot_spacing)
        grid.pilot_indices.push_back(k);

    const int n_pilots = static_cast<int>(grid.pilot_indices.size());
    const int n_sym = config.n_pilot_symbols_per_capture;
    grid.symbols.resize(n_pilots, n_sym);

    // Seeded QPSK alphabet (+-1 +-j)/sqrt(2); the estimators only require P
    // to be known and unit modulus, not 3GPP-generated.
    const double a = 1.0 / std::sqrt(2.0);
    Rng rng(derive_seed(config.seed, 0x9116));
    for (int p = 0; p < n_pilots; ++p) {
        for (int s = 0; s < n_sym; ++s) {
            const std::uint32_t b = rng.bits(2);
            grid.symbols(p, s) = {b & 1u ? a : -a, b & 2u ? a : -a};
        }
    }
    return grid;
}

} // namespace commsense
