#pragma once

#include <cstdint>
#include <vector>

#include "commsense/common.hpp"

namespace commsense {

struct GridConfig {
    int n_subcarriers = 900;
    int pilot_spacing = 6;
    int n_pilot_symbols_per_capture = 4;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const GridConfig&) const = default;
};

// Known reference-symbol layout: which subcarriers carry pilots and the
// transmitted QPSK values on each. Immutable after construction.
struct PilotGrid {
    GridConfig config;
    std::vector<int> pilot_indices;  // strictly increasing, < n_subcarriers
    MatrixXcd symbols;               // n_pilots x N, unit modulus

    int n_pilots() const { return static_cast<int>(pilot_indices.size()); }
    int n_symbols() const { return config.n_pilot_symbols_per_capture; }
};

PilotGrid build_pilot_grid(const GridConfig& config);

} // namespace commsense
