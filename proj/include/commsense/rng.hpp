#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace commsense {

// splitmix64 finalizer; whitens raw seeds and drives substream derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter scheme for substreams: derive(base, stream, counter). Streams are
// independent of each other, so adding a new scene or capture never perturbs
// draws of existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t counter = 0) {
    return splitmix64(splitmix64(base ^ (0x517cc1b727220a95ULL * (stream + 1))) +
                      counter);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    double gauss() { return normal_(gen_); }

    // CN(0, var): circular symmetric complex Gaussian.
    std::complex<double> cgauss(double var = 1.0) {
        const double s = std::sqrt(var / 2.0);
        return {s * gauss(), s * gauss()};
    }

    std::uint32_t bits(int n) {
        return static_cast<std::uint32_t>(gen_()) & ((1u << n) - 1u);
    }

    std::uint64_t u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace commsense
