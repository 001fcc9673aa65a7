#include "commsense/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "commsense/rng.hpp"

namespace commsense {

namespace {

constexpr std::uint64_t kBaseStream = 0xBA5E;
constexpr std::uint64_t kJitterStream = 0xCA97;
constexpr std::uint64_t kNoiseStream = 0x0B5E;

// Table of measured frontal dimensions (width x height, meters).
constexpr double kTwoWheelerArea = 0.710 * 1.158;
constexpr double kSedanArea = 1.734 * 1.505;
constexpr double kSuvArea = 1.765 * 1.708;

} // namespace

int class_id(Vehicle v) { return static_cast<int>(v); }

const char* vehicle_name(Vehicle v) {
    switch (v) {
        case Vehicle::None: return "none";
        case Vehicle::TwoWheeler: return "two_wheeler";
        case Vehicle::Sedan: return "sedan";
        case Vehicle::Suv: return "suv";
    }
    return "unknown";
}

Vehicle vehicle_from_name(const std::string& name) {
    if (name == "none") return Vehicle::None;
    if (name == "two_wheeler") return Vehicle::TwoWheeler;
    if (name == "sedan") return Vehicle::Sedan;
    if (name == "suv") return Vehicle::Suv;
    throw ConfigError("scene: unknown vehicle name '" + name + "'");
}

double frontal_area_m2(Vehicle v) {
    switch (v) {
        case Vehicle::None: return 0.0;
        case Vehicle::TwoWheeler: return kTwoWheelerArea;
        case Vehicle::Sedan: return kSedanArea;
        case Vehicle::Suv: return kSuvArea;
    }
    return 0.0;
}

void SceneConfig::validate() const {
    if (background_id < 1 || background_id > 5)
        throw ConfigError("scene: background_id must be in [1, 5]");
    if (!std::isfinite(snr_db) && !(std::isinf(snr_db) && snr_db > 0))
        throw ConfigError("scene: snr_db must be finite or +inf");
    if (n_captures < 1)
        throw ConfigError("scene: n_captures must be positive");
}

ChannelRealization synth_channel(const SceneConfig& scene, const PilotGrid& grid,
                                 int capture_index,
                                 const ChannelModelParams& params) {
    scene.validate();
    if (capture_index < 0 || capture_index >= scene.n_captures)
        throw RangeError("channel: capture_index out of range");

    const int n_pilots = grid.n_pilots();
    const int n_sub = grid.config.n_subcarriers;
    const double two_pi = 2.0 * std::numbers::pi;

    // Shared multipath base: exponentially decaying taps, unit total power.
    Rng base_rng(derive_seed(params.base_channel_seed, kBaseStream));
    std::vector<cdouble> taps(params.n_taps);
    double power_sum = 0.0;
    for (int l = 0; l < params.n_taps; ++l)
        power_sum += std::exp2(-l / params.tap_half_life);
    for (int l = 0; l < params.n_taps; ++l)
        taps[l] = base_rng.cgauss(std::exp2(-l / params.tap_half_life) / power_sum);
    const double vehicle_phase = std::arg(base_rng.cgauss());

    const double bg_gain = 1.0 + params.background_gain_step * (scene.background_id - 3);
    const double bg_delay = params.background_delay_step * (scene.background_id - 1);

    Rng jitter_rng(derive_seed(scene.seed, kJitterStream, static_cast<std::uint64_t>(capture_index)));
    const double amp_jit = 1.0 + params.amp_jitter * jitter_rng.gauss();
    const double veh_jit = 1.0 + params.vehicle_amp_jitter * jitter_rng.gauss();

    const double vehicle_amp =
        params.vehicle_amp_scale * frontal_area_m2(scene.vehicle) / kSedanArea;

    ChannelRealization out;
    out.scene = scene;
    out.gains.resize(n_pilots);
    for (int p = 0; p < n_pilots; ++p) {
        const double k = static_cast<double>(grid.pilot_indices[p]);
        cdouble h = 0.0;
        for (int l = 0; l < params.n_taps; ++l) {
            const double delay = static_cast<double>(l) + bg_delay;
            h += taps[l] * std::polar(1.0, -two_pi * k * delay / n_sub);
        }
        h *= bg_gain * amp_jit;
        if (scene.vehicle != Vehicle::None) {
            h += vehicle_amp * veh_jit *
                 std::polar(1.0, vehicle_phase - two_pi * k * params.vehicle_delay / n_sub);
        }
        out.gains[p] = params.path_loss_scale * h;
    }
    return out;
}

PilotObservation observe(const ChannelRealization& channel, const PilotGrid& grid,
                         double snr_db, std::uint64_t seed) {
    const int n_pilots = grid.n_pilots();
    if (channel.gains.size() != n_pilots)
        throw ShapeError("observe: channel length does not match grid pilot count");

    const int n_sym = grid.n_symbols();
    PilotObservation obs;
    obs.grid_ref = grid.config;
    obs.scene = channel.scene;
    obs.true_channel = channel.gains;
    obs.received.resize(n_pilots, n_sym);

    double noise_var = 0.0;
    if (std::isinf(snr_db)) {
        obs.noise_sigma = 0.0;
    } else {
        // SNR is per received pilot sample; pilots are unit modulus, so the
        // signal power per sample is the mean squared channel gain.
        const double signal_power = channel.gains.squaredNorm() / n_pilots;
        noise_var = signal_power / std::pow(10.0, snr_db / 10.0);
        obs.noise_sigma = std::sqrt(noise_var);
    }

    Rng rng(seed);
    for (int p = 0; p < n_pilots; ++p) {
        for (int s = 0; s < n_sym; ++s) {
            cdouble y = channel.gains[p] * grid.symbols(p, s);
            if (noise_var > 0.0) y += rng.cgauss(noise_var);
            obs.received(p, s) = y;
        }
    }
    return obs;
}

std::vector<PilotObservation> generate_dataset(const std::vector<SceneConfig>& scenes,
                                               const PilotGrid& grid,
                                               const ChannelModelParams& params) {
    if (scenes.empty())
        throw ConfigError("dataset: scene list is empty");

    std::vector<PilotObservation> out;
    for (const SceneConfig& scene : scenes) {
        scene.validate();
        for (int c = 0; c < scene.n_captures; ++c) {
            ChannelRealization ch = synth_channel(scene, grid, c, params);
            PilotObservation obs =
                observe(ch, grid, scene.snr_db,
                        derive_seed(scene.seed, kNoiseStream, static_cast<std::uint64_t>(c)));
            obs.capture_id = c;
            out.push_back(std::move(obs));
        }
    }
    return out;
}

} // namespace commsense
