#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "commsense/common.hpp"
#include "commsense/grid.hpp"

namespace commsense {

enum class Vehicle { None = 0, TwoWheeler = 1, Sedan = 2, Suv = 3 };

int class_id(Vehicle v);
const char* vehicle_name(Vehicle v);
Vehicle vehicle_from_name(const std::string& name);

// Frontal area (width x height, meters) of the measured vehicles.
double frontal_area_m2(Vehicle v);

struct SceneConfig {
    int background_id = 1;  // [1, 5]
    Vehicle vehicle = Vehicle::None;
    double snr_db = 40.0;   // +inf disables noise
    int n_captures = 1;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const SceneConfig&) const = default;
};

// Knobs of the synthetic road channel. Backgrounds share one multipath tap
// set and differ by a gain factor and a common delay shift; a vehicle adds a
// single forward-scatter path whose amplitude is proportional to frontal
// area normalized to the sedan.
struct ChannelModelParams {
    int n_taps = 4;
    double tap_half_life = 1.0;          // power halves every this many taps
    double background_gain_step = 0.02;  // per-background gain offset
    double background_delay_step = 0.002; // per-background delay shift, samples
    double amp_jitter = 0.03;            // per-capture fractional gain jitter
    double vehicle_amp_scale = 1.0;      // sedan path amplitude
    double vehicle_amp_jitter = 0.04;
    double vehicle_delay = 2.5;          // samples
    double path_loss_scale = 1.0;
    std::uint64_t base_channel_seed = 0x1b873593ULL;

    bool operator==(const ChannelModelParams&) const = default;
};

struct ChannelRealization {
    VectorXcd gains;  // one complex gain per pilot subcarrier
    SceneConfig scene;
};

struct PilotObservation {
    MatrixXcd received;  // n_pilots x N
    GridConfig grid_ref;
    SceneConfig scene;
    int capture_id = 0;
    double noise_sigma = 0.0;
    std::optional<VectorXcd> true_channel;  // retained for oracle tests only
};

ChannelRealization synth_channel(const SceneConfig& scene, const PilotGrid& grid,
                                 int capture_index,
                                 const ChannelModelParams& params = {});

PilotObservation observe(const ChannelRealization& channel, const PilotGrid& grid,
                         double snr_db, std::uint64_t seed);

std::vector<PilotObservation> generate_dataset(const std::vector<SceneConfig>& scenes,
                                               const PilotGrid& grid,
                                               const ChannelModelParams& params = {});

} // namespace commsense
