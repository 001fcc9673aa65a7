#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "commsense/classify.hpp"
#include "commsense/detect.hpp"
#include "commsense/estimate.hpp"
#include "commsense/io.hpp"

namespace commsense {

struct SplitSpec {
    int train_per_class = 500;
    int test_per_class = 500;

    bool operator==(const SplitSpec&) const = default;
};

struct ExperimentConfig {
    GridConfig grid;
    std::vector<SceneConfig> scenes;
    EstimatorKind estimator = EstimatorKind::MMSE;
    FeatureMap feature_map = FeatureMap::Magnitude;
    double energy_threshold = 0.999;
    std::optional<int> d_override;
    SplitSpec split;
    std::uint64_t master_seed = 1;
    ChannelModelParams channel;

    void validate() const;
};

// Seed fan-out: the grid seed and every scene seed are counter-derived from
// the master seed in scene order, so appending scenes never perturbs data
// of existing ones.
ExperimentConfig default_detection_config(std::uint64_t master_seed = 1);
ExperimentConfig default_classification_config(std::uint64_t master_seed = 1);
void reseed(ExperimentConfig& config, std::uint64_t master_seed);

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct RunArtifacts {
    std::filesystem::path eigen_spectrum;
    std::filesystem::path scatter_2d;
    std::filesystem::path scatter_3d;
    std::filesystem::path histograms;
    std::filesystem::path error_curves;
    std::filesystem::path eval_report;
    std::filesystem::path report_csv;
    std::filesystem::path manifest;
};

// Pipeline pieces, exposed so the CLI stages compose over files and tests
// can resume from persisted CSI.
std::vector<PilotObservation> generate_observations(const ExperimentConfig& config);
std::vector<CsiVector> compute_csi(const ExperimentConfig& config);
std::vector<CsiVector> estimate_observations(const ExperimentConfig& config,
                                             const std::vector<PilotObservation>& obs);

struct DetectionResult {
    PcaModel pca;
    int d = 1;
    DetectorModel detector;
    double test_error = 0.0;                // fraction on the held-out split
    double min_sweep_error_percent = 0.0;   // best point on the test sweep
    ErrorCurve test_curve;
};

struct ClassificationResult {
    PcaModel pca;
    int d = 1;
    EvalReport report;
};

DetectionResult detection_eval(const ExperimentConfig& config,
                               const std::vector<CsiVector>& csi);
ClassificationResult classification_eval(const ExperimentConfig& config,
                                         const std::vector<CsiVector>& csi,
                                         const SplitSpec& split);

RunArtifacts run_detection_experiment(const ExperimentConfig& config,
                                      const std::filesystem::path& out_dir);
RunArtifacts run_classification_experiment(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir);

} // namespace commsense
