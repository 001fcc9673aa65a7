#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commsense/channel.hpp"
#include "commsense/classify.hpp"
#include "commsense/detect.hpp"
#include "commsense/estimate.hpp"
#include "commsense/grid.hpp"
#include "commsense/pca.hpp"

namespace commsense {

// Doubles are printed with %.17g everywhere so every emitted file parses
// back to the exact same value.
std::string fmt_double(double v);
double parse_double(const std::string& s);

nlohmann::json to_json(const GridConfig& c);
GridConfig grid_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SceneConfig& c);
SceneConfig scene_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChannelModelParams& p);
ChannelModelParams channel_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PcaModel& m);
PcaModel pca_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DetectorModel& m);
DetectorModel detector_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const EvalReport& r);

// Dataset interchange: interleaved little-endian float32 (re, im) pairs in
// scene-major, capture-major, subcarrier-major, symbol-major order, plus a
// JSON sidecar carrying the grid config, scene configs, per-capture noise
// sigmas and per-scene byte offsets. Also the ingestion format for
// externally captured pilot observations.
void export_dataset(const std::vector<PilotObservation>& observations,
                    const GridConfig& grid,
                    const std::filesystem::path& bin_path,
                    const std::filesystem::path& sidecar_path);

std::vector<PilotObservation> ingest_captures(const std::filesystem::path& bin_path,
                                              const std::filesystem::path& sidecar_path);

void write_csi_csv(const std::filesystem::path& path, const std::vector<CsiVector>& csi);
std::vector<CsiVector> read_csi_csv(const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

// Minimal strict CSV: one declared header row, no ragged rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_strict_csv(const std::filesystem::path& path);

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path,
                       const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    size_t width_;
};

} // namespace commsense
