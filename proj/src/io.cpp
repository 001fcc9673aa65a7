#include "commsense/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

namespace commsense {

namespace {

const char* kDatasetFormat = "commsense-dataset";
constexpr int kDatasetVersion = 1;

nlohmann::json require(const nlohmann::json& j, const char* key, const char* what) {
    if (!j.contains(key))
        throw ParseError(std::string(what) + ": missing key '" + key + "'");
    return j.at(key);
}

nlohmann::json snr_to_json(double snr_db) {
    if (std::isinf(snr_db)) return "inf";
    return snr_db;
}

double snr_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf")
            return std::numeric_limits<double>::infinity();
        throw ParseError("scene: bad snr_db string");
    }
    return j.get<double>();
}

std::vector<double> vec_to_std(const VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

VectorXd std_to_vec(const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ParseError("csv: bad number '" + s + "'");
    return v;
}

nlohmann::json to_json(const GridConfig& c) {
    return {{"n_subcarriers", c.n_subcarriers},
            {"pilot_spacing", c.pilot_spacing},
            {"n_pilot_symbols_per_capture", c.n_pilot_symbols_per_capture},
            {"seed", c.seed}};
}

GridConfig grid_config_from_json(const nlohmann::json& j) {
    GridConfig c;
    c.n_subcarriers = require(j, "n_subcarriers", "grid").get<int>();
    c.pilot_spacing = require(j, "pilot_spacing", "grid").get<int>();
    c.n_pilot_symbols_per_capture =
        require(j, "n_pilot_symbols_per_capture", "grid").get<int>();
    c.seed = require(j, "seed", "grid").get<std::uint64_t>();
    return c;
}

nlohmann::json to_json(const SceneConfig& c) {
    return {{"background_id", c.background_id},
            {"vehicle", vehicle_name(c.vehicle)},
            {"snr_db", snr_to_json(c.snr_db)},
            {"n_captures", c.n_captures},
            {"seed", c.seed}};
}

SceneConfig scene_config_from_json(const nlohmann::json& j) {
    SceneConfig c;
    c.background_id = require(j, "background_id", "scene").get<int>();
    c.vehicle = vehicle_from_name(require(j, "vehicle", "scene").get<std::string>());
    c.snr_db = snr_from_json(require(j, "snr_db", "scene"));
    c.n_captures = require(j, "n_captures", "scene").get<int>();
    c.seed = require(j, "seed", "scene").get<std::uint64_t>();
    return c;
}

nlohmann::json to_json(const ChannelModelParams& p) {
    return {{"n_taps", p.n_taps},
            {"tap_half_life", p.tap_half_life},
            {"background_gain_step", p.background_gain_step},
            {"background_delay_step", p.background_delay_step},
            {"amp_jitter", p.amp_jitter},
            {"vehicle_amp_scale", p.vehicle_amp_scale},
            {"vehicle_amp_jitter", p.vehicle_amp_jitter},
            {"vehicle_delay", p.vehicle_delay},
            {"path_loss_scale", p.path_loss_scale},
            {"base_channel_seed", p.base_channel_seed}};
}

ChannelModelParams channel_params_from_json(const nlohmann::json& j) {
    ChannelModelParams p;
    p.n_taps = j.value("n_taps", p.n_taps);
    p.tap_half_life = j.value("tap_half_life", p.tap_half_life);
    p.background_gain_step = j.value("background_gain_step", p.background_gain_step);
    p.background_delay_step = j.value("background_delay_step", p.background_delay_step);
    p.amp_jitter = j.value("amp_jitter", p.amp_jitter);
    p.vehicle_amp_scale = j.value("vehicle_amp_scale", p.vehicle_amp_scale);
    p.vehicle_amp_jitter = j.value("vehicle_amp_jitter", p.vehicle_amp_jitter);
    p.vehicle_delay = j.value("vehicle_delay", p.vehicle_delay);
    p.path_loss_scale = j.value("path_loss_scale", p.path_loss_scale);
    p.base_channel_seed = j.value("base_channel_seed", p.base_channel_seed);
    return p;
}

nlohmann::json to_json(const PcaModel& m) {
    nlohmann::json cols = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.eigenvectors.cols(); ++c)
        cols.push_back(vec_to_std(m.eigenvectors.col(c)));
    return {{"mean", vec_to_std(m.mean)},
            {"eigenvalues", vec_to_std(m.eigenvalues)},
            {"eigenvectors", cols},
            {"energy_fractions", vec_to_std(m.energy_fractions)}};
}

PcaModel pca_model_from_json(const nlohmann::json& j) {
    PcaModel m;
    m.mean = std_to_vec(require(j, "mean", "pca").get<std::vector<double>>());
    m.eigenvalues = std_to_vec(require(j, "eigenvalues", "pca").get<std::vector<double>>());
    m.energy_fractions =
        std_to_vec(require(j, "energy_fractions", "pca").get<std::vector<double>>());
    const auto cols = require(j, "eigenvectors", "pca");
    m.eigenvectors.resize(m.mean.size(), static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index c = 0; c < m.eigenvectors.cols(); ++c)
        m.eigenvectors.col(c) = std_to_vec(cols.at(c).get<std::vector<double>>());
    return m;
}

nlohmann::json to_json(const DetectorModel& m) {
    return {{"d", m.d},
            {"threshold", m.threshold},
            {"polarity", m.polarity == Polarity::LessIsVehicle ? "less_is_vehicle"
                                                               : "greater_is_vehicle"},
            {"training_error", m.training_error}};
}

DetectorModel detector_model_from_json(const nlohmann::json& j) {
    DetectorModel m;
    m.d = require(j, "d", "detector").get<int>();
    m.threshold = require(j, "threshold", "detector").get<double>();
    const std::string pol = require(j, "polarity", "detector").get<std::string>();
    if (pol == "less_is_vehicle") m.polarity = Polarity::LessIsVehicle;
    else if (pol == "greater_is_vehicle") m.polarity = Polarity::GreaterIsVehicle;
    else throw ParseError("detector: bad polarity '" + pol + "'");
    m.training_error = require(j, "training_error", "detector").get<double>();
    return m;
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
    return nlohmann::json(cm.counts);
}

nlohmann::json to_json(const EvalReport& r) {
    return {{"accuracy", r.accuracy},
            {"far", r.far},
            {"frr", r.frr},
            {"matrix", to_json(r.matrix)}};
}

void export_dataset(const std::vector<PilotObservation>& observations,
                    const GridConfig& grid,
                    const std::filesystem::path& bin_path,
                    const std::filesystem::path& sidecar_path) {
    // Group consecutive observations by scene; the generator emits them
    // scene-major already.
    struct Group {
        SceneConfig scene;
        std::vector<const PilotObservation*> obs;
    };
    std::vector<Group> groups;
    for (const PilotObservation& obs : observations) {
        if (!(obs.grid_ref == grid))
            throw ShapeError("export: observation grid does not match dataset grid");
        if (groups.empty() || !(groups.back().scene == obs.scene))
            groups.push_back({obs.scene, {}});
        groups.back().obs.push_back(&obs);
    }

    std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
    if (!bin) throw ParseError("export: cannot open " + bin_path.string());

    const int n_pilots = static_cast<int>((grid.n_subcarriers + grid.pilot_spacing - 1) /
                                          grid.pilot_spacing);
    const int n_sym = grid.n_pilot_symbols_per_capture;

    nlohmann::json scenes = nlohmann::json::array();
    nlohmann::json offsets = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const Group& g : groups) {
        offsets.push_back(offset);
        nlohmann::json scene_j = to_json(g.scene);
        scene_j["n_captures"] = static_cast<int>(g.obs.size());
        nlohmann::json sigmas = nlohmann::json::array();
        for (const PilotObservation* obs : g.obs) {
            if (obs->received.rows() != n_pilots || obs->received.cols() != n_sym)
                throw ShapeError("export: observation shape does not match grid");
            sigmas.push_back(obs->noise_sigma);
            for (int p = 0; p < n_pilots; ++p) {
                for (int s = 0; s < n_sym; ++s) {
                    const float re = static_cast<float>(obs->received(p, s).real());
                    const float im = static_cast<float>(obs->received(p, s).imag());
                    bin.write(reinterpret_cast<const char*>(&re), sizeof(float));
                    bin.write(reinterpret_cast<const char*>(&im), sizeof(float));
                }
            }
            offset += static_cast<std::uint64_t>(n_pilots) * n_sym * 2 * sizeof(float);
        }
        scene_j["noise_sigmas"] = sigmas;
        scenes.push_back(scene_j);
    }

    nlohmann::json sidecar = {{"format", kDatasetFormat},
                              {"version", kDatasetVersion},
                              {"grid", to_json(grid)},
                              {"scenes", scenes},
                              {"offsets", offsets}};
    write_json_file(sidecar_path, sidecar);
}

std::vector<PilotObservation> ingest_captures(const std::filesystem::path& bin_path,
                                              const std::filesystem::path& sidecar_path) {
    const nlohmann::json sidecar = read_json_file(sidecar_path);
    if (sidecar.value("format", "") != kDatasetFormat)
        throw ParseError("ingest: sidecar is not a " + std::string(kDatasetFormat) +
                         " document");
    const GridConfig grid = grid_config_from_json(require(sidecar, "grid", "ingest"));
    grid.validate();
    const auto scenes_j = require(sidecar, "scenes", "ingest");
    const auto offsets_j = require(sidecar, "offsets", "ingest");
    if (offsets_j.size() != scenes_j.size())
        throw ParseError("ingest: offsets/scenes length mismatch");

    const int n_pilots =
        (grid.n_subcarriers + grid.pilot_spacing - 1) / grid.pilot_spacing;
    const int n_sym = grid.n_pilot_symbols_per_capture;
    const std::uint64_t capture_bytes =
        static_cast<std::uint64_t>(n_pilots) * n_sym * 2 * sizeof(float);

    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw ParseError("ingest: cannot open " + bin_path.string());
    bin.seekg(0, std::ios::end);
    const std::uint64_t file_size = static_cast<std::uint64_t>(bin.tellg());
    bin.seekg(0);

    std::uint64_t expected = 0;
    for (const auto& scene_j : scenes_j)
        expected += capture_bytes *
                    static_cast<std::uint64_t>(require(scene_j, "n_captures", "ingest").get<int>());
    if (file_size != expected)
        throw LengthError("ingest: binary size " + std::to_string(file_size) +
                          " does not match expected " + std::to_string(expected));

    std::vector<PilotObservation> out;
    for (size_t gi = 0; gi < scenes_j.size(); ++gi) {
        const SceneConfig scene = scene_config_from_json(scenes_j.at(gi));
        const std::uint64_t offset = offsets_j.at(gi).get<std::uint64_t>();
        const auto sigmas = require(scenes_j.at(gi), "noise_sigmas", "ingest");
        if (static_cast<int>(sigmas.size()) != scene.n_captures)
            throw ParseError("ingest: noise_sigmas length mismatch");
        bin.seekg(static_cast<std::streamoff>(offset));
        for (int c = 0; c < scene.n_captures; ++c) {
            PilotObservation obs;
            obs.grid_ref = grid;
            obs.scene = scene;
            obs.capture_id = c;
            obs.noise_sigma = sigmas.at(c).get<double>();
            obs.received.resize(n_pilots, n_sym);
            for (int p = 0; p < n_pilots; ++p) {
                for (int s = 0; s < n_sym; ++s) {
                    float re = 0, im = 0;
                    bin.read(reinterpret_cast<char*>(&re), sizeof(float));
                    bin.read(reinterpret_cast<char*>(&im), sizeof(float));
                    obs.received(p, s) = {re, im};
                }
            }
            if (!bin)
                throw LengthError("ingest: truncated binary at capture " + std::to_string(c));
            out.push_back(std::move(obs));
        }
    }
    return out;
}

void write_csi_csv(const std::filesystem::path& path, const std::vector<CsiVector>& csi) {
    const Eigen::Index dim = csi.empty() ? 0 : csi.front().gains.size();
    std::vector<std::string> header = {"capture_id", "estimator",   "background_id",
                                       "vehicle",    "snr_db",      "scene_captures",
                                       "scene_seed"};
    for (Eigen::Index i = 0; i < dim; ++i) {
        header.push_back("re_" + std::to_string(i));
        header.push_back("im_" + std::to_string(i));
    }
    CsvWriter w(path, header);
    for (const CsiVector& c : csi) {
        if (c.gains.size() != dim)
            throw ShapeError("csi csv: ragged gain lengths");
        std::vector<std::string> cells = {
            std::to_string(c.capture_id),
            c.estimator == EstimatorKind::LS ? "ls" : "mmse",
            std::to_string(c.scene.background_id),
            vehicle_name(c.scene.vehicle),
            fmt_double(c.scene.snr_db),
            std::to_string(c.scene.n_captures),
            std::to_string(c.scene.seed)};
        for (Eigen::Index i = 0; i < dim; ++i) {
            cells.push_back(fmt_double(c.gains[i].real()));
            cells.push_back(fmt_double(c.gains[i].imag()));
        }
        w.row(cells);
    }
}

std::vector<CsiVector> read_csi_csv(const std::filesystem::path& path) {
    const CsvTable table = read_strict_csv(path);
    if (table.header.size() < 7 || (table.header.size() - 7) % 2 != 0)
        throw ParseError("csi csv: unexpected column count");
    const Eigen::Index dim = static_cast<Eigen::Index>((table.header.size() - 7) / 2);

    std::vector<CsiVector> out;
    for (const auto& row : table.rows) {
        CsiVector c;
        c.capture_id = static_cast<int>(parse_double(row[0]));
        c.estimator = row[1] == "ls" ? EstimatorKind::LS : EstimatorKind::MMSE;
        c.scene.background_id = static_cast<int>(parse_double(row[2]));
        c.scene.vehicle = vehicle_from_name(row[3]);
        c.scene.snr_db = parse_double(row[4]);
        c.scene.n_captures = static_cast<int>(parse_double(row[5]));
        c.scene.seed = std::stoull(row[6]);
        c.gains.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            c.gains[i] = {parse_double(row[7 + 2 * i]), parse_double(row[8 + 2 * i])};
        out.push_back(std::move(c));
    }
    return out;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("json: cannot open " + path.string());
    out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("json: cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("json: parse error in " + path.string() + " at byte " +
                         std::to_string(e.byte) + ": " + e.what());
    }
}

CsvTable read_strict_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("csv: cannot open " + path.string());

    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.push_back("");
        return cells;
    };

    if (!std::getline(in, line) || line.empty())
        throw ParseError("csv: missing header in " + path.string());
    table.header = split(line);
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != table.header.size())
            throw ParseError("csv: ragged row at line " + std::to_string(line_no) +
                             " in " + path.string());
        table.rows.push_back(std::move(cells));
    }
    return table;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::trunc), width_(header.size()) {
    if (!out_) throw ParseError("csv: cannot open " + path.string());
    for (size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw ShapeError("csv: row width does not match header");
    for (size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

} // namespace commsense
