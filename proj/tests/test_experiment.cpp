#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "commsense/experiment.hpp"

using namespace commsense;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("commsense_exp_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int counter;
};
int TempDir::counter = 0;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A scaled-down detection problem that runs in well under a second.
ExperimentConfig small_detection_config() {
    ExperimentConfig config;
    config.grid.n_subcarriers = 120;
    config.grid.pilot_spacing = 6;
    config.grid.n_pilot_symbols_per_capture = 4;
    for (Vehicle v : {Vehicle::None, Vehicle::Sedan}) {
        for (int bg = 1; bg <= 2; ++bg) {
            SceneConfig scene;
            scene.background_id = bg;
            scene.vehicle = v;
            scene.snr_db = 40.0;
            scene.n_captures = 60;
            config.scenes.push_back(scene);
        }
    }
    config.split = {50, 50};
    reseed(config, 7);
    return config;
}

ExperimentConfig small_classification_config() {
    ExperimentConfig config;
    config.grid.n_subcarriers = 120;
    config.grid.pilot_spacing = 6;
    config.grid.n_pilot_symbols_per_capture = 4;
    for (Vehicle v : {Vehicle::None, Vehicle::TwoWheeler, Vehicle::Sedan, Vehicle::Suv}) {
        for (int bg = 1; bg <= 2; ++bg) {
            SceneConfig scene;
            scene.background_id = bg;
            scene.vehicle = v;
            scene.snr_db = 40.0;
            scene.n_captures = 40;
            config.scenes.push_back(scene);
        }
    }
    config.split = {40, 40};
    reseed(config, 7);
    return config;
}

bool same_csi(const std::vector<CsiVector>& a, const std::vector<CsiVector>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].gains.size() != b[i].gains.size()) return false;
        if ((a[i].gains - b[i].gains).cwiseAbs().maxCoeff() != 0.0) return false;
    }
    return true;
}

} // namespace

TEST_CASE("seed fan-out is stable under scene appends") {
    ExperimentConfig base = small_detection_config();
    ExperimentConfig extended = base;
    SceneConfig extra;
    extra.background_id = 3;
    extra.vehicle = Vehicle::Suv;
    extra.n_captures = 10;
    extended.scenes.push_back(extra);
    reseed(extended, base.master_seed);

    for (size_t i = 0; i < base.scenes.size(); ++i)
        CHECK(extended.scenes[i].seed == base.scenes[i].seed);
    CHECK(extended.grid.seed == base.grid.seed);

    const auto obs_base = generate_observations(base);
    const auto obs_ext = generate_observations(extended);
    REQUIRE(obs_ext.size() == obs_base.size() + 10);
    for (size_t i = 0; i < obs_base.size(); ++i)
        CHECK((obs_ext[i].received - obs_base[i].received).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the whole pipeline is bit-reproducible") {
    const ExperimentConfig config = small_detection_config();
    CHECK(same_csi(compute_csi(config), compute_csi(config)));

    const DetectionResult a = detection_eval(config, compute_csi(config));
    const DetectionResult b = detection_eval(config, compute_csi(config));
    CHECK(a.d == b.d);
    CHECK(a.detector.threshold == b.detector.threshold);
    CHECK(a.detector.polarity == b.detector.polarity);
    CHECK(a.test_error == b.test_error);
    CHECK(a.min_sweep_error_percent == b.min_sweep_error_percent);
}

TEST_CASE("detection results survive a csv round trip of the estimates") {
    TempDir dir;
    const ExperimentConfig config = small_detection_config();
    const auto csi = compute_csi(config);
    const DetectionResult direct = detection_eval(config, csi);

    write_csi_csv(dir.path / "csi.csv", csi);
    const DetectionResult resumed = detection_eval(config, read_csi_csv(dir.path / "csi.csv"));

    CHECK(resumed.d == direct.d);
    CHECK(resumed.detector.threshold == direct.detector.threshold);
    CHECK(resumed.detector.polarity == direct.detector.polarity);
    CHECK(resumed.detector.training_error == direct.detector.training_error);
    CHECK(resumed.test_error == direct.test_error);
}

TEST_CASE("detection on the small problem separates the classes well") {
    const ExperimentConfig config = small_detection_config();
    const DetectionResult res = detection_eval(config, compute_csi(config));
    CHECK(res.d >= 1);
    CHECK(res.test_error <= 0.10);
    CHECK(res.min_sweep_error_percent <= 10.0);
}

TEST_CASE("class-structure requirements are enforced") {
    ExperimentConfig no_vehicle = small_detection_config();
    no_vehicle.scenes.erase(
        std::remove_if(no_vehicle.scenes.begin(), no_vehicle.scenes.end(),
                       [](const SceneConfig& s) { return s.vehicle != Vehicle::None; }),
        no_vehicle.scenes.end());
    CHECK_THROWS_AS(detection_eval(no_vehicle, compute_csi(no_vehicle)), ConfigError);
    CHECK_THROWS_AS(
        classification_eval(no_vehicle, compute_csi(no_vehicle), no_vehicle.split),
        ConfigError);

    ExperimentConfig starved = small_detection_config();
    starved.split = {5000, 5000};
    CHECK_THROWS_AS(detection_eval(starved, compute_csi(small_detection_config())),
                    InsufficientDataError);
}

TEST_CASE("config validation rejects bad knobs") {
    ExperimentConfig config = small_detection_config();
    config.energy_threshold = 0.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = small_detection_config();
    config.scenes.clear();
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = small_detection_config();
    config.d_override = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = small_detection_config();
    config.split.train_per_class = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("experiment config json round trips exactly") {
    ExperimentConfig config = small_classification_config();
    config.estimator = EstimatorKind::LS;
    config.feature_map = FeatureMap::LogMagnitude;
    config.d_override = 2;
    config.channel.vehicle_delay = 1.75;
    const ExperimentConfig back = experiment_config_from_json(to_json(config));
    CHECK(back.grid == config.grid);
    CHECK(back.scenes == config.scenes);
    CHECK(back.estimator == config.estimator);
    CHECK(back.feature_map == config.feature_map);
    CHECK(back.energy_threshold == config.energy_threshold);
    CHECK(back.d_override == config.d_override);
    CHECK(back.split == config.split);
    CHECK(back.master_seed == config.master_seed);
    CHECK(back.channel == config.channel);

    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json{{"scenes", nullptr}}),
                    ParseError);
}

TEST_CASE("detection run emits its artifact set deterministically") {
    TempDir dir;
    const ExperimentConfig config = small_detection_config();
    const RunArtifacts art = run_detection_experiment(config, dir.path / "run1");
    for (const fs::path& p : {art.eigen_spectrum, art.scatter_2d, art.scatter_3d,
                              art.histograms, art.error_curves, art.eval_report,
                              art.manifest}) {
        CHECK(fs::exists(p));
        CHECK(fs::file_size(p) > 0);
    }
    const nlohmann::json report = read_json_file(art.eval_report);
    CHECK(report.at("mode") == "detection");
    CHECK(report.at("test_error").get<double>() <= 0.10);

    const RunArtifacts again = run_detection_experiment(config, dir.path / "run2");
    CHECK(slurp(art.eigen_spectrum) == slurp(again.eigen_spectrum));
    CHECK(slurp(art.histograms) == slurp(again.histograms));
    CHECK(slurp(art.error_curves) == slurp(again.error_curves));
    CHECK(slurp(art.eval_report) == slurp(again.eval_report));
    CHECK(slurp(art.manifest) == slurp(again.manifest));
}

TEST_CASE("classification run reports a coherent summary") {
    TempDir dir;
    const ExperimentConfig config = small_classification_config();
    const RunArtifacts art = run_classification_experiment(config, dir.path);
    CHECK(fs::exists(art.report_csv));

    const CsvTable table = read_strict_csv(art.report_csv);
    REQUIRE(table.header.size() == 3 + 16 + 2);
    CHECK(table.header[0] == "train_per_class");
    CHECK(table.header[1] == "test_per_class");
    CHECK(table.header[2] == "accuracy_percent");
    CHECK(table.header[3] == "m00");
    CHECK(table.header[18] == "m33");
    CHECK(table.header[19] == "frr");
    CHECK(table.header[20] == "far");
    REQUIRE(table.rows.size() == 1);

    long total = 0;
    for (int i = 0; i < 16; ++i) total += std::stol(table.rows[0][3 + i]);
    CHECK(total == 4 * config.split.test_per_class);

    const nlohmann::json report = read_json_file(art.eval_report);
    CHECK(report.at("mode") == "classification");
    const double acc = report.at("accuracy").get<double>();
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(parse_double(table.rows[0][2]) == doctest::Approx(100.0 * acc));
}
