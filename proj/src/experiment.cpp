#include "commsense/experiment.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "commsense/rng.hpp"

namespace commsense {

namespace {

constexpr std::uint64_t kGridStream = 0x6D1D;
constexpr std::uint64_t kSceneStream = 0x5CE7;

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

const char* estimator_name(EstimatorKind k) {
    return k == EstimatorKind::LS ? "ls" : "mmse";
}

EstimatorKind estimator_from_name(const std::string& name) {
    if (name == "ls") return EstimatorKind::LS;
    if (name == "mmse") return EstimatorKind::MMSE;
    throw ConfigError("config: unknown estimator '" + name + "'");
}

const char* feature_map_name(FeatureMap m) {
    switch (m) {
        case FeatureMap::Magnitude: return "magnitude";
        case FeatureMap::SquaredMagnitude: return "squared_magnitude";
        case FeatureMap::LogMagnitude: return "log_magnitude";
    }
    return "magnitude";
}

FeatureMap feature_map_from_name(const std::string& name) {
    if (name == "magnitude") return FeatureMap::Magnitude;
    if (name == "squared_magnitude") return FeatureMap::SquaredMagnitude;
    if (name == "log_magnitude") return FeatureMap::LogMagnitude;
    throw ConfigError("config: unknown feature_map '" + name + "'");
}

struct LabeledFeature {
    VectorXd feature;
    int capture_id = 0;
    int label = 0;
};

// Train/test split of one class: round-robin across the class's scenes by
// capture index, so every background contributes to both halves.
void split_class(const std::vector<const CsiVector*>& members, FeatureMap map,
                 int label, int train_n, int test_n,
                 std::vector<LabeledFeature>& train, std::vector<LabeledFeature>& test) {
    std::vector<size_t> order(members.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return members[a]->capture_id < members[b]->capture_id;
    });
    if (static_cast<int>(members.size()) < train_n + test_n)
        throw InsufficientDataError("split: class " + std::to_string(label) + " has " +
                                    std::to_string(members.size()) + " captures, needs " +
                                    std::to_string(train_n + test_n));
    for (int i = 0; i < train_n + test_n; ++i) {
        const CsiVector* csi = members[order[static_cast<size_t>(i)]];
        LabeledFeature lf{csi_to_real(*csi, map), csi->capture_id, label};
        (i < train_n ? train : test).push_back(std::move(lf));
    }
}

std::vector<VectorXd> features_of(const std::vector<LabeledFeature>& lfs) {
    std::vector<VectorXd> out;
    out.reserve(lfs.size());
    for (const LabeledFeature& lf : lfs) out.push_back(lf.feature);
    return out;
}

std::vector<FeatureVector> project_all(const PcaModel& pca,
                                       const std::vector<LabeledFeature>& lfs, int d) {
    std::vector<FeatureVector> out;
    out.reserve(lfs.size());
    for (const LabeledFeature& lf : lfs) {
        FeatureVector fv = project(pca, lf.feature, d);
        fv.label = lf.label;
        fv.capture_id = lf.capture_id;
        out.push_back(std::move(fv));
    }
    return out;
}

int choose_d(const ExperimentConfig& config, const PcaModel& pca) {
    int d = config.d_override ? *config.d_override
                              : select_components(pca, config.energy_threshold);
    return std::clamp(d, 1, pca.n_components());
}

struct BinarySplit {
    std::vector<LabeledFeature> train_with, train_without, test_with, test_without;
};

BinarySplit make_binary_split(const ExperimentConfig& config,
                              const std::vector<CsiVector>& csi) {
    std::vector<const CsiVector*> with_vehicle, without;
    for (const CsiVector& c : csi)
        (c.scene.vehicle != Vehicle::None ? with_vehicle : without).push_back(&c);
    if (with_vehicle.empty() || without.empty())
        throw ConfigError("detect: need at least one vehicle scene and one background scene");

    BinarySplit split;
    split_class(without, config.feature_map, 0, config.split.train_per_class,
                config.split.test_per_class, split.train_without, split.test_without);
    split_class(with_vehicle, config.feature_map, 1, config.split.train_per_class,
                config.split.test_per_class, split.train_with, split.test_with);
    return split;
}

struct MultiSplit {
    std::map<int, std::vector<LabeledFeature>> train, test;
};

MultiSplit make_multi_split(const ExperimentConfig& config,
                            const std::vector<CsiVector>& csi, const SplitSpec& spec) {
    std::map<int, std::vector<const CsiVector*>> by_class;
    for (const CsiVector& c : csi) by_class[class_id(c.scene.vehicle)].push_back(&c);
    if (by_class.size() < 2)
        throw ConfigError("classify: need at least two classes");

    MultiSplit split;
    for (auto& [label, members] : by_class)
        split_class(members, config.feature_map, label, spec.train_per_class,
                    spec.test_per_class, split.train[label], split.test[label]);
    return split;
}

void write_eigen_spectrum(const std::filesystem::path& path, const PcaModel& pca) {
    CsvWriter w(path, {"component", "eigenvalue", "energy_fraction", "cumulative_energy"});
    double cum = 0.0;
    for (int i = 0; i < pca.n_components(); ++i) {
        cum += pca.energy_fractions[i];
        w.row({std::to_string(i + 1), fmt_double(pca.eigenvalues[i]),
               fmt_double(pca.energy_fractions[i]), fmt_double(cum)});
    }
}

void write_scatter(const std::filesystem::path& path,
                   const std::vector<FeatureVector>& fvs, int k) {
    std::vector<std::string> header = {"capture_id", "label"};
    for (int i = 1; i <= k; ++i) header.push_back("score" + std::to_string(i));
    CsvWriter w(path, header);
    for (const FeatureVector& fv : fvs) {
        std::vector<std::string> cells = {std::to_string(fv.capture_id),
                                          std::to_string(fv.label)};
        for (int i = 0; i < k; ++i) cells.push_back(fmt_double(fv.scores[i]));
        w.row(cells);
    }
}

nlohmann::json manifest_json(const ExperimentConfig& config,
                             const std::vector<std::string>& artifacts) {
    const std::string dump = to_json(config).dump();
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(dump)));
    return {{"config", to_json(config)},
            {"master_seed", config.master_seed},
            {"config_hash", hash},
            {"artifacts", artifacts}};
}

const std::vector<int> kHistogramComponentCounts = {1, 2, 3, 5, 10};

} // namespace

void ExperimentConfig::validate() const {
    grid.validate();
    if (scenes.empty())
        throw ConfigError("config: scene list is empty");
    for (const SceneConfig& s : scenes) s.validate();
    if (energy_threshold <= 0.0 || energy_threshold > 1.0)
        throw ConfigError("config: energy_threshold must be in (0, 1]");
    if (split.train_per_class < 1 || split.test_per_class < 1)
        throw ConfigError("config: split counts must be positive");
    if (d_override && *d_override < 1)
        throw ConfigError("config: d_override must be positive");
}

void reseed(ExperimentConfig& config, std::uint64_t master_seed) {
    config.master_seed = master_seed;
    config.grid.seed = derive_seed(master_seed, kGridStream);
    for (size_t i = 0; i < config.scenes.size(); ++i)
        config.scenes[i].seed = derive_seed(master_seed, kSceneStream, i);
}

ExperimentConfig default_detection_config(std::uint64_t master_seed) {
    ExperimentConfig config;
    config.grid = GridConfig{};
    for (Vehicle v : {Vehicle::None, Vehicle::Sedan}) {
        for (int bg = 1; bg <= 5; ++bg) {
            SceneConfig scene;
            scene.background_id = bg;
            scene.vehicle = v;
            scene.snr_db = 40.0;
            scene.n_captures = 1000;
            config.scenes.push_back(scene);
        }
    }
    config.split = {2500, 2500};
    reseed(config, master_seed);
    return config;
}

ExperimentConfig default_classification_config(std::uint64_t master_seed) {
    ExperimentConfig config;
    config.grid = GridConfig{};
    for (Vehicle v : {Vehicle::None, Vehicle::TwoWheeler, Vehicle::Sedan, Vehicle::Suv}) {
        for (int bg = 1; bg <= 5; ++bg) {
            SceneConfig scene;
            scene.background_id = bg;
            scene.vehicle = v;
            scene.snr_db = 40.0;
            scene.n_captures = 250;
            config.scenes.push_back(scene);
        }
    }
    config.split = {500, 500};
    reseed(config, master_seed);
    return config;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json scenes = nlohmann::json::array();
    for (const SceneConfig& s : c.scenes) scenes.push_back(to_json(s));
    nlohmann::json j = {{"grid", to_json(c.grid)},
                        {"scenes", scenes},
                        {"estimator", estimator_name(c.estimator)},
                        {"feature_map", feature_map_name(c.feature_map)},
                        {"energy_threshold", c.energy_threshold},
                        {"split",
                         {{"train_per_class", c.split.train_per_class},
                          {"test_per_class", c.split.test_per_class}}},
                        {"master_seed", c.master_seed},
                        {"channel", to_json(c.channel)}};
    j["d_override"] = c.d_override ? nlohmann::json(*c.d_override) : nlohmann::json(nullptr);
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (!j.contains("grid")) throw ParseError("config: missing key 'grid'");
    c.grid = grid_config_from_json(j.at("grid"));
    if (!j.contains("scenes")) throw ParseError("config: missing key 'scenes'");
    for (const auto& sj : j.at("scenes")) c.scenes.push_back(scene_config_from_json(sj));
    c.estimator = estimator_from_name(j.value("estimator", "mmse"));
    c.feature_map = feature_map_from_name(j.value("feature_map", "magnitude"));
    c.energy_threshold = j.value("energy_threshold", c.energy_threshold);
    if (j.contains("d_override") && !j.at("d_override").is_null())
        c.d_override = j.at("d_override").get<int>();
    if (j.contains("split")) {
        c.split.train_per_class = j.at("split").value("train_per_class", 500);
        c.split.test_per_class = j.at("split").value("test_per_class", 500);
    }
    c.master_seed = j.value("master_seed", std::uint64_t{1});
    if (j.contains("channel")) c.channel = channel_params_from_json(j.at("channel"));
    return c;
}

std::vector<PilotObservation> generate_observations(const ExperimentConfig& config) {
    config.validate();
    const PilotGrid grid = build_pilot_grid(config.grid);
    return generate_dataset(config.scenes, grid, config.channel);
}

std::vector<CsiVector> estimate_observations(const ExperimentConfig& config,
                                             const std::vector<PilotObservation>& obs) {
    const PilotGrid grid = build_pilot_grid(config.grid);
    return estimate_dataset(obs, config.estimator, grid);
}

std::vector<CsiVector> compute_csi(const ExperimentConfig& config) {
    return estimate_observations(config, generate_observations(config));
}

DetectionResult detection_eval(const ExperimentConfig& config,
                               const std::vector<CsiVector>& csi) {
    config.validate();
    BinarySplit split = make_binary_split(config, csi);

    DetectionResult res;
    std::vector<VectorXd> train_features = features_of(split.train_without);
    for (VectorXd& f : features_of(split.train_with)) train_features.push_back(std::move(f));
    res.pca = fit_pca(train_features);
    res.d = choose_d(config, res.pca);

    const auto train_with = project_all(res.pca, split.train_with, res.d);
    const auto train_without = project_all(res.pca, split.train_without, res.d);
    const auto test_with = project_all(res.pca, split.test_with, res.d);
    const auto test_without = project_all(res.pca, split.test_without, res.d);

    res.detector = fit_threshold(train_with, train_without, res.d);

    long wrong = 0;
    for (const FeatureVector& fv : test_with)
        if (!detect(res.detector, fv)) ++wrong;
    for (const FeatureVector& fv : test_without)
        if (detect(res.detector, fv)) ++wrong;
    res.test_error = static_cast<double>(wrong) /
                     static_cast<double>(test_with.size() + test_without.size());

    res.test_curve = sweep(test_with, test_without, 512);
    res.min_sweep_error_percent =
        *std::min_element(res.test_curve.error_percent.begin(),
                          res.test_curve.error_percent.end());
    return res;
}

ClassificationResult classification_eval(const ExperimentConfig& config,
                                         const std::vector<CsiVector>& csi,
                                         const SplitSpec& split_spec) {
    config.validate();
    MultiSplit split = make_multi_split(config, csi, split_spec);

    ClassificationResult res;
    std::vector<VectorXd> train_features;
    for (const auto& [label, lfs] : split.train)
        for (const LabeledFeature& lf : lfs) train_features.push_back(lf.feature);
    res.pca = fit_pca(train_features);
    res.d = choose_d(config, res.pca);

    std::vector<FeatureVector> train, test;
    for (const auto& [label, lfs] : split.train)
        for (FeatureVector& fv : project_all(res.pca, lfs, res.d)) train.push_back(std::move(fv));
    for (const auto& [label, lfs] : split.test)
        for (FeatureVector& fv : project_all(res.pca, lfs, res.d)) test.push_back(std::move(fv));

    const NnModel model = NnModel::fit(std::move(train));
    res.report = evaluate(model, test);
    return res;
}

RunArtifacts run_detection_experiment(const ExperimentConfig& config,
                                      const std::filesystem::path& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);

    const std::vector<CsiVector> csi = compute_csi(config);
    const BinarySplit split = make_binary_split(config, csi);
    const DetectionResult res = detection_eval(config, csi);

    RunArtifacts art;
    art.eigen_spectrum = out_dir / "eigen_spectrum.csv";
    write_eigen_spectrum(art.eigen_spectrum, res.pca);

    const int k3 = std::min(3, res.pca.n_components());
    std::vector<LabeledFeature> test_all = split.test_without;
    test_all.insert(test_all.end(), split.test_with.begin(), split.test_with.end());
    art.scatter_2d = out_dir / "scatter_2d.csv";
    write_scatter(art.scatter_2d, project_all(res.pca, test_all, std::min(2, k3)),
                  std::min(2, k3));
    art.scatter_3d = out_dir / "scatter_3d.csv";
    write_scatter(art.scatter_3d, project_all(res.pca, test_all, k3), k3);

    art.histograms = out_dir / "histograms.csv";
    art.error_curves = out_dir / "error_curves.csv";
    {
        CsvWriter hist(art.histograms, {"d", "label", "bin_low", "bin_high", "count"});
        CsvWriter curves(art.error_curves, {"d", "threshold", "error_percent"});
        for (int dd : kHistogramComponentCounts) {
            if (dd > res.pca.n_components()) continue;
            const auto tw = project_all(res.pca, split.test_with, dd);
            const auto to = project_all(res.pca, split.test_without, dd);
            auto emit_hist = [&](int label, const std::vector<FeatureVector>& fvs) {
                for (const HistogramBin& b : histogram(fvs, 40))
                    hist.row({std::to_string(dd), std::to_string(label), fmt_double(b.low),
                              fmt_double(b.high), std::to_string(b.count)});
            };
            emit_hist(1, tw);
            emit_hist(0, to);
            const ErrorCurve curve = sweep(tw, to, 512);
            for (size_t i = 0; i < curve.thresholds.size(); ++i)
                curves.row({std::to_string(dd), fmt_double(curve.thresholds[i]),
                            fmt_double(curve.error_percent[i])});
        }
    }

    art.eval_report = out_dir / "eval_report.json";
    nlohmann::json report = {{"mode", "detection"},
                             {"detector", to_json(res.detector)},
                             {"d", res.d},
                             {"training_error", res.detector.training_error},
                             {"test_error", res.test_error},
                             {"min_sweep_error_percent", res.min_sweep_error_percent}};
    write_json_file(art.eval_report, report);

    art.manifest = out_dir / "manifest.json";
    write_json_file(art.manifest,
                    manifest_json(config, {"eigen_spectrum.csv", "scatter_2d.csv",
                                           "scatter_3d.csv", "histograms.csv",
                                           "error_curves.csv", "eval_report.json"}));
    return art;
}

RunArtifacts run_classification_experiment(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);

    const std::vector<CsiVector> csi = compute_csi(config);
    const ClassificationResult res = classification_eval(config, csi, config.split);
    const MultiSplit split = make_multi_split(config, csi, config.split);

    RunArtifacts art;
    art.eigen_spectrum = out_dir / "eigen_spectrum.csv";
    write_eigen_spectrum(art.eigen_spectrum, res.pca);

    std::vector<LabeledFeature> test_all;
    for (const auto& [label, lfs] : split.test)
        test_all.insert(test_all.end(), lfs.begin(), lfs.end());
    const int k3 = std::min(3, res.pca.n_components());
    art.scatter_2d = out_dir / "scatter_2d.csv";
    write_scatter(art.scatter_2d, project_all(res.pca, test_all, std::min(2, k3)),
                  std::min(2, k3));
    art.scatter_3d = out_dir / "scatter_3d.csv";
    write_scatter(art.scatter_3d, project_all(res.pca, test_all, k3), k3);

    art.report_csv = out_dir / "report.csv";
    {
        std::vector<std::string> header = {"train_per_class", "test_per_class",
                                           "accuracy_percent"};
        const int n = res.report.matrix.n_classes();
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                header.push_back("m" + std::to_string(r) + std::to_string(c));
        header.push_back("frr");
        header.push_back("far");
        CsvWriter w(art.report_csv, header);
        std::vector<std::string> cells = {std::to_string(config.split.train_per_class),
                                          std::to_string(config.split.test_per_class),
                                          fmt_double(100.0 * res.report.accuracy)};
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                cells.push_back(std::to_string(res.report.matrix.counts[r][c]));
        cells.push_back(fmt_double(res.report.frr));
        cells.push_back(fmt_double(res.report.far));
        w.row(cells);
    }

    art.eval_report = out_dir / "eval_report.json";
    nlohmann::json report = to_json(res.report);
    report["mode"] = "classification";
    report["d"] = res.d;
    report["train_per_class"] = config.split.train_per_class;
    report["test_per_class"] = config.split.test_per_class;
    write_json_file(art.eval_report, report);

    art.manifest = out_dir / "manifest.json";
    write_json_file(art.manifest,
                    manifest_json(config, {"eigen_spectrum.csv", "scatter_2d.csv",
                                           "scatter_3d.csv", "report.csv",
                                           "eval_report.json"}));
    return art;
}

} // namespace commsense
