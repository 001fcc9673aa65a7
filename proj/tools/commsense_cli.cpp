// commsense: synthetic LTE pilot sensing experiments from the command line.
//
// Stages compose over files: `gen` writes the binary dataset + sidecar,
// `estimate` turns it into a CSI CSV, `features` fits PCA, and
// `detect`/`classify`/`report` run the full experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commsense/experiment.hpp"
#include "commsense/io.hpp"

namespace fs = std::filesystem;
using namespace commsense;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::string preset = "detection";
};

ExperimentConfig load_config(const CommonOpts& opts) {
    ExperimentConfig config;
    if (!opts.config_path.empty()) {
        config = experiment_config_from_json(read_json_file(opts.config_path));
    } else if (opts.preset == "classification") {
        config = default_classification_config();
    } else {
        config = default_detection_config();
    }
    if (opts.seed) reseed(config, *opts.seed);
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Experiment config JSON");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "Override the master seed");
    cmd->add_option("--preset", opts.preset,
                    "Built-in config when --config is absent: detection|classification");
}

int cmd_gen(const CommonOpts& opts) {
    const ExperimentConfig config = load_config(opts);
    fs::create_directories(opts.out_dir);
    const auto obs = generate_observations(config);
    export_dataset(obs, config.grid, fs::path(opts.out_dir) / "dataset.bin",
                   fs::path(opts.out_dir) / "dataset.json");
    write_json_file(fs::path(opts.out_dir) / "config.json", to_json(config));
    std::cout << "wrote " << obs.size() << " observations to " << opts.out_dir << "\n";
    return 0;
}

int cmd_estimate(const CommonOpts& opts, const std::string& in_bin,
                 const std::string& sidecar, const std::string& estimator) {
    const ExperimentConfig config = load_config(opts);
    fs::create_directories(opts.out_dir);
    auto cfg = config;
    if (!estimator.empty())
        cfg.estimator = estimator == "ls" ? EstimatorKind::LS : EstimatorKind::MMSE;
    const auto obs = ingest_captures(in_bin, sidecar);
    // The sidecar, not the config, says which grid the captures were taken on.
    if (!obs.empty()) cfg.grid = obs.front().grid_ref;
    const auto csi = estimate_observations(cfg, obs);
    write_csi_csv(fs::path(opts.out_dir) / "csi.csv", csi);
    std::cout << "estimated " << csi.size() << " CSI vectors\n";
    return 0;
}

int cmd_features(const CommonOpts& opts, const std::string& csi_path) {
    const ExperimentConfig config = load_config(opts);
    fs::create_directories(opts.out_dir);
    const auto csi = read_csi_csv(csi_path);
    std::vector<VectorXd> features;
    for (const CsiVector& c : csi) features.push_back(csi_to_real(c, config.feature_map));
    const PcaModel pca = fit_pca(features);
    const int d = std::clamp(config.d_override ? *config.d_override
                                               : select_components(pca, config.energy_threshold),
                             1, pca.n_components());

    write_json_file(fs::path(opts.out_dir) / "pca.json", to_json(pca));
    {
        std::vector<std::string> header = {"capture_id", "label"};
        for (int i = 1; i <= d; ++i) header.push_back("score" + std::to_string(i));
        CsvWriter w(fs::path(opts.out_dir) / "scores.csv", header);
        for (size_t i = 0; i < csi.size(); ++i) {
            FeatureVector fv = project(pca, features[i], d);
            std::vector<std::string> cells = {std::to_string(csi[i].capture_id),
                                              std::to_string(class_id(csi[i].scene.vehicle))};
            for (int k = 0; k < d; ++k) cells.push_back(fmt_double(fv.scores[k]));
            w.row(cells);
        }
    }
    std::cout << "selected d=" << d << " components\n";
    return 0;
}

int cmd_detect(const CommonOpts& opts) {
    const ExperimentConfig config = load_config(opts);
    const RunArtifacts art = run_detection_experiment(config, opts.out_dir);
    const auto report = read_json_file(art.eval_report);
    std::cout << "detection: d=" << report.at("d") << " test_error="
              << report.at("test_error") << " min_sweep_error_percent="
              << report.at("min_sweep_error_percent") << "\n";
    return 0;
}

int cmd_classify(const CommonOpts& opts) {
    CommonOpts o = opts;
    if (o.config_path.empty()) o.preset = "classification";
    const ExperimentConfig config = load_config(o);
    const RunArtifacts art = run_classification_experiment(config, o.out_dir);
    const auto report = read_json_file(art.eval_report);
    std::cout << "classification: accuracy=" << report.at("accuracy")
              << " far=" << report.at("far") << " frr=" << report.at("frr") << "\n";
    return 0;
}

int cmd_report(const CommonOpts& opts) {
    CommonOpts o = opts;
    if (o.config_path.empty()) o.preset = "classification";
    ExperimentConfig config = load_config(o);
    fs::create_directories(o.out_dir);

    const auto csi = compute_csi(config);
    const std::vector<SplitSpec> splits = {{200, 250}, {500, 500}, {500, 750}};

    std::vector<std::string> header = {"train_per_class", "test_per_class",
                                       "accuracy_percent"};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            header.push_back("m" + std::to_string(r) + std::to_string(c));
    header.push_back("frr");
    header.push_back("far");
    CsvWriter w(fs::path(o.out_dir) / "report.csv", header);
    for (const SplitSpec& split : splits) {
        const ClassificationResult res = classification_eval(config, csi, split);
        std::vector<std::string> cells = {std::to_string(split.train_per_class),
                                          std::to_string(split.test_per_class),
                                          fmt_double(100.0 * res.report.accuracy)};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                cells.push_back(std::to_string(res.report.matrix.counts[r][c]));
        cells.push_back(fmt_double(res.report.frr));
        cells.push_back(fmt_double(res.report.far));
        w.row(cells);
        std::cout << "split " << split.train_per_class << "/" << split.test_per_class
                  << ": accuracy=" << res.report.accuracy << "\n";
    }
    return 0;
}

int cmd_ingest(const std::string& in_bin, const std::string& sidecar,
               const std::string& reexport_dir) {
    const auto obs = ingest_captures(in_bin, sidecar);
    std::cout << "ingested " << obs.size() << " observations\n";
    if (!reexport_dir.empty()) {
        fs::create_directories(reexport_dir);
        if (!obs.empty())
            export_dataset(obs, obs.front().grid_ref, fs::path(reexport_dir) / "dataset.bin",
                           fs::path(reexport_dir) / "dataset.json");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Passive LTE pilot sensing: synthetic datasets, CSI estimation, "
                 "PCA features, threshold detection and 1-NN classification"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string in_bin, sidecar, estimator, csi_path, reexport_dir, stage;

    auto* gen = app.add_subcommand("gen", "Generate a synthetic pilot dataset");
    add_common(gen, opts);

    auto* estimate = app.add_subcommand("estimate", "Estimate CSI from a dataset");
    add_common(estimate, opts);
    estimate->add_option("--in", in_bin, "Dataset binary")->required();
    estimate->add_option("--sidecar", sidecar, "Dataset sidecar JSON")->required();
    estimate->add_option("--estimator", estimator, "ls|mmse");

    auto* features = app.add_subcommand("features", "Fit PCA on a CSI CSV");
    add_common(features, opts);
    features->add_option("--csi", csi_path, "CSI CSV")->required();

    auto* detect = app.add_subcommand("detect", "Run the detection experiment");
    add_common(detect, opts);

    auto* classify = app.add_subcommand("classify", "Run the classification experiment");
    add_common(classify, opts);

    auto* report = app.add_subcommand("report", "Classification report over standard splits");
    add_common(report, opts);

    auto* ingest = app.add_subcommand("ingest", "Validate and ingest a captured dataset");
    ingest->add_option("--in", in_bin, "Dataset binary")->required();
    ingest->add_option("--sidecar", sidecar, "Dataset sidecar JSON")->required();
    ingest->add_option("--reexport", reexport_dir, "Re-export to this directory");

    auto* run = app.add_subcommand("run", "Run one pipeline stage by name");
    add_common(run, opts);
    run->add_option("--stage", stage, "gen|detect|classify|report")->required();

    CLI11_PARSE(app, argc, argv);

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (cmd == "gen") return cmd_gen(opts);
        if (cmd == "estimate") return cmd_estimate(opts, in_bin, sidecar, estimator);
        if (cmd == "features") return cmd_features(opts, csi_path);
        if (cmd == "detect") return cmd_detect(opts);
        if (cmd == "classify") return cmd_classify(opts);
        if (cmd == "report") return cmd_report(opts);
        if (cmd == "ingest") return cmd_ingest(in_bin, sidecar, reexport_dir);
        if (cmd == "run") {
            if (stage == "gen") return cmd_gen(opts);
            if (stage == "detect") return cmd_detect(opts);
            if (stage == "classify") return cmd_classify(opts);
            if (stage == "report") return cmd_report(opts);
            throw ConfigError("run: unknown stage '" + stage + "'");
        }
    } catch (const std::exception& e) {
        std::cerr << "[" << cmd << "] error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
