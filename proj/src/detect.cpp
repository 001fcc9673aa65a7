#include "commsense/detect.hpp"

#include <algorithm>
#include <limits>

namespace commsense {

namespace {

std::vector<double> statistics_of(const std::vector<FeatureVector>& fvs) {
    std::vector<double> out;
    out.reserve(fvs.size());
    for (const FeatureVector& fv : fvs) out.push_back(statistic(fv));
    return out;
}

bool is_vehicle(double stat, double threshold, Polarity polarity) {
    return polarity == Polarity::LessIsVehicle ? stat <= threshold : stat >= threshold;
}

double error_percent(double threshold, Polarity polarity,
                     const std::vector<double>& with_stats,
                     const std::vector<double>& without_stats) {
    long wrong = 0;
    for (double s : with_stats)
        if (!is_vehicle(s, threshold, polarity)) ++wrong;
    for (double s : without_stats)
        if (is_vehicle(s, threshold, polarity)) ++wrong;
    return 100.0 * static_cast<double>(wrong) /
           static_cast<double>(with_stats.size() + without_stats.size());
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

struct SweepResult {
    ErrorCurve curve;
    Polarity polarity;
    double min_error = 100.0;
    double best_threshold = 0.0;
};

SweepResult sweep_impl(const std::vector<FeatureVector>& with_vehicle,
                       const std::vector<FeatureVector>& without, int n_thresholds) {
    if (with_vehicle.empty() || without.empty())
        throw InsufficientDataError("detect: both classes must be nonempty");
    if (n_thresholds < 1)
        throw RangeError("detect: n_thresholds must be positive");

    const std::vector<double> ws = statistics_of(with_vehicle);
    const std::vector<double> os = statistics_of(without);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double s : ws) { lo = std::min(lo, s); hi = std::max(hi, s); }
    for (double s : os) { lo = std::min(lo, s); hi = std::max(hi, s); }

    const std::vector<double> thresholds = linspace(lo, hi, n_thresholds);

    SweepResult best;
    bool first = true;
    for (Polarity pol : {Polarity::LessIsVehicle, Polarity::GreaterIsVehicle}) {
        ErrorCurve curve;
        curve.thresholds = thresholds;
        curve.error_percent.reserve(thresholds.size());
        double min_err = std::numeric_limits<double>::infinity();
        double best_thr = thresholds.front();
        for (double t : thresholds) {
            const double err = error_percent(t, pol, ws, os);
            curve.error_percent.push_back(err);
            if (err < min_err) {  // strict: ties keep the smallest threshold
                min_err = err;
                best_thr = t;
            }
        }
        if (first || min_err < best.min_error) {
            best = {std::move(curve), pol, min_err, best_thr};
            first = false;
        }
    }
    return best;
}

} // namespace

double statistic(const FeatureVector& fv) {
    if (fv.scores.size() == 0)
        throw EmptyInputError("detect: feature vector has no scores");
    return fv.scores.mean();
}

double error_percent_at(double threshold, Polarity polarity,
                        const std::vector<FeatureVector>& with_vehicle,
                        const std::vector<FeatureVector>& without) {
    if (with_vehicle.empty() || without.empty())
        throw InsufficientDataError("detect: both classes must be nonempty");
    return error_percent(threshold, polarity, statistics_of(with_vehicle),
                         statistics_of(without));
}

ErrorCurve sweep(const std::vector<FeatureVector>& with_vehicle,
                 const std::vector<FeatureVector>& without, int n_thresholds) {
    return sweep_impl(with_vehicle, without, n_thresholds).curve;
}

DetectorModel fit_threshold(const std::vector<FeatureVector>& with_vehicle,
                            const std::vector<FeatureVector>& without, int d) {
    for (const auto* cls : {&with_vehicle, &without})
        for (const FeatureVector& fv : *cls)
            if (fv.scores.size() != d)
                throw ShapeError("detect: score length does not match component count");

    const SweepResult res = sweep_impl(with_vehicle, without, 512);
    DetectorModel model;
    model.d = d;
    model.threshold = res.best_threshold;
    model.polarity = res.polarity;
    model.training_error = res.min_error / 100.0;
    return model;
}

bool detect(const DetectorModel& model, const FeatureVector& fv) {
    if (fv.scores.size() != model.d)
        throw ShapeError("detect: score length does not match detector dimension");
    return is_vehicle(statistic(fv), model.threshold, model.polarity);
}

std::vector<HistogramBin> histogram(const std::vector<FeatureVector>& features, int n_bins) {
    if (features.empty())
        throw EmptyInputError("detect: histogram of empty input");
    if (n_bins < 1)
        throw RangeError("detect: n_bins must be positive");

    const std::vector<double> stats = statistics_of(features);
    const auto [lo_it, hi_it] = std::minmax_element(stats.begin(), stats.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = (hi - lo) / n_bins;

    std::vector<HistogramBin> bins(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        bins[b].low = lo + b * width;
        bins[b].high = lo + (b + 1) * width;
    }
    bins.back().high = hi;
    for (double s : stats) {
        int b = width > 0.0 ? static_cast<int>((s - lo) / width) : 0;
        b = std::clamp(b, 0, n_bins - 1);  // top edge is closed
        ++bins[b].count;
    }
    return bins;
}

} // namespace commsense
