#pragma once

#include <vector>

#include "commsense/pca.hpp"

namespace commsense {

enum class Polarity { LessIsVehicle, GreaterIsVehicle };

struct DetectorModel {
    int d = 1;
    double threshold = 0.0;
    Polarity polarity = Polarity::LessIsVehicle;
    double training_error = 0.0;  // fraction in [0, 1]
};

struct ErrorCurve {
    std::vector<double> thresholds;     // ascending
    std::vector<double> error_percent;  // [0, 100]
};

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    long count = 0;
};

// Decision statistic: mean of the principal-component scores.
double statistic(const FeatureVector& fv);

// Error percentage of the threshold rule at one operating point. A
// statistic exactly on the threshold counts as vehicle-present.
double error_percent_at(double threshold, Polarity polarity,
                        const std::vector<FeatureVector>& with_vehicle,
                        const std::vector<FeatureVector>& without);

ErrorCurve sweep(const std::vector<FeatureVector>& with_vehicle,
                 const std::vector<FeatureVector>& without, int n_thresholds);

DetectorModel fit_threshold(const std::vector<FeatureVector>& with_vehicle,
                            const std::vector<FeatureVector>& without, int d);

bool detect(const DetectorModel& model, const FeatureVector& fv);

std::vector<HistogramBin> histogram(const std::vector<FeatureVector>& features, int n_bins);

} // namespace commsense
