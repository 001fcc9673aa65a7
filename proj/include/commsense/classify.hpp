#pragma once

#include <vector>

#include "commsense/pca.hpp"

namespace commsense {

// 1-nearest-neighbor model over principal-component features. Class ids:
// 0 = empty road, 1 = two-wheeler, 2 = sedan, 3 = SUV.
struct NnModel {
    std::vector<FeatureVector> training;
    int n_classes = 4;

    static NnModel fit(std::vector<FeatureVector> training, int n_classes = 4);
};

struct ConfusionMatrix {
    std::vector<std::vector<long>> counts;  // rows = true, cols = predicted

    int n_classes() const { return static_cast<int>(counts.size()); }
    long total() const;
    long trace() const;
};

struct EvalReport {
    double accuracy = 0.0;
    double far = 0.0;
    double frr = 0.0;
    ConfusionMatrix matrix;
};

double l1_distance(const VectorXd& a, const VectorXd& b);

// Label of the minimum-L1 training point; exact-distance ties resolve to
// the lowest training index.
int predict(const NnModel& model, const FeatureVector& fv);

ConfusionMatrix confusion(const NnModel& model, const std::vector<FeatureVector>& test);

double accuracy(const ConfusionMatrix& cm);

// Impostor class is the empty road (class 0); acceptance is any vehicle
// prediction, rejection is a vehicle sample predicted as empty road.
double far(const ConfusionMatrix& cm);
double frr(const ConfusionMatrix& cm);

EvalReport evaluate(const NnModel& model, const std::vector<FeatureVector>& test);

} // namespace commsense
