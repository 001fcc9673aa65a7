#pragma once

#include <vector>

#include "commsense/common.hpp"
#include "commsense/estimate.hpp"

namespace commsense {

enum class FeatureMap { Magnitude, SquaredMagnitude, LogMagnitude };

struct PcaModel {
    VectorXd mean;
    VectorXd eigenvalues;    // descending, clamped at zero below 1e-12
    MatrixXd eigenvectors;   // orthonormal columns, one per eigenvalue
    VectorXd energy_fractions;

    int n_components() const { return static_cast<int>(eigenvalues.size()); }
};

struct FeatureVector {
    VectorXd scores;
    int label = 0;
    int capture_id = 0;
};

VectorXd csi_to_real(const CsiVector& csi, FeatureMap map = FeatureMap::Magnitude);

PcaModel fit_pca(const std::vector<VectorXd>& features);

// Smallest d whose cumulative energy reaches the threshold.
int select_components(const PcaModel& model, double energy_threshold);

FeatureVector project(const PcaModel& model, const VectorXd& feature, int d);

} // namespace commsense
