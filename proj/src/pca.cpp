#include "commsense/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace commsense {

VectorXd csi_to_real(const CsiVector& csi, FeatureMap map) {
    VectorXd out(csi.gains.size());
    for (Eigen::Index i = 0; i < csi.gains.size(); ++i) {
        const double mag = std::abs(csi.gains[i]);
        switch (map) {
            case FeatureMap::Magnitude: out[i] = mag; break;
            case FeatureMap::SquaredMagnitude: out[i] = mag * mag; break;
            case FeatureMap::LogMagnitude: out[i] = std::log(std::max(mag, 1e-300)); break;
        }
    }
    return out;
}

PcaModel fit_pca(const std::vector<VectorXd>& features) {
    const auto n = static_cast<Eigen::Index>(features.size());
    if (n < 2)
        throw InsufficientDataError("pca: need at least 2 samples");
    const Eigen::Index dim = features[0].size();
    for (const VectorXd& f : features)
        if (f.size() != dim)
            throw ShapeError("pca: ragged feature lengths");

    MatrixXd x(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = features[static_cast<size_t>(i)];

    PcaModel model;
    model.mean = x.colwise().mean();
    x.rowwise() -= model.mean.transpose();
    const MatrixXd cov = x.transpose() * x / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
    if (es.info() != Eigen::Success)
        throw ShapeError("pca: eigendecomposition failed");

    // Solver returns ascending order; flip to descending. Equal eigenvalues
    // keep their original (ascending-index) order, which after the flip is a
    // deterministic tie break.
    model.eigenvalues.resize(dim);
    model.eigenvectors.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Eigen::Index src = dim - 1 - i;
        double lambda = es.eigenvalues()[src];
        if (lambda < 1e-12) lambda = 0.0;
        model.eigenvalues[i] = lambda;
        VectorXd v = es.eigenvectors().col(src);
        // Sign convention: largest-magnitude entry nonnegative.
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) v = -v;
        model.eigenvectors.col(i) = v;
    }

    const double total = model.eigenvalues.sum();
    model.energy_fractions =
        total > 0.0 ? VectorXd(model.eigenvalues / total) : VectorXd(VectorXd::Zero(dim));
    return model;
}

int select_components(const PcaModel& model, double energy_threshold) {
    int nonzero = 0;
    for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i)
        if (model.eigenvalues[i] > 0.0) ++nonzero;
    if (nonzero == 0) return 0;
    if (energy_threshold >= 1.0) return nonzero;

    double cum = 0.0;
    for (int i = 0; i < nonzero; ++i) {
        cum += model.energy_fractions[i];
        if (cum >= energy_threshold) return i + 1;
    }
    return nonzero;
}

FeatureVector project(const PcaModel& model, const VectorXd& feature, int d) {
    if (d < 1 || d > model.n_components())
        throw RangeError("pca: component count out of range");
    if (feature.size() != model.mean.size())
        throw ShapeError("pca: feature length does not match model");
    FeatureVector fv;
    fv.scores = model.eigenvectors.leftCols(d).transpose() * (feature - model.mean);
    return fv;
}

} // namespace commsense
