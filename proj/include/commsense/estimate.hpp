#pragma once

#include <optional>
#include <vector>

#include "commsense/channel.hpp"
#include "commsense/common.hpp"
#include "commsense/grid.hpp"

namespace commsense {

enum class EstimatorKind { LS, MMSE };

// Bayesian prior for the MMSE estimator: channel covariance R over vec(H)
// and noise covariance S over vec(Y). Both Hermitian positive definite.
struct MmsePrior {
    MatrixXcd R;
    MatrixXcd S;

    void validate() const;  // throws PriorError
};

struct CsiVector {
    VectorXcd gains;
    EstimatorKind estimator = EstimatorKind::LS;
    SceneConfig scene;
    int capture_id = 0;
};

// H = Y P^H (P P^H)^{-1} for Y (n_rx x N), P (n_tx x N).
MatrixXcd ls_solve(const MatrixXcd& Y, const MatrixXcd& P);

// vec(H) = (R^{-1} + A^H S^{-1} A)^{-1} A^H S^{-1} vec(Y) with A = P^T (x) I.
MatrixXcd mmse_solve(const MatrixXcd& Y, const MatrixXcd& P, const MmsePrior& prior);

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);

CsiVector estimate_ls(const PilotObservation& obs, const PilotGrid& grid);
CsiVector estimate_mmse(const PilotObservation& obs, const PilotGrid& grid,
                        const MmsePrior& prior);

// Unit channel prior with white noise of the given sigma; the pipeline
// default when no prior is supplied.
MmsePrior default_pilot_prior(int n_symbols, double noise_sigma);

std::vector<CsiVector> estimate_dataset(const std::vector<PilotObservation>& observations,
                                        EstimatorKind kind, const PilotGrid& grid,
                                        const std::optional<MmsePrior>& prior = std::nullopt);

} // namespace commsense
