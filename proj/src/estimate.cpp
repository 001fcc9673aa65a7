#include "commsense/estimate.hpp"

#include <string>

namespace commsense {

namespace {

MatrixXcd mmse_solve_unchecked(const MatrixXcd& Y, const MatrixXcd& P,
                               const MatrixXcd& R, const MatrixXcd& S) {
    const auto n_rx = Y.rows();
    const auto n_tx = P.rows();
    if (Y.cols() != P.cols())
        throw ShapeError("mmse: Y and P symbol counts differ");
    if (R.rows() != n_rx * n_tx)
        throw ShapeError("mmse: prior R dimension does not match vec(H)");
    if (S.rows() != n_rx * Y.cols())
        throw ShapeError("mmse: prior S dimension does not match vec(Y)");

    const MatrixXcd A = kron(P.transpose(), MatrixXcd::Identity(n_rx, n_rx));
    const Eigen::Map<const VectorXcd> vec_y(Y.data(), Y.size());

    const MatrixXcd s_inv_a = S.llt().solve(A);
    const MatrixXcd lhs = R.inverse() + A.adjoint() * s_inv_a;
    const VectorXcd vec_h = lhs.llt().solve(s_inv_a.adjoint() * vec_y);

    return Eigen::Map<const MatrixXcd>(vec_h.data(), n_rx, n_tx);
}

void check_hermitian_pd(const MatrixXcd& M, const char* name) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw PriorError(std::string("prior: ") + name + " must be square and nonempty");
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw PriorError(std::string("prior: ") + name + " is not Hermitian within 1e-10");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw PriorError(std::string("prior: ") + name + " is not positive definite");
}

} // namespace

void MmsePrior::validate() const {
    check_hermitian_pd(R, "R");
    check_hermitian_pd(S, "S");
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

MatrixXcd ls_solve(const MatrixXcd& Y, const MatrixXcd& P) {
    if (Y.cols() != P.cols())
        throw ShapeError("ls: Y and P symbol counts differ");
    const MatrixXcd gram = P * P.adjoint();
    Eigen::FullPivLU<MatrixXcd> lu(gram);
    if (!lu.isInvertible())
        throw SingularSystemError("ls: pilot matrix is rank deficient");
    return Y * P.adjoint() * lu.inverse();
}

MatrixXcd mmse_solve(const MatrixXcd& Y, const MatrixXcd& P, const MmsePrior& prior) {
    prior.validate();
    return mmse_solve_unchecked(Y, P, prior.R, prior.S);
}

CsiVector estimate_ls(const PilotObservation& obs, const PilotGrid& grid) {
    if (!(obs.grid_ref == grid.config) || obs.received.rows() != grid.n_pilots() ||
        obs.received.cols() != grid.n_symbols())
        throw ShapeError("ls: observation does not match the pilot grid");

    CsiVector csi;
    csi.estimator = EstimatorKind::LS;
    csi.scene = obs.scene;
    csi.capture_id = obs.capture_id;
    csi.gains.resize(grid.n_pilots());
    for (int p = 0; p < grid.n_pilots(); ++p) {
        try {
            csi.gains[p] = ls_solve(obs.received.row(p), grid.symbols.row(p))(0, 0);
        } catch (const SingularSystemError&) {
            throw SingularSystemError("ls: rank-deficient pilots at subcarrier index " +
                                      std::to_string(grid.pilot_indices[p]));
        }
    }
    return csi;
}

CsiVector estimate_mmse(const PilotObservation& obs, const PilotGrid& grid,
                        const MmsePrior& prior) {
    if (!(obs.grid_ref == grid.config) || obs.received.rows() != grid.n_pilots() ||
        obs.received.cols() != grid.n_symbols())
        throw ShapeError("mmse: observation does not match the pilot grid");
    prior.validate();

    CsiVector csi;
    csi.estimator = EstimatorKind::MMSE;
    csi.scene = obs.scene;
    csi.capture_id = obs.capture_id;
    csi.gains.resize(grid.n_pilots());
    // Per-subcarrier block-diagonal prior: R and S are shared across the
    // scalar per-subcarrier systems.
    for (int p = 0; p < grid.n_pilots(); ++p)
        csi.gains[p] =
            mmse_solve_unchecked(obs.received.row(p), grid.symbols.row(p), prior.R, prior.S)(0, 0);
    return csi;
}

MmsePrior default_pilot_prior(int n_symbols, double noise_sigma) {
    // Clamp the noise floor so a noiseless capture still yields a valid S.
    const double sigma = std::max(noise_sigma, 1e-6);
    MmsePrior prior;
    prior.R = MatrixXcd::Identity(1, 1);
    prior.S = sigma * sigma * MatrixXcd::Identity(n_symbols, n_symbols);
    return prior;
}

std::vector<CsiVector> estimate_dataset(const std::vector<PilotObservation>& observations,
                                        EstimatorKind kind, const PilotGrid& grid,
                                        const std::optional<MmsePrior>& prior) {
    std::vector<CsiVector> out;
    out.reserve(observations.size());
    for (const PilotObservation& obs : observations) {
        if (!(obs.grid_ref == grid.config))
            throw ShapeError("estimate: mixed grids in observation list");
        if (kind == EstimatorKind::LS) {
            out.push_back(estimate_ls(obs, grid));
        } else if (prior.has_value()) {
            out.push_back(estimate_mmse(obs, grid, *prior));
        } else {
            out.push_back(estimate_mmse(obs, grid,
                                        default_pilot_prior(grid.n_symbols(), obs.noise_sigma)));
        }
    }
    return out;
}

} // namespace commsense
