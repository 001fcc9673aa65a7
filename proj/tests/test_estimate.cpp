#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "commsense/estimate.hpp"
#include "commsense/rng.hpp"

using namespace commsense;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

const PilotGrid& grid10() {
    static const PilotGrid grid = build_pilot_grid({60, 6, 4, 21});
    return grid;
}

SceneConfig quiet_scene(std::uint64_t seed = 3) {
    SceneConfig s;
    s.background_id = 1;
    s.seed = seed;
    s.n_captures = 1;
    return s;
}

// Random channel with known unit covariance per subcarrier; the matched
// prior for the Monte-Carlo comparisons below.
ChannelRealization random_channel(const PilotGrid& grid, std::uint64_t seed) {
    Rng rng(seed);
    ChannelRealization ch;
    ch.scene = quiet_scene(seed);
    ch.gains.resize(grid.n_pilots());
    for (int p = 0; p < grid.n_pilots(); ++p) ch.gains[p] = rng.cgauss();
    return ch;
}

MmsePrior unit_prior(double r_scale, int n_symbols, double sigma) {
    MmsePrior prior;
    prior.R = r_scale * MatrixXcd::Identity(1, 1);
    prior.S = sigma * sigma * MatrixXcd::Identity(n_symbols, n_symbols);
    return prior;
}

} // namespace

TEST_CASE("scalar LS is a direct division") {
    MatrixXcd y(1, 1), p(1, 1);
    y << cdouble{2.0, 0.0};
    p << cdouble{1.0, 0.0};
    CHECK(ls_solve(y, p)(0, 0) == cdouble{2.0, 0.0});
}

TEST_CASE("noiseless LS recovers the channel exactly") {
    const auto ch = random_channel(grid10(), 17);
    const auto obs = observe(ch, grid10(), kInf, 0);
    const CsiVector csi = estimate_ls(obs, grid10());
    CHECK(csi.estimator == EstimatorKind::LS);
    CHECK((csi.gains - ch.gains).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("unit-modulus pilots reduce LS to the pilot-matched average") {
    const auto ch = random_channel(grid10(), 23);
    const auto obs = observe(ch, grid10(), 10.0, 9);
    const CsiVector csi = estimate_ls(obs, grid10());
    for (int p = 0; p < grid10().n_pilots(); ++p) {
        const cdouble matched =
            (obs.received.row(p) * grid10().symbols.row(p).adjoint())(0, 0) / 4.0;
        CHECK(std::abs(csi.gains[p] - matched) < 1e-12);
    }
}

TEST_CASE("LS is linear in the observation") {
    const auto ch = random_channel(grid10(), 29);
    auto obs = observe(ch, grid10(), 10.0, 5);
    const CsiVector base = estimate_ls(obs, grid10());
    const cdouble alpha{2.5, -1.0};
    obs.received *= alpha;
    const CsiVector scaled = estimate_ls(obs, grid10());
    for (int p = 0; p < grid10().n_pilots(); ++p)
        CHECK(std::abs(scaled.gains[p] - alpha * base.gains[p]) <
              1e-13 * std::abs(base.gains[p]));
}

TEST_CASE("rank-deficient pilots raise a singular-system error") {
    CHECK_THROWS_AS(ls_solve(MatrixXcd::Ones(1, 4), MatrixXcd::Zero(1, 4)),
                    SingularSystemError);

    PilotGrid broken = grid10();
    broken.symbols.row(3).setZero();
    const auto obs = observe(random_channel(grid10(), 1), grid10(), kInf, 0);
    try {
        estimate_ls(obs, broken);
        FAIL("expected SingularSystemError");
    } catch (const SingularSystemError& e) {
        CHECK(std::string(e.what()).find(std::to_string(broken.pilot_indices[3])) !=
              std::string::npos);
    }
}

TEST_CASE("uninformative prior makes MMSE match LS") {
    const auto ch = random_channel(grid10(), 31);
    const auto obs = observe(ch, grid10(), 0.0, 7);
    const CsiVector ls = estimate_ls(obs, grid10());
    const CsiVector mmse =
        estimate_mmse(obs, grid10(), unit_prior(1e9, 4, obs.noise_sigma));
    CHECK(mmse.estimator == EstimatorKind::MMSE);
    CHECK((mmse.gains - ls.gains).norm() / ls.gains.norm() < 1e-4);
}

TEST_CASE("zero observation gives zero posterior mean") {
    auto obs = observe(random_channel(grid10(), 37), grid10(), 10.0, 3);
    obs.received.setZero();
    const CsiVector mmse = estimate_mmse(obs, grid10(), unit_prior(1.0, 4, 0.5));
    CHECK(mmse.gains.norm() == 0.0);
}

TEST_CASE("a vanishing prior shrinks the estimate to zero") {
    const auto ch = random_channel(grid10(), 41);
    const auto obs = observe(ch, grid10(), 10.0, 11);
    const CsiVector ls = estimate_ls(obs, grid10());
    const CsiVector shrunk =
        estimate_mmse(obs, grid10(), unit_prior(1e-9, 4, obs.noise_sigma));
    CHECK(shrunk.gains.norm() <= 1e-3 * ls.gains.norm());
}

TEST_CASE("invalid priors are rejected") {
    MmsePrior prior = unit_prior(1.0, 4, 1.0);
    prior.R(0, 0) = {1.0, 0.5};  // not Hermitian for a 1x1 means complex diagonal
    CHECK_THROWS_AS(prior.validate(), PriorError);

    prior = unit_prior(1.0, 4, 1.0);
    prior.S(0, 0) = -1.0;
    CHECK_THROWS_AS(prior.validate(), PriorError);

    const auto obs = observe(random_channel(grid10(), 2), grid10(), 10.0, 2);
    MmsePrior bad = unit_prior(1.0, 3, 1.0);  // S sized for the wrong N
    CHECK_THROWS_AS(estimate_mmse(obs, grid10(), bad), ShapeError);
}

TEST_CASE("matched-prior MMSE beats LS at 0 dB") {
    const int trials = 1000;
    double mse_ls = 0.0, mse_mmse = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto ch = random_channel(grid10(), 1000 + t);
        const auto obs = observe(ch, grid10(), 0.0, 5000 + t);
        const MmsePrior prior = unit_prior(1.0, 4, obs.noise_sigma);
        mse_ls += (estimate_ls(obs, grid10()).gains - ch.gains).squaredNorm();
        mse_mmse += (estimate_mmse(obs, grid10(), prior).gains - ch.gains).squaredNorm();
    }
    CHECK(mse_mmse <= mse_ls);
}

TEST_CASE("LS error halves as the pilot count doubles") {
    auto mse_for = [](int n_symbols) {
        const PilotGrid grid = build_pilot_grid({60, 6, n_symbols, 21});
        double mse = 0.0;
        const int trials = 4000;
        for (int t = 0; t < trials; ++t) {
            const auto ch = random_channel(grid, 100 + t);
            const auto obs = observe(ch, grid, 0.0, 900 + t);
            mse += (estimate_ls(obs, grid).gains - ch.gains).squaredNorm();
        }
        return mse / trials;
    };
    const double m2 = mse_for(2), m4 = mse_for(4), m8 = mse_for(8);
    CHECK(std::abs(m4 / m2 - 0.5) < 0.1);
    CHECK(std::abs(m8 / m4 - 0.5) < 0.1);
}

TEST_CASE("full-matrix MMSE agrees with the per-subcarrier block solve") {
    // Two stacked subcarriers with a block-diagonal prior must reproduce
    // two independent scalar solves.
    Rng rng(55);
    MatrixXcd p1(1, 3), p2(1, 3), y1(1, 3), y2(1, 3);
    for (int i = 0; i < 3; ++i) {
        p1(0, i) = rng.cgauss();
        p2(0, i) = rng.cgauss();
        y1(0, i) = rng.cgauss();
        y2(0, i) = rng.cgauss();
    }
    const MmsePrior scalar = unit_prior(2.0, 3, 0.7);
    const cdouble h1 = mmse_solve(y1, p1, scalar)(0, 0);
    const cdouble h2 = mmse_solve(y2, p2, scalar)(0, 0);

    // Stacked system: H is 2x2 diagonal-by-construction is not expressible
    // directly, so stack as a 2-rx system with block pilots.
    MatrixXcd P = MatrixXcd::Zero(2, 6), Y = MatrixXcd::Zero(2, 6);
    P.block(0, 0, 1, 3) = p1;
    P.block(1, 3, 1, 3) = p2;
    Y.block(0, 0, 1, 3) = y1;
    Y.block(1, 3, 1, 3) = y2;
    // This layout couples the two channels through a 2x2 vec(H); keep the
    // prior block diagonal and check the diagonal entries match.
    MmsePrior big;
    big.R = 2.0 * MatrixXcd::Identity(4, 4);
    big.S = 0.49 * MatrixXcd::Identity(12, 12);
    const MatrixXcd H = mmse_solve(Y, P, big);
    CHECK(std::abs(H(0, 0) - h1) < 1e-10);
    CHECK(std::abs(H(1, 1) - h2) < 1e-10);
}

TEST_CASE("dataset estimation preserves order and labels") {
    CHECK(estimate_dataset({}, EstimatorKind::LS, grid10()).empty());

    SceneConfig scene = quiet_scene(61);
    scene.n_captures = 20;
    const auto data = generate_dataset({scene}, grid10());
    const auto csi = estimate_dataset(data, EstimatorKind::MMSE, grid10());
    REQUIRE(csi.size() == 20);
    for (size_t i = 0; i < csi.size(); ++i) {
        CHECK(csi[i].capture_id == data[i].capture_id);
        CHECK(csi[i].scene == scene);
    }

    auto mixed = data;
    mixed[3].grid_ref.pilot_spacing = 3;
    CHECK_THROWS_AS(estimate_dataset(mixed, EstimatorKind::LS, grid10()), ShapeError);
}
