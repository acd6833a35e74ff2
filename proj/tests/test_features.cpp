#include "dmk/errors.hpp"
#include "dmk/features.hpp"

#include <doctest.h>

#include <random>

using namespace dmk;

namespace {

TimeSeries random_series(Eigen::Index t, Eigen::Index m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TimeSeries out;
    out.dt = 1.0;
    out.values.resize(t, m);
    for (Eigen::Index i = 0; i < out.values.size(); ++i)
        out.values(i) = gauss(rng);
    return out;
}

} // namespace

TEST_CASE("sliding_covariance on a constant series is identically zero") {
    TimeSeries z;
    z.values = Matrix::Constant(20, 2, 3.5);
    const LocalCovariances c = sliding_covariance(z, 6);
    REQUIRE(c.cov.size() == 20);
    for (const auto& m : c.cov)
        CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& m : c.pinv)
        CHECK(m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sliding_covariance center window matches the population formula") {
    TimeSeries z;
    z.values.resize(3, 1);
    z.values << 0.0, 2.0, 4.0;
    const LocalCovariances c = sliding_covariance(z, 3);
    CHECK(c.cov[1](0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("sliding_covariance truncates windows at the boundary") {
    const TimeSeries z = random_series(40, 2, 21);
    const LocalCovariances c = sliding_covariance(z, 30);
    // At n = 0 only samples 0..14 are available (n + ceil(w/2) - 1).
    const auto block = z.values.topRows(15);
    const Eigen::RowVectorXd mean = block.colwise().mean();
    const Matrix centered = block.rowwise() - mean;
    const Matrix expected = (centered.transpose() * centered) / 15.0;
    CHECK((c.cov[0] - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sliding_covariance validates the window") {
    const TimeSeries z = random_series(10, 2, 22);
    CHECK_THROWS_AS(sliding_covariance(z, 1), InvalidInput);
    CHECK_THROWS_AS(sliding_covariance(z, 11), InvalidInput);
}

TEST_CASE("sliding_covariance outputs are PSD") {
    const TimeSeries z = random_series(200, 3, 23);
    const LocalCovariances c = sliding_covariance(z, 30);
    for (const auto& m : c.cov) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("mahalanobis basic identities") {
    const Vector a = Vector{{1.0, 2.0}};
    CHECK(mahalanobis(a, a, Matrix::Identity(2, 2), Matrix::Identity(2, 2)) == 0.0);

    const Vector zs = Vector{{0.0, 0.0}};
    const Vector zt = Vector{{3.0, 4.0}};
    CHECK(mahalanobis(zs, zt, Matrix::Identity(2, 2), Matrix::Identity(2, 2)) ==
          doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("mahalanobis matches the expanded quadratic form and is symmetric") {
    std::mt19937_64 rng(24);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        Vector zs(3), zt(3);
        Matrix a(3, 3), b(3, 3);
        for (int i = 0; i < 3; ++i) {
            zs(i) = gauss(rng);
            zt(i) = gauss(rng);
        }
        for (Eigen::Index i = 0; i < 9; ++i) {
            a(i) = gauss(rng);
            b(i) = gauss(rng);
        }
        const Matrix ca = a * a.transpose();
        const Matrix cb = b * b.transpose();
        const Vector d = zs - zt;
        const double expected = std::sqrt(0.5 * d.dot((ca + cb) * d));
        CHECK(mahalanobis(zs, zt, ca, cb) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(mahalanobis(zs, zt, ca, cb) == mahalanobis(zt, zs, cb, ca));
    }
}

TEST_CASE("mahalanobis with analytic covariances recovers the state distance") {
    // z = A theta with local covariance A (sigma^2 I) A^T gives
    // mahalanobis(z_s, z_t) = |theta_s - theta_t| / sigma.
    std::mt19937_64 rng(25);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(3, 3);
    do {
        for (Eigen::Index i = 0; i < 9; ++i)
            a(i) = gauss(rng);
    } while (std::abs(a.determinant()) < 0.1);
    const double sigma = 0.7;
    const Matrix pinv = (sigma * sigma * a * a.transpose()).inverse();
    for (int rep = 0; rep < 5; ++rep) {
        Vector ts(3), tt(3);
        for (int i = 0; i < 3; ++i) {
            ts(i) = gauss(rng);
            tt(i) = gauss(rng);
        }
        const double got = mahalanobis(a * ts, a * tt, pinv, pinv);
        CHECK(got == doctest::Approx((ts - tt).norm() / sigma).epsilon(1e-10));
    }
}

TEST_CASE("mahalanobis rejects dimension mismatches") {
    CHECK_THROWS_AS(mahalanobis(Vector::Zero(2), Vector::Zero(3), Matrix::Identity(2, 2),
                                Matrix::Identity(2, 2)),
                    InvalidInput);
}

TEST_CASE("parallel and serial pairwise distances are bitwise identical") {
    const TimeSeries z = random_series(120, 3, 26);
    const LocalCovariances c = sliding_covariance(z, 20);
    const Matrix par = pairwise_mahalanobis(z, c);
    const Matrix ser = pairwise_mahalanobis_serial(z, c);
    CHECK((par - ser).cwiseAbs().maxCoeff() == 0.0);
    CHECK((par - par.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(par.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairwise_euclidean matches direct norms") {
    const TimeSeries z = random_series(15, 2, 27);
    const Matrix d = pairwise_euclidean(z);
    for (Eigen::Index i = 0; i < 15; ++i)
        for (Eigen::Index j = 0; j < 15; ++j)
            CHECK(d(i, j) ==
                  doctest::Approx((z.values.row(i) - z.values.row(j)).norm()).epsilon(1e-14));
}
