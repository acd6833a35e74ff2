#include "dmk/diffusion.hpp"
#include "dmk/errors.hpp"
#include "dmk/eval.hpp"
#include "dmk/features.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

using namespace dmk;

TEST_CASE("median_scale examples") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 1) = d(1, 0) = 1.0;
    d(0, 2) = d(2, 0) = 2.0;
    d(1, 2) = d(2, 1) = 3.0;
    CHECK(median_scale(d) == doctest::Approx(2.0));
    CHECK(median_scale(d, 3.0) == doctest::Approx(6.0));

    Matrix c = Matrix::Constant(4, 4, 0.8);
    c.diagonal().setZero();
    CHECK(median_scale(c) == doctest::Approx(0.8));

    CHECK_THROWS_AS(median_scale(Matrix::Zero(1, 1)), InvalidInput);
    CHECK_THROWS_AS(median_scale(d, 0.0), InvalidInput);
}

TEST_CASE("median_scale with an even entry count averages the middle pair") {
    Matrix d = Matrix::Zero(4, 4);
    const double vals[6] = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    int idx = 0;
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = i + 1; j < 4; ++j) {
            d(i, j) = vals[idx];
            d(j, i) = vals[idx];
            ++idx;
        }
    CHECK(median_scale(d) == doctest::Approx(3.5));
}

TEST_CASE("build_kernel pointwise values") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 1) = d(1, 0) = 2.0;
    d(0, 2) = d(2, 0) = 0.5;
    d(1, 2) = d(2, 1) = 1.7;
    const double eps = 2.0;
    const Matrix k = build_kernel(d, eps);
    CHECK(k(0, 0) == doctest::Approx(1.0));
    CHECK(k(0, 1) == doctest::Approx(std::exp(-1.0)));
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK(k(i, j) == doctest::Approx(std::exp(-d(i, j) * d(i, j) / (eps * eps))));
    CHECK_THROWS_AS(build_kernel(d, 0.0), InvalidInput);
}

TEST_CASE("row_normalize makes rows stochastic") {
    Matrix uniform = Matrix::Ones(2, 2);
    auto [p, degrees] = row_normalize(uniform);
    CHECK(p(0, 0) == doctest::Approx(0.5));
    CHECK(degrees(0) == doctest::Approx(2.0));

    auto [pi, di] = row_normalize(Matrix::Identity(3, 3));
    CHECK((pi - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Matrix k(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i)
        k(i) = unif(rng);
    auto [pr, dr] = row_normalize(k);
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(std::abs(pr.row(i).sum() - 1.0) < 1e-14);

    Matrix neg = Matrix::Ones(2, 2);
    neg(0, 1) = -0.1;
    CHECK_THROWS_AS(row_normalize(neg), InvalidInput);
}

TEST_CASE("embed two-point analytic case") {
    const double a = 0.4;
    Matrix k(2, 2);
    k << 1.0, a, a, 1.0;
    auto [p, degrees] = row_normalize(k);
    const Embedding emb = embed(k, degrees, 1, 1.0);
    CHECK(emb.mu(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(emb.mu(1) == doctest::Approx((1.0 - a) / (1.0 + a)).epsilon(1e-12));
    // psi^(1) proportional to (1, -1), sign convention fixes the first entry.
    CHECK(emb.psi(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(emb.psi(1, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("embed trivial pair and circle recovery") {
    const int n = 300;
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
    Vector truth(n);
    TimeSeries z;
    z.values.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        truth(i) = unif(rng);
        z.values(i, 0) = std::cos(truth(i)) + 0.01 * std::cos(7.0 * truth(i));
        z.values(i, 1) = std::sin(truth(i)) + 0.01 * std::sin(5.0 * truth(i));
    }
    const Matrix d = pairwise_euclidean(z);
    const double eps = median_scale(d);
    const Matrix k = build_kernel(d, eps);
    auto [p, degrees] = row_normalize(k);
    const Embedding emb = embed(k, degrees, 2, eps);

    CHECK(std::abs(emb.mu(0) - 1.0) < 1e-8);
    const double cv = std::sqrt((emb.psi.col(0).array() - emb.psi.col(0).mean()).square().mean()) /
                      std::abs(emb.psi.col(0).mean());
    CHECK(cv < 1e-6);
    CHECK(emb.lambda(0) < 1e-6);
    for (int l = 1; l <= 2; ++l)
        CHECK(emb.lambda(l) >= emb.lambda(l - 1) - 1e-12);

    // The two nontrivial coordinates parameterize the circle: align the
    // recovered angle (orientation and offset) and correlate with the truth.
    Vector recovered(n);
    for (int i = 0; i < n; ++i)
        recovered(i) = std::atan2(emb.psi(i, 2), emb.psi(i, 1));
    double best = 0.0;
    for (const double sign : {1.0, -1.0}) {
        double s = 0.0, c = 0.0;
        for (int i = 0; i < n; ++i) {
            s += std::sin(sign * recovered(i) - truth(i));
            c += std::cos(sign * recovered(i) - truth(i));
        }
        const double offset = std::atan2(s, c);
        Vector aligned(n);
        for (int i = 0; i < n; ++i) {
            double r = sign * recovered(i) - offset - truth(i);
            r = std::remainder(r, 2.0 * M_PI);
            aligned(i) = truth(i) + r;
        }
        best = std::max(best, pearson(aligned, truth));
    }
    CHECK(best > 0.99);
}

TEST_CASE("embed is invariant to sample permutation") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = 60;
    TimeSeries z;
    z.values.resize(n, 2);
    for (Eigen::Index i = 0; i < z.values.size(); ++i)
        z.values(i) = gauss(rng);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i)
        perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    TimeSeries zp;
    zp.values.resize(n, 2);
    for (int i = 0; i < n; ++i)
        zp.values.row(perm[static_cast<size_t>(i)]) = z.values.row(i);

    const double eps = median_scale(pairwise_euclidean(z));
    const Matrix k1 = build_kernel(pairwise_euclidean(z), eps);
    const Matrix k2 = build_kernel(pairwise_euclidean(zp), eps);
    auto [p1, d1] = row_normalize(k1);
    auto [p2, d2] = row_normalize(k2);
    const Embedding e1 = embed(k1, d1, 3, eps);
    const Embedding e2 = embed(k2, d2, 3, eps);

    CHECK((e1.mu - e2.mu).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < n; ++i)
        CHECK((e1.psi.row(i) - e2.psi.row(perm[static_cast<size_t>(i)])).cwiseAbs().maxCoeff() <
              1e-8);
}

TEST_CASE("embed reports a non-positive spectrum") {
    Matrix k(3, 3);
    k << 1.0, 0.99, 0.1, 0.99, 1.0, 0.99, 0.1, 0.99, 1.0;
    auto [p, degrees] = row_normalize(k);
    CHECK_THROWS_AS(embed(k, degrees, 2, 1.0), NumericalDegeneracy);
}

TEST_CASE("rates_from_eigs formula and validation") {
    CHECK(rates_from_eigs(1.0, 0.5) == 0.0);
    CHECK(rates_from_eigs(std::exp(-0.75 / 2.0), 0.75) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rates_from_eigs(0.9, 2.0) == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
    CHECK_THROWS_AS(rates_from_eigs(0.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(rates_from_eigs(1.1, 1.0), InvalidInput);
    CHECK_THROWS_AS(rates_from_eigs(0.5, 0.0), InvalidInput);
}

TEST_CASE("spectral_gap ratio heuristic") {
    CHECK(spectral_gap(Vector{{1.0, 0.9, 0.88, 0.3, 0.29}}) == 3);
    CHECK(spectral_gap(Vector{{1.0, 0.9, 0.1, 0.09}}) == 2);
    CHECK(spectral_gap(Vector{{1.0, 0.5, 0.25, 0.125, 0.0625}}) == 1);
    CHECK_THROWS_AS(spectral_gap(Vector{{1.0, 0.9, 0.8}}), InvalidInput);
}

TEST_CASE("embedding round-trips through CSV plus sidecar") {
    std::mt19937_64 rng(34);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TimeSeries z;
    z.values.resize(25, 2);
    for (Eigen::Index i = 0; i < z.values.size(); ++i)
        z.values(i) = gauss(rng);
    const Matrix d = pairwise_euclidean(z);
    const double eps = median_scale(d);
    const Matrix k = build_kernel(d, eps);
    auto [p, degrees] = row_normalize(k);
    const Embedding emb = embed(k, degrees, 2, eps);

    const auto dir = std::filesystem::temp_directory_path() / "dmk_test_embedding";
    std::filesystem::create_directories(dir);
    const std::string csv = (dir / "embedding.csv").string();
    const std::string sidecar = (dir / "embedding_meta.json").string();
    write_embedding(csv, sidecar, emb);
    const Embedding back = read_embedding(csv, sidecar);
    CHECK(back.epsilon == emb.epsilon);
    CHECK((back.mu - emb.mu).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.lambda - emb.lambda).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.psi - emb.psi).cwiseAbs().maxCoeff() == 0.0);
}
