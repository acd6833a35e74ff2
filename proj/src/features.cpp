#include "dmk/features.hpp"

#include "dmk/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dmk {

LocalCovariances sliding_covariance(const TimeSeries& z, int window) {
    z.validate();
    const Eigen::Index t = z.length();
    if (window < 2)
        throw InvalidInput("sliding_covariance: window must be >= 2");
    if (window > t)
        throw InvalidInput("sliding_covariance: window exceeds series length");

    const int lo_off = window / 2;
    const int hi_off = (window + 1) / 2; // exclusive

    LocalCovariances out;
    out.window_half_width = lo_off;
    out.cov.resize(static_cast<size_t>(t));
    out.pinv.resize(static_cast<size_t>(t));

#pragma omp parallel for schedule(static)
    for (Eigen::Index n = 0; n < t; ++n) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, n - lo_off);
        const Eigen::Index hi = std::min<Eigen::Index>(t, n + hi_off);
        const Eigen::Index count = hi - lo;
        const auto block = z.values.middleRows(lo, count);
        const Eigen::RowVectorXd mean = block.colwise().mean();
        const Matrix centered = block.rowwise() - mean;
        Matrix c = (centered.transpose() * centered) / static_cast<double>(count);
        out.pinv[static_cast<size_t>(n)] = pseudo_inverse_psd(c);
        out.cov[static_cast<size_t>(n)] = std::move(c);
    }
    return out;
}

double mahalanobis(const Vector& zs, const Vector& zt,
                   const Matrix& cs_pinv, const Matrix& ct_pinv) {
    const Eigen::Index m = zs.size();
    if (zt.size() != m || cs_pinv.rows() != m || cs_pinv.cols() != m ||
        ct_pinv.rows() != m || ct_pinv.cols() != m)
        throw InvalidInput("mahalanobis: dimension mismatch");

    const Vector d = zs - zt;
    const double q = 0.5 * d.dot((cs_pinv + ct_pinv) * d);
    if (q < 0.0) {
        // Round-off scales with the pseudoinverse magnitude, so the
        // negativity tolerance must too.
        const double scale =
            d.squaredNorm() * (cs_pinv.cwiseAbs().maxCoeff() + ct_pinv.cwiseAbs().maxCoeff());
        if (q >= -std::max(1e-12, 1e-10 * scale))
            return 0.0;
        throw InvalidInput("mahalanobis: quadratic form negative beyond round-off");
    }
    return std::sqrt(q);
}

namespace {

Matrix pairwise_impl(const TimeSeries& z, const LocalCovariances& c, bool parallel) {
    const Eigen::Index n = z.length();
    if (static_cast<Eigen::Index>(c.pinv.size()) != n)
        throw InvalidInput("pairwise_mahalanobis: covariance count mismatch");
    Matrix d = Matrix::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector zi = z.sample(i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = mahalanobis(zi, z.sample(j), c.pinv[static_cast<size_t>(i)],
                                         c.pinv[static_cast<size_t>(j)]);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

} // namespace

Matrix pairwise_mahalanobis(const TimeSeries& z, const LocalCovariances& c) {
    return pairwise_impl(z, c, true);
}

Matrix pairwise_mahalanobis_serial(const TimeSeries& z, const LocalCovariances& c) {
    return pairwise_impl(z, c, false);
}

Matrix pairwise_euclidean(const TimeSeries& z) {
    const Eigen::Index n = z.length();
    Matrix d = Matrix::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (z.values.row(i) - z.values.row(j)).norm();
            d(i, j) = v;
            d(j, i) = v;
        }
    return d;
}

} // namespace dmk
