#pragma once

#include "dmk/timeseries.hpp"

#include <vector>

namespace dmk {

/// Per-sample local covariance of a measurement stream and its pseudoinverse.
struct LocalCovariances {
    std::vector<Matrix> cov;  // one m x m matrix per sample
    std::vector<Matrix> pinv; // pseudoinverse of the matching entry
    int window_half_width = 0;
};

/// Empirical covariance (population convention, divide by the sample count)
/// of the window n - floor(w/2) .. n + ceil(w/2) - 1 around each sample,
/// truncated at the series boundaries.
LocalCovariances sliding_covariance(const TimeSeries& z, int window);

/// Modified Mahalanobis distance
///   sqrt( (zs - zt)^T (Cs_pinv + Ct_pinv) (zs - zt) / 2 ).
/// Quadratic forms in [-1e-12, 0) are clamped to zero.
double mahalanobis(const Vector& zs, const Vector& zt,
                   const Matrix& cs_pinv, const Matrix& ct_pinv);

/// Full pairwise modified-Mahalanobis distance matrix. The OpenMP version
/// parallelizes over rows; the serial version is the reference kept for
/// testing and benchmarking. Both produce identical output.
Matrix pairwise_mahalanobis(const TimeSeries& z, const LocalCovariances& c);
Matrix pairwise_mahalanobis_serial(const TimeSeries& z, const LocalCovariances& c);

/// Plain pairwise Euclidean distances.
Matrix pairwise_euclidean(const TimeSeries& z);

} // namespace dmk
