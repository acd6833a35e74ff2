#pragma once

#include "dmk/timeseries.hpp"

#include <utility>
#include <vector>

namespace dmk {

/// Per-coordinate RMSE divided by the (max - min) range of the truth.
Vector nrmse(const TimeSeries& est, const TimeSeries& truth);

/// Per-time-step RMSE of the full vector error across M realization pairs:
/// sqrt(mean_k |est_n^(k) - truth_n^(k)|^2).
Vector armse(const std::vector<TimeSeries>& est_runs, const std::vector<TimeSeries>& truth_runs);

/// Sample Pearson correlation.
double pearson(const Vector& a, const Vector& b);

struct LinReg {
    Vector weights;
    double intercept = 0.0;
    bool rank_deficient = false;
};

/// Ordinary least squares with an intercept, solved via the pseudoinverse of
/// the augmented design matrix.
LinReg linreg_fit(const Matrix& x, const Vector& y);
Vector linreg_predict(const LinReg& reg, const Matrix& x);

/// k contiguous test segments of size floor(n/k) or ceil(n/k) (remainder on
/// the leading folds); train is the complement.
struct FoldSplit {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
};
std::vector<FoldSplit> kfold_consecutive(Eigen::Index n, int k);

} // namespace dmk
