#include "dmk/eval.hpp"

#include "dmk/errors.hpp"

#include <cmath>

namespace dmk {

Vector nrmse(const TimeSeries& est, const TimeSeries& truth) {
    est.validate();
    truth.validate();
    if (est.length() != truth.length() || est.dim() != truth.dim())
        throw InvalidInput("nrmse: shape mismatch");

    Vector out(truth.dim());
    for (Eigen::Index c = 0; c < truth.dim(); ++c) {
        const double range = truth.values.col(c).maxCoeff() - truth.values.col(c).minCoeff();
        if (range <= 0.0)
            throw InvalidInput("nrmse: constant truth coordinate " + std::to_string(c));
        const double mse = (est.values.col(c) - truth.values.col(c)).squaredNorm() /
                           static_cast<double>(truth.length());
        out(c) = std::sqrt(mse) / range;
    }
    return out;
}

Vector armse(const std::vector<TimeSeries>& est_runs, const std::vector<TimeSeries>& truth_runs) {
    if (est_runs.empty() || est_runs.size() != truth_runs.size())
        throw InvalidInput("armse: need matched nonempty run lists");
    const Eigen::Index t = est_runs[0].length();
    const size_t m = est_runs.size();

    Vector out = Vector::Zero(t);
    for (size_t k = 0; k < m; ++k) {
        if (est_runs[k].length() != t || truth_runs[k].length() != t ||
            est_runs[k].dim() != truth_runs[k].dim())
            throw InvalidInput("armse: run " + std::to_string(k) + " shape mismatch");
        out += (est_runs[k].values - truth_runs[k].values).rowwise().squaredNorm();
    }
    return (out / static_cast<double>(m)).cwiseSqrt();
}

double pearson(const Vector& a, const Vector& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw InvalidInput("pearson: need equal-length vectors with at least 2 samples");
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    const double na = da.norm();
    const double nb = db.norm();
    if (na == 0.0 || nb == 0.0)
        throw InvalidInput("pearson: constant input");
    return da.dot(db) / (na * nb);
}

LinReg linreg_fit(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size())
        throw InvalidInput("linreg_fit: sample count mismatch");
    if (x.rows() <= x.cols())
        throw InvalidInput("linreg_fit: need more samples than features");

    Matrix design(x.rows(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;

    Eigen::BDCSVD<Matrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff =
        default_pinv_tol(design.rows(), design.cols()) * svd.singularValues()(0);
    LinReg reg;
    reg.rank_deficient = (svd.singularValues().array() <= cutoff).any();
    Vector coeffs = Vector::Zero(design.cols());
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double s = svd.singularValues()(i);
        if (s > cutoff)
            coeffs += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(y) / s);
    }
    reg.intercept = coeffs(0);
    reg.weights = coeffs.tail(x.cols());
    return reg;
}

Vector linreg_predict(const LinReg& reg, const Matrix& x) {
    if (x.cols() != reg.weights.size())
        throw InvalidInput("linreg_predict: feature count mismatch");
    return (x * reg.weights).array() + reg.intercept;
}

std::vector<FoldSplit> kfold_consecutive(Eigen::Index n, int k) {
    if (k < 2)
        throw InvalidInput("kfold_consecutive: k must be >= 2");
    if (n < k)
        throw InvalidInput("kfold_consecutive: n must be >= k");

    std::vector<FoldSplit> folds(static_cast<size_t>(k));
    Eigen::Index start = 0;
    for (int f = 0; f < k; ++f) {
        const Eigen::Index size = n / k + (f < static_cast<int>(n % k) ? 1 : 0);
        auto& fold = folds[static_cast<size_t>(f)];
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i >= start && i < start + size)
                fold.test.push_back(i);
            else
                fold.train.push_back(i);
        }
        start += size;
    }
    return folds;
}

} // namespace dmk
