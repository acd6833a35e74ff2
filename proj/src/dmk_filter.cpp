#include "dmk/dmk_filter.hpp"

#include "dmk/errors.hpp"

#include <string>

namespace dmk {

FilterState init_filter(const LinearSystemModel& model, const std::optional<Vector>& psi0,
                        const std::optional<Matrix>& p0) {
    const int k = model.state_dim();
    FilterState state;
    if (psi0) {
        if (psi0->size() != k)
            throw InvalidInput("init_filter: psi0 dimension mismatch");
        state.psi_hat = *psi0;
    } else {
        state.psi_hat = Vector::Zero(k);
    }
    if (p0) {
        if (p0->rows() != k || p0->cols() != k)
            throw InvalidInput("init_filter: P0 dimension mismatch");
        state.p = *p0;
    } else {
        state.p = model.q_diag.asDiagonal();
    }
    state.kappa = Matrix::Zero(k, model.meas_dim());
    return state;
}

FilterState step(const FilterState& state, const Vector& z, const LinearSystemModel& model) {
    const int k = model.state_dim();
    const int m = model.meas_dim();
    if (state.psi_hat.size() != k || z.size() != m)
        throw InvalidInput("step: dimension mismatch");
    if (!z.allFinite())
        throw InvalidInput("step: non-finite measurement");

    const auto f = model.f_diag.asDiagonal();
    // Prior covariance F P F' + Q; F is diagonal.
    Matrix p_prior = f * state.p * f;
    p_prior += Matrix(model.q_diag.asDiagonal());

    const Matrix ph = p_prior * model.h.transpose();               // k x m
    Matrix innov_cov = model.h * ph;                               // m x m
    innov_cov += Matrix(model.r_diag.asDiagonal());
    innov_cov = 0.5 * (innov_cov + innov_cov.transpose());

    if (innov_cov.cwiseAbs().maxCoeff() <= 0.0)
        throw NumericalDegeneracy("step: singular innovation covariance (H, Q, R all zero)");
    Eigen::LDLT<Matrix> ldlt(innov_cov);
    if (ldlt.info() != Eigen::Success)
        throw NumericalDegeneracy("step: innovation covariance solve failed");

    FilterState next;
    next.kappa = ldlt.solve(ph.transpose()).transpose();           // k x m
    const Vector predicted = f * state.psi_hat;
    next.psi_hat = predicted + next.kappa * (z - model.h * predicted - model.bias);
    Matrix p = (Matrix::Identity(k, k) - next.kappa * model.h) * p_prior;
    next.p = 0.5 * (p + p.transpose());
    next.step_index = state.step_index + 1;
    return next;
}

RunResult run(const TimeSeries& z, const LinearSystemModel& model, FilterState state) {
    z.validate();
    if (z.dim() != model.meas_dim())
        throw InvalidInput("run: measurement dimension does not match model");

    const Eigen::Index t = z.length();
    RunResult out;
    out.psi_hat.values.resize(t, model.state_dim());
    out.psi_hat.dt = z.dt;
    out.z_hat.values.resize(t, model.meas_dim());
    out.z_hat.dt = z.dt;

    for (Eigen::Index n = 0; n < t; ++n) {
        try {
            state = step(state, z.sample(n), model);
        } catch (const NumericalDegeneracy& e) {
            throw NumericalDegeneracy(std::string(e.what()) + " at step " + std::to_string(n));
        }
        out.psi_hat.values.row(n) = state.psi_hat.transpose();
        out.z_hat.values.row(n) = (model.h * state.psi_hat + model.bias).transpose();
    }
    return out;
}

Vector koopman_apply(const LinearSystemModel& model, const Vector& psi) {
    if (psi.size() != model.state_dim())
        throw InvalidInput("koopman_apply: dimension mismatch");
    return model.f_diag.cwiseProduct(psi);
}

void write_run_csv(const std::string& path, const RunResult& result) {
    const Eigen::Index k = result.psi_hat.dim();
    const Eigen::Index m = result.z_hat.dim();
    std::vector<std::string> names;
    for (Eigen::Index l = 1; l <= k; ++l)
        names.push_back("psi_hat_" + std::to_string(l));
    for (Eigen::Index p = 1; p <= m; ++p)
        names.push_back("z_hat_" + std::to_string(p));
    TimeSeries joined;
    joined.dt = result.z_hat.dt;
    joined.values.resize(result.z_hat.length(), k + m);
    joined.values.leftCols(k) = result.psi_hat.values;
    joined.values.rightCols(m) = result.z_hat.values;
    write_timeseries_csv(path, joined, names);
}

RunResult read_run_csv(const std::string& path, int state_dim) {
    TimeSeries joined = read_timeseries_csv(path);
    if (joined.dim() <= state_dim)
        throw IoError(path + ": too few columns for state dimension " +
                      std::to_string(state_dim));
    RunResult out;
    out.psi_hat.dt = joined.dt;
    out.z_hat.dt = joined.dt;
    out.psi_hat.values = joined.values.leftCols(state_dim);
    out.z_hat.values = joined.values.rightCols(joined.dim() - state_dim);
    return out;
}

} // namespace dmk
