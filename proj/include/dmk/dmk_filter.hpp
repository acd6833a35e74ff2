#pragma once

#include "dmk/model.hpp"
#include "dmk/timeseries.hpp"

#include <optional>
#include <string>

namespace dmk {

/// Kalman recursion state in embedding coordinates.
struct FilterState {
    Vector psi_hat;   // k
    Matrix p;         // k x k error covariance
    Matrix kappa;     // k x m last gain, zero before the first step
    long step_index = 0;
};

/// psi0 defaults to zero (callers typically pass the first embedding row),
/// p0 defaults to diag(Q).
FilterState init_filter(const LinearSystemModel& model,
                        const std::optional<Vector>& psi0 = std::nullopt,
                        const std::optional<Matrix>& p0 = std::nullopt);

/// One step of the single-pass recursion
///   kappa = (F P F' + Q) H' (H (F P F' + Q) H' + R)^-1
///   psi   = F psi + kappa (z - H F psi - bias)
///   P     = (I - kappa H)(F P F' + Q)
/// The innovation matrix is inverted with a symmetric solve and P is
/// re-symmetrized after the update.
FilterState step(const FilterState& state, const Vector& z, const LinearSystemModel& model);

struct RunResult {
    TimeSeries psi_hat; // filtered embedding coordinates
    TimeSeries z_hat;   // lifted measurement estimates H psi_hat + bias
};

RunResult run(const TimeSeries& z, const LinearSystemModel& model, FilterState state);

/// Conditional expectation of the next embedding value: coordinatewise
/// (1 - lambda dt) psi.
Vector koopman_apply(const LinearSystemModel& model, const Vector& psi);

/// CSV with psi_hat_* and z_hat_* columns, same schema for all filters.
void write_run_csv(const std::string& path, const RunResult& result);
RunResult read_run_csv(const std::string& path, int state_dim);

} // namespace dmk
