#pragma once

#include "dmk/diffusion.hpp"
#include "dmk/timeseries.hpp"

#include <string>
#include <vector>

namespace dmk {

/// Data-driven linear state-space model: diagonal drift F = diag(1 - lambda dt),
/// lift H, diagonal noise covariances Q and R, and a constant measurement
/// offset carried by the trivial embedding coordinate (mu = 1, constant
/// eigenvector, an exact fixed point of the drift).
struct LinearSystemModel {
    Vector f_diag;             // k
    Matrix h;                  // m x k
    Vector q_diag;             // k
    Vector r_diag;             // m
    Vector bias;               // m, zero when unused
    double dt = 0.0;
    std::vector<std::string> warnings;

    int state_dim() const { return static_cast<int>(f_diag.size()); }
    int meas_dim() const { return static_cast<int>(r_diag.size()); }
};

/// alpha(i, l) = sum_n z_n^(i) psi_n^(l) over nontrivial eigenvector columns.
Matrix compute_lift(const TimeSeries& z, const Matrix& psi_nontrivial);

/// Assemble (F, H, Q, R, bias) from an embedding and the measurement series.
/// Q and R use the population variance convention; the bias is the trivial-
/// coordinate lift term (the per-coordinate measurement mean).
LinearSystemModel assemble_model(const Embedding& emb, const TimeSeries& z, double dt);

/// Coordinate l is observable iff some |H(p, l)| exceeds tol.
/// tol < 0 selects the default 1e-8 * max|H|.
std::vector<bool> check_observability(const Matrix& h, double tol = -1.0);

/// True iff every unobservable coordinate has F(l, l) < 0.
bool check_detectability(const LinearSystemModel& model, const std::vector<bool>& observable);

struct ObservabilityReport {
    Matrix inner_products; // H itself: <z^(p), psi^(l)>
    std::vector<bool> observable;
    std::vector<bool> detectable; // per-coordinate: observable or F(l,l) < 0
    bool verdict = false;
};

ObservabilityReport observability_report(const LinearSystemModel& model, double tol = -1.0);

void write_model_json(const std::string& path, const LinearSystemModel& model);
LinearSystemModel read_model_json(const std::string& path);
void write_observability_json(const std::string& path, const ObservabilityReport& report);

} // namespace dmk
