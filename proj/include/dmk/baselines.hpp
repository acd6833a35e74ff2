#pragma once

#include "dmk/model.hpp"
#include "dmk/timeseries.hpp"

#include <cstdint>
#include <functional>
#include <random>

namespace dmk {

/// Bootstrap particle filter with the true system model.
struct ParticleFilterSpec {
    /// Sample theta_{n+1} given theta_n.
    std::function<Vector(const Vector&, std::mt19937_64&)> propagate;
    /// Log-likelihood of measurement z given state theta.
    std::function<double(const Vector&, const Vector&)> log_likelihood;
    /// True measurement function, used to map state estimates to clean
    /// measurement estimates.
    std::function<Vector(const Vector&)> measure;
    Vector initial_state;
    int n_particles = 1000;
    std::uint64_t seed = 0;
};

struct ParticleFilterResult {
    TimeSeries state_mean; // weighted-mean state per step
    TimeSeries meas_mean;  // measure(state_mean)
};

/// Propagate, weight, and systematically resample whenever the effective
/// sample size drops below n_particles / 2. Throws NumericalDegeneracy with
/// the step index if every weight vanishes.
ParticleFilterResult particle_filter(const TimeSeries& z, const ParticleFilterSpec& spec);

/// Fixed-gain observer psi_n = F psi + (gamma/|H|^2) H' (z_n - H F psi - bias).
/// gamma is dimensionless (a fraction of the gradient-descent stability
/// limit). Reimplementation with a gradient-like gain; the originally cited
/// observer recursion is not reproduced here, so reports label it
/// "observer (reimplementation)".
struct ObserverResult {
    TimeSeries psi_hat;
    TimeSeries z_hat;
};
ObserverResult linear_observer(const TimeSeries& z, const LinearSystemModel& model, double gamma,
                               const Vector& psi0);

/// Mean-centered projection onto the top-k principal directions
/// (descending explained variance, sym_eigs sign convention).
TimeSeries pca_embed(const TimeSeries& x, int k);

} // namespace dmk
