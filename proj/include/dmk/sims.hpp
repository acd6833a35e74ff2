#pragma once

#include "dmk/timeseries.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace dmk {

/// Double-well tracking experiment parameters.
struct PolarSimParams {
    int n_samples = 1000;
    double dt = 0.01;
    std::uint64_t seed = 0;
    double noise_scale = 1.0; // 0 disables process noise (fixed-point checks)
    Vector theta0 = Vector{{1.0, 6.0}};
};

/// Langevin diffusion on a sphere, sensed by Poisson counters.
struct SphereSimParams {
    int n_samples = 300000;
    double dt = 0.5;
    double c = 0.1;       // drift rate
    double b = 0.01;      // diffusion coefficient; increments ~ N(0, b dt)
    double lambda_v = 0.1; // additive Poisson noise rate
    double noise_scale = 1.0;
    Vector theta0 = Vector{{M_PI / 2.0, M_PI / 5.0}};
    std::array<Vector, 3> sensors = {Vector{{1.0, 0.0, 0.0}},
                                     Vector{{0.0, 1.0, 0.0}},
                                     Vector{{0.0, 0.0, 1.0}}};
    std::uint64_t seed = 0;
};

/// Euler-Maruyama integration of the twin double-well Langevin recursions
/// with wells centered at 1 and 6. Starts at the well centers (1, 6).
/// Gaussian increments carry the sqrt(2 dt) scaling.
TimeSeries simulate_double_well(const PolarSimParams& p);

/// (phi, r) = (arctan(theta1 / theta2), |theta|).
std::pair<double, double> polar_measure(const Vector& theta);
TimeSeries polar_measure_series(const TimeSeries& theta);

/// Adds i.i.d. Gaussian noise with per-coordinate variance var(clean)/snr
/// (population convention). snr is capped at 1e12.
TimeSeries add_gaussian_noise(const TimeSeries& y, double snr, std::uint64_t seed);
/// Per-coordinate noise standard deviations implied by a target snr.
Vector noise_sigmas_for_snr(const TimeSeries& y, double snr);

/// Linear-drift angle recursions with attractors pi/2 and pi/5.
TimeSeries simulate_sphere(const SphereSimParams& p);

/// Unit-sphere position (cos t2 sin t1, sin t2 sin t1, cos t1).
Vector sphere_position(double theta1, double theta2);
TimeSeries sphere_position_series(const TimeSeries& angles);

/// z^(j) = Pois(exp(-|s^(j) - x|)) + Pois(lambda_v), independent per sensor.
TimeSeries poisson_sensors(const TimeSeries& x, const std::array<Vector, 3>& sensors,
                           double lambda_v, std::uint64_t seed);

/// Per-coordinate sums over frames of `frame` samples advancing by `stride`.
TimeSeries bin_histograms(const TimeSeries& counts, int frame, int stride);

} // namespace dmk
