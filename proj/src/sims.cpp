#include "dmk/sims.hpp"

#include "dmk/errors.hpp"
#include "dmk/rng.hpp"

#include <cmath>
#include <random>

namespace dmk {

namespace {

double double_well_drift(double x, double center) {
    const double y = x - center;
    return -0.5 * y * y * y + y;
}

} // namespace

TimeSeries simulate_double_well(const PolarSimParams& p) {
    if (p.n_samples < 1)
        throw InvalidInput("simulate_double_well: n_samples must be >= 1");
    if (!(p.dt > 0.0))
        throw InvalidInput("simulate_double_well: dt must be > 0");

    auto rng = make_engine(p.seed, Stream::Process);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double noise_scale = p.noise_scale * std::sqrt(2.0 * p.dt);

    if (p.theta0.size() != 2)
        throw InvalidInput("simulate_double_well: theta0 must be a 2-vector");
    TimeSeries out;
    out.dt = p.dt;
    out.values.resize(p.n_samples, 2);
    double t1 = p.theta0(0);
    double t2 = p.theta0(1);
    out.values(0, 0) = t1;
    out.values(0, 1) = t2;
    for (int n = 1; n < p.n_samples; ++n) {
        t1 += double_well_drift(t1, 1.0) * p.dt + noise_scale * gauss(rng);
        t2 += double_well_drift(t2, 6.0) * p.dt + noise_scale * gauss(rng);
        out.values(n, 0) = t1;
        out.values(n, 1) = t2;
    }
    return out;
}

std::pair<double, double> polar_measure(const Vector& theta) {
    if (theta.size() != 2)
        throw InvalidInput("polar_measure: expected a 2-vector");
    if (theta(0) == 0.0 && theta(1) == 0.0)
        throw InvalidInput("polar_measure: undefined at the origin");
    return {std::atan(theta(0) / theta(1)), theta.norm()};
}

TimeSeries polar_measure_series(const TimeSeries& theta) {
    TimeSeries out;
    out.dt = theta.dt;
    out.values.resize(theta.length(), 2);
    for (Eigen::Index n = 0; n < theta.length(); ++n) {
        auto [phi, r] = polar_measure(theta.sample(n));
        out.values(n, 0) = phi;
        out.values(n, 1) = r;
    }
    return out;
}

Vector noise_sigmas_for_snr(const TimeSeries& y, double snr) {
    if (!(snr > 0.0))
        throw InvalidInput("noise_sigmas_for_snr: snr must be > 0");
    snr = std::min(snr, 1e12);
    Vector sigmas(y.dim());
    for (Eigen::Index c = 0; c < y.dim(); ++c) {
        const double mean = y.values.col(c).mean();
        const double var =
            (y.values.col(c).array() - mean).square().sum() / static_cast<double>(y.length());
        sigmas(c) = std::sqrt(var / snr);
    }
    return sigmas;
}

TimeSeries add_gaussian_noise(const TimeSeries& y, double snr, std::uint64_t seed) {
    const Vector sigmas = noise_sigmas_for_snr(y, snr);
    auto rng = make_engine(seed, Stream::MeasurementNoise);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TimeSeries out = y;
    for (Eigen::Index n = 0; n < out.length(); ++n)
        for (Eigen::Index c = 0; c < out.dim(); ++c)
            out.values(n, c) += sigmas(c) * gauss(rng);
    return out;
}

TimeSeries simulate_sphere(const SphereSimParams& p) {
    if (p.n_samples < 1)
        throw InvalidInput("simulate_sphere: n_samples must be >= 1");
    if (!(p.c > 0.0) || !(p.b > 0.0) || !(p.dt > 0.0))
        throw InvalidInput("simulate_sphere: c, b, dt must be > 0");

    auto rng = make_engine(p.seed, Stream::Process);
    std::normal_distribution<double> gauss(0.0, std::sqrt(p.b * p.dt));

    if (p.theta0.size() != 2)
        throw InvalidInput("simulate_sphere: theta0 must be a 2-vector");
    TimeSeries out;
    out.dt = p.dt;
    out.values.resize(p.n_samples, 2);
    const double a1 = M_PI / 2.0;
    const double a2 = M_PI / 5.0;
    double t1 = p.theta0(0);
    double t2 = p.theta0(1);
    out.values(0, 0) = t1;
    out.values(0, 1) = t2;
    for (int n = 1; n < p.n_samples; ++n) {
        t1 += p.c * (a1 - t1) + p.noise_scale * gauss(rng);
        t2 += p.c * (a2 - t2) + p.noise_scale * gauss(rng);
        out.values(n, 0) = t1;
        out.values(n, 1) = t2;
    }
    return out;
}

Vector sphere_position(double theta1, double theta2) {
    Vector x(3);
    x << std::cos(theta2) * std::sin(theta1), std::sin(theta2) * std::sin(theta1),
        std::cos(theta1);
    return x;
}

TimeSeries sphere_position_series(const TimeSeries& angles) {
    if (angles.dim() != 2)
        throw InvalidInput("sphere_position_series: expected 2-D angle series");
    TimeSeries out;
    out.dt = angles.dt;
    out.values.resize(angles.length(), 3);
    for (Eigen::Index n = 0; n < angles.length(); ++n)
        out.values.row(n) = sphere_position(angles.values(n, 0), angles.values(n, 1)).transpose();
    return out;
}

TimeSeries poisson_sensors(const TimeSeries& x, const std::array<Vector, 3>& sensors,
                           double lambda_v, std::uint64_t seed) {
    if (x.dim() != 3)
        throw InvalidInput("poisson_sensors: expected 3-D position series");
    if (lambda_v < 0.0)
        throw InvalidInput("poisson_sensors: lambda_v must be >= 0");

    TimeSeries out;
    out.dt = x.dt;
    out.values.resize(x.length(), 3);
    for (int j = 0; j < 3; ++j) {
        auto signal_rng = make_engine(seed, static_cast<Stream>(
                                                static_cast<std::uint64_t>(Stream::Sensor0) + j));
        auto noise_rng = make_engine(seed, Stream::SensorNoise, static_cast<std::uint64_t>(j));
        std::poisson_distribution<int> noise(lambda_v > 0.0 ? lambda_v : 1.0);
        for (Eigen::Index n = 0; n < x.length(); ++n) {
            const double rate = std::exp(-(sensors[static_cast<size_t>(j)] - x.sample(n)).norm());
            std::poisson_distribution<int> signal(rate);
            int count = signal(signal_rng);
            if (lambda_v > 0.0)
                count += noise(noise_rng);
            out.values(n, j) = static_cast<double>(count);
        }
    }
    return out;
}

TimeSeries bin_histograms(const TimeSeries& counts, int frame, int stride) {
    counts.validate();
    if (frame < 1)
        throw InvalidInput("bin_histograms: frame must be >= 1");
    if (stride < 1 || stride > frame)
        throw InvalidInput("bin_histograms: need 1 <= stride <= frame");
    if (frame > counts.length())
        throw InvalidInput("bin_histograms: frame exceeds series length");

    const Eigen::Index out_len = (counts.length() - frame) / stride + 1;
    TimeSeries out;
    out.dt = counts.dt * stride;
    out.values.resize(out_len, counts.dim());
    for (Eigen::Index p = 0; p < out_len; ++p)
        out.values.row(p) = counts.values.middleRows(p * stride, frame).colwise().sum();
    return out;
}

} // namespace dmk
