#include "dmk/baselines.hpp"

#include "dmk/errors.hpp"
#include "dmk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dmk {

ParticleFilterResult particle_filter(const TimeSeries& z, const ParticleFilterSpec& spec) {
    z.validate();
    if (spec.n_particles < 10)
        throw InvalidInput("particle_filter: need at least 10 particles");
    if (!spec.propagate || !spec.log_likelihood || !spec.measure)
        throw InvalidInput("particle_filter: missing model callbacks");

    const int np = spec.n_particles;
    const Eigen::Index d = spec.initial_state.size();
    auto rng = make_engine(spec.seed, Stream::Particles);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    std::vector<Vector> particles(static_cast<size_t>(np), spec.initial_state);
    std::vector<Vector> scratch(static_cast<size_t>(np));
    std::vector<double> logw(static_cast<size_t>(np), 0.0);
    std::vector<double> w(static_cast<size_t>(np));

    ParticleFilterResult out;
    out.state_mean.dt = z.dt;
    out.state_mean.values.resize(z.length(), d);
    out.meas_mean.dt = z.dt;

    for (Eigen::Index n = 0; n < z.length(); ++n) {
        const Vector zn = z.sample(n);
        for (auto& particle : particles)
            particle = spec.propagate(particle, rng);

        double max_logw = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < np; ++i) {
            logw[static_cast<size_t>(i)] += spec.log_likelihood(zn, particles[static_cast<size_t>(i)]);
            max_logw = std::max(max_logw, logw[static_cast<size_t>(i)]);
        }
        if (!std::isfinite(max_logw))
            throw NumericalDegeneracy("particle_filter: all weights vanished at step " +
                                      std::to_string(n));
        double sum = 0.0;
        for (int i = 0; i < np; ++i) {
            w[static_cast<size_t>(i)] = std::exp(logw[static_cast<size_t>(i)] - max_logw);
            sum += w[static_cast<size_t>(i)];
        }

        Vector mean = Vector::Zero(d);
        double ess_denom = 0.0;
        for (int i = 0; i < np; ++i) {
            const double wi = w[static_cast<size_t>(i)] / sum;
            w[static_cast<size_t>(i)] = wi;
            mean += wi * particles[static_cast<size_t>(i)];
            ess_denom += wi * wi;
        }
        out.state_mean.values.row(n) = mean.transpose();

        if (1.0 / ess_denom < 0.5 * np) {
            // Systematic resampling.
            const double u0 = uniform(rng) / np;
            double cumulative = w[0];
            size_t j = 0;
            for (int i = 0; i < np; ++i) {
                const double u = u0 + static_cast<double>(i) / np;
                while (cumulative < u && j + 1 < static_cast<size_t>(np))
                    cumulative += w[++j];
                scratch[static_cast<size_t>(i)] = particles[j];
            }
            particles.swap(scratch);
            std::fill(logw.begin(), logw.end(), 0.0);
        } else {
            for (int i = 0; i < np; ++i)
                logw[static_cast<size_t>(i)] = std::log(w[static_cast<size_t>(i)]);
        }
    }

    const Eigen::Index m = spec.measure(spec.initial_state).size();
    out.meas_mean.values.resize(z.length(), m);
    for (Eigen::Index n = 0; n < z.length(); ++n)
        out.meas_mean.values.row(n) =
            spec.measure(out.state_mean.sample(n)).transpose();
    return out;
}

ObserverResult linear_observer(const TimeSeries& z, const LinearSystemModel& model, double gamma,
                               const Vector& psi0) {
    z.validate();
    if (gamma < 0.0)
        throw InvalidInput("linear_observer: gamma must be >= 0");
    if (z.dim() != model.meas_dim() || psi0.size() != model.state_dim())
        throw InvalidInput("linear_observer: dimension mismatch");

    const double abort_scale = 1e6 * std::max(1.0, psi0.norm());
    // gamma is a fraction of the gradient-descent stability limit; the raw
    // step is gamma / ||H||_2^2 so the recursion is insensitive to the
    // scale of the lift.
    const double h_norm2 = model.h.squaredNorm();
    if (h_norm2 == 0.0)
        throw InvalidInput("linear_observer: zero lift matrix");
    const double step = gamma / h_norm2;
    Vector psi = psi0;
    ObserverResult out;
    out.psi_hat.dt = z.dt;
    out.psi_hat.values.resize(z.length(), model.state_dim());
    out.z_hat.dt = z.dt;
    out.z_hat.values.resize(z.length(), model.meas_dim());

    for (Eigen::Index n = 0; n < z.length(); ++n) {
        const Vector predicted = model.f_diag.cwiseProduct(psi);
        psi = predicted +
              step * (model.h.transpose() * (z.sample(n) - model.h * predicted - model.bias));
        if (psi.norm() > abort_scale)
            throw NumericalDegeneracy("linear_observer: divergence at step " + std::to_string(n));
        out.psi_hat.values.row(n) = psi.transpose();
        out.z_hat.values.row(n) = (model.h * psi + model.bias).transpose();
    }
    return out;
}

TimeSeries pca_embed(const TimeSeries& x, int k) {
    x.validate();
    if (k < 1 || k > x.dim())
        throw InvalidInput("pca_embed: k out of range");

    const Eigen::RowVectorXd mean = x.values.colwise().mean();
    const Matrix centered = x.values.rowwise() - mean;
    const Matrix cov = (centered.transpose() * centered) / static_cast<double>(x.length());
    auto [values, directions] = sym_eigs(cov, k);
    (void)values;

    TimeSeries out;
    out.dt = x.dt;
    out.values = centered * directions;
    return out;
}

} // namespace dmk
