#include "dmk/pipeline.hpp"

#include "dmk/baselines.hpp"
#include "dmk/diffusion.hpp"
#include "dmk/dmk_filter.hpp"
#include "dmk/errors.hpp"
#include "dmk/eval.hpp"
#include "dmk/features.hpp"
#include "dmk/ingest.hpp"
#include "dmk/model.hpp"
#include "dmk/rng.hpp"
#include "dmk/sims.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace dmk {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    if (!j.is_object())
        throw InvalidInput("config: " + where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw InvalidInput("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void parse_pipeline(const json& j, PipelineParams& p) {
    require_keys(j, {"covariance_window", "epsilon_multiplier", "n_coords", "init"}, "pipeline");
    p.covariance_window = get_or(j, "covariance_window", p.covariance_window);
    p.epsilon_multiplier = get_or(j, "epsilon_multiplier", p.epsilon_multiplier);
    p.n_coords = get_or(j, "n_coords", p.n_coords);
    const std::string init = get_or<std::string>(j, "init", "first_row");
    if (init != "first_row" && init != "zero")
        throw InvalidInput("config: pipeline.init must be 'first_row' or 'zero'");
    p.init_first_row = init == "first_row";
    if (p.covariance_window < 2)
        throw InvalidInput("config: covariance_window must be >= 2");
    if (!(p.epsilon_multiplier > 0.0))
        throw InvalidInput("config: epsilon_multiplier must be > 0");
    if (p.n_coords < 1)
        throw InvalidInput("config: n_coords must be >= 1");
}

void parse_baselines(const json& j, BaselineParams& b) {
    require_keys(j, {"particle_filter", "observer", "diffusion_maps", "pca"}, "baselines");
    if (j.contains("particle_filter")) {
        const json& pf = j.at("particle_filter");
        require_keys(pf, {"enabled", "particles"}, "baselines.particle_filter");
        b.particle_filter = get_or(pf, "enabled", true);
        b.pf_particles = get_or(pf, "particles", b.pf_particles);
        if (b.pf_particles < 10)
            throw InvalidInput("config: particle_filter.particles must be >= 10");
    }
    if (j.contains("observer")) {
        const json& ob = j.at("observer");
        require_keys(ob, {"enabled", "gamma"}, "baselines.observer");
        b.observer = get_or(ob, "enabled", true);
        b.observer_gamma = get_or(ob, "gamma", b.observer_gamma);
        if (!(b.observer_gamma > 0.0))
            throw InvalidInput("config: observer.gamma must be > 0");
    }
    if (j.contains("diffusion_maps")) {
        const json& dm = j.at("diffusion_maps");
        require_keys(dm, {"enabled"}, "baselines.diffusion_maps");
        b.diffusion_maps = get_or(dm, "enabled", true);
    }
    if (j.contains("pca")) {
        const json& pca = j.at("pca");
        require_keys(pca, {"enabled"}, "baselines.pca");
        b.pca = get_or(pca, "enabled", true);
    }
}

} // namespace

ExperimentConfig parse_config_json(const json& j, std::optional<std::uint64_t> seed_override) {
    require_keys(j,
                 {"kind", "seed", "realizations", "clean_dynamics", "pipeline", "baselines",
                  "simulator"},
                 "top level");
    ExperimentConfig cfg;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polar")
        cfg.kind = ExperimentKind::Polar;
    else if (kind == "sphere")
        cfg.kind = ExperimentKind::Sphere;
    else if (kind == "spikes")
        cfg.kind = ExperimentKind::Spikes;
    else if (kind == "custom")
        cfg.kind = ExperimentKind::Custom;
    else
        throw InvalidInput("config: kind must be polar|sphere|spikes|custom");

    cfg.seed = seed_override ? *seed_override : get_or<std::uint64_t>(j, "seed", 0);
    cfg.realizations = get_or(j, "realizations", 1);
    if (cfg.realizations < 1)
        throw InvalidInput("config: realizations must be >= 1");
    cfg.clean_dynamics = get_or(j, "clean_dynamics", false);

    if (j.contains("pipeline"))
        parse_pipeline(j.at("pipeline"), cfg.pipeline);
    if (j.contains("baselines"))
        parse_baselines(j.at("baselines"), cfg.baselines);

    const json sim = j.contains("simulator") ? j.at("simulator") : json::object();
    switch (cfg.kind) {
    case ExperimentKind::Polar: {
        require_keys(sim, {"n_samples", "dt", "snr_grid"}, "simulator");
        cfg.polar.n_samples = get_or(sim, "n_samples", cfg.polar.n_samples);
        cfg.polar.dt = get_or(sim, "dt", cfg.polar.dt);
        cfg.polar.snr_grid = get_or(sim, "snr_grid", cfg.polar.snr_grid);
        if (cfg.polar.n_samples < 2 || !(cfg.polar.dt > 0.0) || cfg.polar.snr_grid.empty())
            throw InvalidInput("config: bad polar simulator parameters");
        for (double snr : cfg.polar.snr_grid)
            if (!(snr > 0.0))
                throw InvalidInput("config: snr values must be > 0");
        if (cfg.pipeline.covariance_window > cfg.polar.n_samples)
            throw InvalidInput("config: covariance_window exceeds series length");
        break;
    }
    case ExperimentKind::Sphere: {
        require_keys(sim,
                     {"n_samples", "dt", "b", "lambda_v", "sensors", "c_grid", "frame",
                      "stride", "regression_samples"},
                     "simulator");
        cfg.sphere.n_samples = get_or(sim, "n_samples", cfg.sphere.n_samples);
        cfg.sphere.dt = get_or(sim, "dt", cfg.sphere.dt);
        cfg.sphere.b = get_or(sim, "b", cfg.sphere.b);
        cfg.sphere.lambda_v = get_or(sim, "lambda_v", cfg.sphere.lambda_v);
        if (sim.contains("sensors")) {
            cfg.sphere.sensors =
                sim.at("sensors").get<std::vector<std::vector<double>>>();
            if (cfg.sphere.sensors.size() != 3)
                throw InvalidInput("config: sensors must list exactly three points");
            for (const auto& s : cfg.sphere.sensors)
                if (s.size() != 3)
                    throw InvalidInput("config: each sensor must have three coordinates");
        }
        cfg.sphere.c_grid = get_or(sim, "c_grid", cfg.sphere.c_grid);
        cfg.sphere.frame = get_or(sim, "frame", cfg.sphere.frame);
        cfg.sphere.stride = get_or(sim, "stride", cfg.sphere.stride);
        cfg.sphere.regression_samples =
            get_or(sim, "regression_samples", cfg.sphere.regression_samples);
        if (cfg.sphere.n_samples < cfg.sphere.frame || cfg.sphere.frame < 1 ||
            cfg.sphere.stride < 1 || cfg.sphere.stride > cfg.sphere.frame)
            throw InvalidInput("config: bad sphere frame/stride");
        if (cfg.sphere.c_grid.empty())
            throw InvalidInput("config: c_grid must be nonempty");
        for (double c : cfg.sphere.c_grid)
            if (!(c > 0.0))
                throw InvalidInput("config: c values must be > 0");
        if (cfg.sphere.regression_samples <= cfg.pipeline.n_coords + 1)
            throw InvalidInput("config: regression_samples too small");
        break;
    }
    case ExperimentKind::Spikes: {
        require_keys(sim,
                     {"n_neurons", "duration_s", "bin_size_s", "peak_rate_hz", "tuning_width",
                      "walk_step", "traj_dt", "cv_folds", "manifest"},
                     "simulator");
        cfg.spikes.n_neurons = get_or(sim, "n_neurons", cfg.spikes.n_neurons);
        cfg.spikes.duration_s = get_or(sim, "duration_s", cfg.spikes.duration_s);
        cfg.spikes.bin_size_s = get_or(sim, "bin_size_s", cfg.spikes.bin_size_s);
        cfg.spikes.peak_rate_hz = get_or(sim, "peak_rate_hz", cfg.spikes.peak_rate_hz);
        cfg.spikes.tuning_width = get_or(sim, "tuning_width", cfg.spikes.tuning_width);
        cfg.spikes.walk_step = get_or(sim, "walk_step", cfg.spikes.walk_step);
        cfg.spikes.traj_dt = get_or(sim, "traj_dt", cfg.spikes.traj_dt);
        cfg.spikes.cv_folds = get_or(sim, "cv_folds", cfg.spikes.cv_folds);
        if (sim.contains("manifest"))
            cfg.spikes.manifest = sim.at("manifest").get<std::string>();
        if (cfg.spikes.n_neurons < 1 || !(cfg.spikes.duration_s > 0.0) ||
            !(cfg.spikes.bin_size_s > 0.0) || cfg.spikes.cv_folds < 2 ||
            !(cfg.spikes.tuning_width > 0.0) || !(cfg.spikes.walk_step > 0.0) ||
            !(cfg.spikes.traj_dt > 0.0))
            throw InvalidInput("config: bad spikes simulator parameters");
        break;
    }
    case ExperimentKind::Custom: {
        require_keys(sim, {"input_csv", "truth_csv"}, "simulator");
        if (!sim.contains("input_csv"))
            throw InvalidInput("config: custom experiments require simulator.input_csv");
        cfg.custom.input_csv = sim.at("input_csv").get<std::string>();
        if (sim.contains("truth_csv"))
            cfg.custom.truth_csv = sim.at("truth_csv").get<std::string>();
        break;
    }
    }

    cfg.echo = j;
    cfg.echo["seed"] = cfg.seed;
    return cfg;
}

ExperimentConfig parse_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open config: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return parse_config_json(j, seed_override);
}

std::string config_hash(const json& effective) {
    const std::string dump = effective.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::uint64_t realization_seed(std::uint64_t master, int realization) {
    return splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(realization + 1));
}

std::string stage_name(PipelineStage stage) {
    switch (stage) {
    case PipelineStage::Simulate: return "simulate";
    case PipelineStage::Embed: return "embed";
    case PipelineStage::Filter: return "filter";
    case PipelineStage::Metrics: return "metrics";
    }
    return "unknown";
}

std::optional<PipelineStage> stage_from_name(const std::string& name) {
    if (name == "simulate") return PipelineStage::Simulate;
    if (name == "embed") return PipelineStage::Embed;
    if (name == "filter") return PipelineStage::Filter;
    if (name == "metrics") return PipelineStage::Metrics;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace {

/// Compact label for directory names and plot keys (condition values come
/// from the config text, so %g is unambiguous).
std::string format_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

std::string real_dir_name(int j) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "real_%03d", j);
    return buf;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open for writing: " + path.string());
    f << j.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("missing artifact: " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return j;
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& out) {
    fs::create_directories(out);
    json manifest;
    manifest["config_hash"] = config_hash(cfg.echo);
    manifest["seed"] = cfg.seed;
    manifest["realizations"] = cfg.realizations;
    manifest["code_version"] = "dmk 0.1.0";
    write_json_file(out / "manifest.json", manifest);
    write_json_file(out / "config_echo.json", cfg.echo);
}

void require_artifact(const fs::path& path, const std::string& stage) {
    if (!fs::exists(path))
        throw IoError(stage + ": expected artifact missing: " + path.string());
}

/// Deterministic parallel map over [0, n); exceptions are collected and the
/// first one rethrown after the region ends.
void parallel_for(int n, const std::function<void(int)>& fn) {
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical
            if (!first_error)
                first_error = std::current_exception();
        }
    }
    if (first_error)
        std::rethrow_exception(first_error);
}

/// Measurement series -> embedding via the Mahalanobis diffusion-maps route.
Embedding embed_measurements(const TimeSeries& z, const PipelineParams& p) {
    const LocalCovariances covs = sliding_covariance(z, p.covariance_window);
    const Matrix distances = pairwise_mahalanobis(z, covs);
    const double epsilon = median_scale(distances, p.epsilon_multiplier);
    const Matrix kernel = build_kernel(distances, epsilon);
    auto [prob, degrees] = row_normalize(kernel);
    (void)prob;
    return embed(kernel, degrees, p.n_coords, epsilon);
}

FilterState pipeline_init(const LinearSystemModel& model, const Embedding& emb,
                          const PipelineParams& p) {
    // P0 from the coordinate spread: diag(Q) is orders of magnitude too
    // small as an initial uncertainty and starves the gain early on.
    const Matrix coords = emb.coords();
    Matrix p0 = Matrix::Zero(coords.cols(), coords.cols());
    for (Eigen::Index l = 0; l < coords.cols(); ++l) {
        const double mean = coords.col(l).mean();
        p0(l, l) = (coords.col(l).array() - mean).square().sum() /
                   static_cast<double>(coords.rows());
    }
    std::optional<Vector> psi0;
    if (p.init_first_row)
        psi0 = coords.row(0).transpose();
    return init_filter(model, psi0, p0);
}

/// Clean-dynamics variant: rates (hence F and Q) from a clean-measurement
/// embedding, everything else from the noisy one.
LinearSystemModel substitute_rates(const LinearSystemModel& base, const Embedding& noisy_emb,
                                   const Vector& clean_lambda, double dt) {
    if (clean_lambda.size() != base.f_diag.size() + 1)
        throw InvalidInput("substitute_rates: rate count mismatch");
    LinearSystemModel model = base;
    for (int l = 0; l < model.state_dim(); ++l) {
        const double lambda = clean_lambda(l + 1);
        model.f_diag(l) = 1.0 - lambda * dt;
        const Vector scaled = lambda * noisy_emb.psi.col(l + 1);
        const double mean = scaled.mean();
        model.q_diag(l) =
            (scaled.array() - mean).square().sum() / static_cast<double>(scaled.size());
    }
    return model;
}

/// Raw diffusion-maps "filter": the embedding coordinates themselves, lifted
/// through the model.
RunResult diffusion_maps_passthrough(const Embedding& emb, const LinearSystemModel& model,
                                     double dt) {
    RunResult out;
    out.psi_hat.dt = dt;
    out.psi_hat.values = emb.coords();
    out.z_hat.dt = dt;
    out.z_hat.values.resize(emb.psi.rows(), model.meas_dim());
    for (Eigen::Index n = 0; n < emb.psi.rows(); ++n)
        out.z_hat.values.row(n) =
            (model.h * out.psi_hat.values.row(n).transpose() + model.bias).transpose();
    return out;
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
};

Stats mean_std(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty())
        return s;
    for (double x : xs)
        s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    for (double x : xs)
        s.stddev += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(s.stddev / static_cast<double>(xs.size()));
    return s;
}

// ---------------------------------------------------------------------------
// Polar experiment (double-well tracking)
// ---------------------------------------------------------------------------

std::string snr_dir_name(double snr) { return "snr_" + format_label(snr); }

void polar_simulate(const ExperimentConfig& cfg, const fs::path& out) {
    parallel_for(cfg.realizations, [&](int j) {
        const fs::path rdir = out / real_dir_name(j);
        fs::create_directories(rdir);
        PolarSimParams params;
        params.n_samples = cfg.polar.n_samples;
        params.dt = cfg.polar.dt;
        params.seed = realization_seed(cfg.seed, j);
        const TimeSeries theta = simulate_double_well(params);
        const TimeSeries clean = polar_measure_series(theta);
        write_timeseries_csv((rdir / "theta.csv").string(), theta, {"theta_1", "theta_2"});
        write_timeseries_csv((rdir / "clean.csv").string(), clean, {"phi", "r"});
        for (size_t s = 0; s < cfg.polar.snr_grid.size(); ++s) {
            const fs::path sdir = rdir / snr_dir_name(cfg.polar.snr_grid[s]);
            fs::create_directories(sdir);
            const TimeSeries noisy = add_gaussian_noise(
                clean, cfg.polar.snr_grid[s],
                splitmix64(params.seed ^ (0x5eed0000ULL + static_cast<std::uint64_t>(s))));
            write_timeseries_csv((sdir / "noisy.csv").string(), noisy, {"phi", "r"});
        }
    });
}

void polar_embed(const ExperimentConfig& cfg, const fs::path& out) {
    const int n_snr = static_cast<int>(cfg.polar.snr_grid.size());
    parallel_for(cfg.realizations * n_snr + (cfg.clean_dynamics ? cfg.realizations : 0),
                 [&](int idx) {
                     if (idx < cfg.realizations * n_snr) {
                         const int j = idx / n_snr;
                         const fs::path sdir = out / real_dir_name(j) /
                                               snr_dir_name(cfg.polar.snr_grid[
                                                   static_cast<size_t>(idx % n_snr)]);
                         require_artifact(sdir / "noisy.csv", "embed");
                         const TimeSeries noisy = read_timeseries_csv((sdir / "noisy.csv").string());
                         const Embedding emb = embed_measurements(noisy, cfg.pipeline);
                         write_embedding((sdir / "embedding.csv").string(),
                                         (sdir / "embedding_meta.json").string(), emb);
                     } else {
                         const int j = idx - cfg.realizations * n_snr;
                         const fs::path rdir = out / real_dir_name(j);
                         require_artifact(rdir / "clean.csv", "embed");
                         const TimeSeries clean = read_timeseries_csv((rdir / "clean.csv").string());
                         const Embedding emb = embed_measurements(clean, cfg.pipeline);
                         write_embedding((rdir / "clean_embedding.csv").string(),
                                         (rdir / "clean_embedding_meta.json").string(), emb);
                     }
                 });
}

ParticleFilterSpec polar_pf_spec(const ExperimentConfig& cfg, const Vector& sigmas,
                                 std::uint64_t seed) {
    ParticleFilterSpec spec;
    const double dt = cfg.polar.dt;
    const double noise_scale = std::sqrt(2.0 * dt);
    spec.propagate = [dt, noise_scale](const Vector& theta, std::mt19937_64& rng) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector next(2);
        const double y1 = theta(0) - 1.0;
        const double y2 = theta(1) - 6.0;
        next(0) = theta(0) + (-0.5 * y1 * y1 * y1 + y1) * dt + noise_scale * gauss(rng);
        next(1) = theta(1) + (-0.5 * y2 * y2 * y2 + y2) * dt + noise_scale * gauss(rng);
        return next;
    };
    const double var_phi = sigmas(0) * sigmas(0);
    const double var_r = sigmas(1) * sigmas(1);
    spec.log_likelihood = [var_phi, var_r](const Vector& z, const Vector& theta) {
        auto [phi, r] = polar_measure(theta);
        const double dphi = z(0) - phi;
        const double dr = z(1) - r;
        return -0.5 * (dphi * dphi / var_phi + dr * dr / var_r);
    };
    spec.measure = [](const Vector& theta) {
        auto [phi, r] = polar_measure(theta);
        Vector z(2);
        z << phi, r;
        return z;
    };
    spec.initial_state = Vector{{1.0, 6.0}};
    spec.n_particles = cfg.baselines.pf_particles;
    spec.seed = seed;
    return spec;
}

void polar_filter(const ExperimentConfig& cfg, const fs::path& out) {
    const int n_snr = static_cast<int>(cfg.polar.snr_grid.size());
    parallel_for(cfg.realizations * n_snr, [&](int idx) {
        const int j = idx / n_snr;
        const int s = idx % n_snr;
        const double snr = cfg.polar.snr_grid[static_cast<size_t>(s)];
        const fs::path rdir = out / real_dir_name(j);
        const fs::path sdir = rdir / snr_dir_name(snr);
        require_artifact(sdir / "embedding.csv", "filter");
        const TimeSeries noisy = read_timeseries_csv((sdir / "noisy.csv").string());
        const Embedding emb = read_embedding((sdir / "embedding.csv").string(),
                                             (sdir / "embedding_meta.json").string());

        const LinearSystemModel model = assemble_model(emb, noisy, cfg.polar.dt);
        write_model_json((sdir / "model.json").string(), model);
        write_observability_json((sdir / "observability.json").string(),
                                 observability_report(model));

        const RunResult dmk_run = run(noisy, model, pipeline_init(model, emb, cfg.pipeline));
        write_run_csv((sdir / "dmk.csv").string(), dmk_run);

        if (cfg.clean_dynamics) {
            const Embedding clean_emb =
                read_embedding((rdir / "clean_embedding.csv").string(),
                               (rdir / "clean_embedding_meta.json").string());
            const LinearSystemModel cd_model =
                substitute_rates(model, emb, clean_emb.lambda, cfg.polar.dt);
            write_model_json((sdir / "model_clean_dyn.json").string(), cd_model);
            const RunResult cd_run =
                run(noisy, cd_model, pipeline_init(cd_model, emb, cfg.pipeline));
            write_run_csv((sdir / "dmk_clean_dyn.csv").string(), cd_run);
        }

        if (cfg.baselines.diffusion_maps)
            write_run_csv((sdir / "dm.csv").string(),
                          diffusion_maps_passthrough(emb, model, cfg.polar.dt));

        if (cfg.baselines.observer) {
            const Vector psi0 = emb.coords().row(0).transpose();
            const ObserverResult obs =
                linear_observer(noisy, model, cfg.baselines.observer_gamma, psi0);
            write_run_csv((sdir / "observer.csv").string(), RunResult{obs.psi_hat, obs.z_hat});
        }

        if (cfg.baselines.particle_filter) {
            const TimeSeries clean = read_timeseries_csv((rdir / "clean.csv").string());
            const Vector sigmas = noise_sigmas_for_snr(clean, snr);
            const std::uint64_t pf_seed =
                splitmix64(realization_seed(cfg.seed, j) ^
                           (0x9f0000ULL + static_cast<std::uint64_t>(s)));
            const ParticleFilterResult pf =
                particle_filter(noisy, polar_pf_spec(cfg, sigmas, pf_seed));
            write_run_csv((sdir / "pf.csv").string(), RunResult{pf.state_mean, pf.meas_mean});
        }
    });
}

std::vector<std::string> polar_algorithms(const ExperimentConfig& cfg) {
    std::vector<std::string> algs = {"dmk"};
    if (cfg.clean_dynamics)
        algs.push_back("dmk_clean_dyn");
    if (cfg.baselines.particle_filter)
        algs.push_back("pf");
    if (cfg.baselines.observer)
        algs.push_back("observer");
    if (cfg.baselines.diffusion_maps)
        algs.push_back("dm");
    return algs;
}

void polar_metrics(const ExperimentConfig& cfg, const fs::path& out) {
    const auto algs = polar_algorithms(cfg);
    const int n_snr = static_cast<int>(cfg.polar.snr_grid.size());
    const int k = cfg.pipeline.n_coords;

    parallel_for(cfg.realizations * n_snr, [&](int idx) {
        const int j = idx / n_snr;
        const double snr = cfg.polar.snr_grid[static_cast<size_t>(idx % n_snr)];
        const fs::path rdir = out / real_dir_name(j);
        const fs::path sdir = rdir / snr_dir_name(snr);
        require_artifact(sdir / "dmk.csv", "metrics");
        const TimeSeries clean = read_timeseries_csv((rdir / "clean.csv").string());
        const TimeSeries noisy = read_timeseries_csv((sdir / "noisy.csv").string());

        json report;
        const Vector noisy_err = nrmse(noisy, clean);
        report["nrmse"]["noisy"] = std::vector<double>(noisy_err.data(),
                                                       noisy_err.data() + noisy_err.size());
        for (const auto& alg : algs) {
            // The PF state is the true 2-D system state, not the k embedding
            // coordinates.
            const int state_dim = alg == "pf" ? 2 : k;
            const RunResult r = read_run_csv((sdir / (alg + ".csv")).string(), state_dim);
            const Vector err = nrmse(r.z_hat, clean);
            report["nrmse"][alg] = std::vector<double>(err.data(), err.data() + err.size());
        }
        write_json_file(sdir / "metrics.json", report);
    });

    // Aggregate: nRMSE summary plus aRMSE convergence curves.
    const fs::path agg = out / "aggregate";
    fs::create_directories(agg);

    std::vector<std::string> all_algs = algs;
    all_algs.insert(all_algs.begin(), "noisy");

    json summary;
    summary["realizations"] = cfg.realizations;
    summary["seed"] = cfg.seed;
    summary["config_hash"] = config_hash(cfg.echo);
    summary["nrmse_normalization"] = "range";

    std::ofstream plot(agg / "nrmse_vs_snr.csv");
    if (!plot)
        throw IoError("cannot open for writing: " + (agg / "nrmse_vs_snr.csv").string());
    plot << "snr,algorithm,coordinate,mean,std\n";

    for (double snr : cfg.polar.snr_grid) {
        const std::string skey = format_label(snr);
        for (const auto& alg : all_algs) {
            std::vector<std::vector<double>> per_coord;
            for (int j = 0; j < cfg.realizations; ++j) {
                const json m = read_json_file(out / real_dir_name(j) / snr_dir_name(snr) /
                                              "metrics.json");
                const auto vals = m.at("nrmse").at(alg).get<std::vector<double>>();
                per_coord.resize(vals.size());
                for (size_t c = 0; c < vals.size(); ++c)
                    per_coord[c].push_back(vals[c]);
            }
            for (size_t c = 0; c < per_coord.size(); ++c) {
                const Stats s = mean_std(per_coord[c]);
                summary["nrmse"][skey][alg].push_back({{"mean", s.mean}, {"std", s.stddev}});
                plot << skey << ',' << alg << ',' << c << ',' << format_double(s.mean) << ','
                     << format_double(s.stddev) << '\n';
            }
        }

        // aRMSE curves over realizations, one column per algorithm.
        std::vector<Vector> curves;
        for (const auto& alg : all_algs) {
            std::vector<TimeSeries> est;
            std::vector<TimeSeries> truth;
            for (int j = 0; j < cfg.realizations; ++j) {
                const fs::path rdir = out / real_dir_name(j);
                truth.push_back(read_timeseries_csv((rdir / "clean.csv").string()));
                if (alg == "noisy")
                    est.push_back(read_timeseries_csv(
                        (rdir / snr_dir_name(snr) / "noisy.csv").string()));
                else
                    est.push_back(read_run_csv(
                                      (rdir / snr_dir_name(snr) / (alg + ".csv")).string(),
                                      alg == "pf" ? 2 : k)
                                      .z_hat);
            }
            curves.push_back(armse(est, truth));
        }
        std::ofstream ac(agg / ("armse_snr_" + skey + ".csv"));
        if (!ac)
            throw IoError("cannot write aRMSE curve for snr " + skey);
        ac << "step";
        for (const auto& alg : all_algs)
            ac << ',' << alg;
        ac << '\n';
        for (Eigen::Index n = 0; n < curves[0].size(); ++n) {
            ac << n;
            for (const auto& curve : curves)
                ac << ',' << format_double(curve(n));
            ac << '\n';
        }
    }
    write_json_file(agg / "metrics.json", summary);
}

// ---------------------------------------------------------------------------
// Sphere experiment (Langevin on a sphere, Poisson sensing)
// ---------------------------------------------------------------------------

std::string c_dir_name(double c) { return "c_" + format_label(c); }

void sphere_simulate(const ExperimentConfig& cfg, const fs::path& out) {
    const int n_c = static_cast<int>(cfg.sphere.c_grid.size());
    parallel_for(cfg.realizations * n_c, [&](int idx) {
        const int j = idx / n_c;
        const double c = cfg.sphere.c_grid[static_cast<size_t>(idx % n_c)];
        const fs::path dir = out / c_dir_name(c) / real_dir_name(j);
        fs::create_directories(dir);

        SphereSimParams params;
        params.n_samples = cfg.sphere.n_samples;
        params.dt = cfg.sphere.dt;
        params.c = c;
        params.b = cfg.sphere.b;
        params.lambda_v = cfg.sphere.lambda_v;
        if (!cfg.sphere.sensors.empty())
            for (size_t s = 0; s < 3; ++s)
                params.sensors[s] = Eigen::Map<const Vector>(cfg.sphere.sensors[s].data(), 3);
        params.seed = splitmix64(realization_seed(cfg.seed, j) ^
                                 static_cast<std::uint64_t>(idx % n_c));

        const TimeSeries angles = simulate_sphere(params);
        const TimeSeries counts = poisson_sensors(sphere_position_series(angles), params.sensors,
                                                  params.lambda_v, params.seed);
        const TimeSeries hist = bin_histograms(counts, cfg.sphere.frame, cfg.sphere.stride);
        // Per-frame mean of the true angles, aligned with the histograms.
        TimeSeries truth = bin_histograms(angles, cfg.sphere.frame, cfg.sphere.stride);
        truth.values /= static_cast<double>(cfg.sphere.frame);

        write_timeseries_csv((dir / "angles.csv").string(), angles, {"theta_1", "theta_2"});
        write_timeseries_csv((dir / "hist.csv").string(), hist, {"z_1", "z_2", "z_3"});
        write_timeseries_csv((dir / "truth_binned.csv").string(), truth,
                             {"theta_1", "theta_2"});
    });
}

void sphere_embed(const ExperimentConfig& cfg, const fs::path& out) {
    const int n_c = static_cast<int>(cfg.sphere.c_grid.size());
    parallel_for(cfg.realizations * n_c, [&](int idx) {
        const int j = idx / n_c;
        const double c = cfg.sphere.c_grid[static_cast<size_t>(idx % n_c)];
        const fs::path dir = out / c_dir_name(c) / real_dir_name(j);
        require_artifact(dir / "hist.csv", "embed");
        const TimeSeries hist = read_timeseries_csv((dir / "hist.csv").string());
        const Embedding emb = embed_measurements(hist, cfg.pipeline);
        write_embedding((dir / "embedding.csv").string(), (dir / "embedding_meta.json").string(),
                        emb);
    });
}

void sphere_filter(const ExperimentConfig& cfg, const fs::path& out) {
    const int n_c = static_cast<int>(cfg.sphere.c_grid.size());
    parallel_for(cfg.realizations * n_c, [&](int idx) {
        const int j = idx / n_c;
        const double c = cfg.sphere.c_grid[static_cast<size_t>(idx % n_c)];
        const fs::path dir = out / c_dir_name(c) / real_dir_name(j);
        require_artifact(dir / "embedding.csv", "filter");
        const TimeSeries hist = read_timeseries_csv((dir / "hist.csv").string());
        const Embedding emb = read_embedding((dir / "embedding.csv").string(),
                                             (dir / "embedding_meta.json").string());
        const double frame_dt = hist.dt;

        // The drift uses the raw sampling step: rates are per unit of the
        // underlying process time, and the frame duration would put
        // |1 - lambda dt| far above 1.
        const LinearSystemModel model = assemble_model(emb, hist, cfg.sphere.dt);
        write_model_json((dir / "model.json").string(), model);
        write_observability_json((dir / "observability.json").string(),
                                 observability_report(model));

        write_run_csv((dir / "dmk.csv").string(),
                      run(hist, model, pipeline_init(model, emb, cfg.pipeline)));
        if (cfg.baselines.diffusion_maps)
            write_run_csv((dir / "dm.csv").string(),
                          diffusion_maps_passthrough(emb, model, frame_dt));
        if (cfg.baselines.observer) {
            const Vector psi0 = emb.coords().row(0).transpose();
            const ObserverResult obs =
                linear_observer(hist, model, cfg.baselines.observer_gamma, psi0);
            write_run_csv((dir / "observer.csv").string(), RunResult{obs.psi_hat, obs.z_hat});
        }
    });
}

std::vector<std::string> sphere_algorithms(const ExperimentConfig& cfg) {
    std::vector<std::string> algs = {"dmk"};
    if (cfg.baselines.observer)
        algs.push_back("observer");
    if (cfg.baselines.diffusion_maps)
        algs.push_back("dm");
    return algs;
}

/// Fit angle = affine(coords) on the first regression_samples frames,
/// report the Pearson correlation on the held-out remainder.
Vector regression_correlations(const Matrix& coords, const Matrix& truth, int train_samples) {
    const Eigen::Index t = coords.rows();
    if (train_samples >= t - 2)
        throw InvalidInput("regression_correlations: not enough held-out samples");
    Vector out(truth.cols());
    const Matrix x_train = coords.topRows(train_samples);
    const Matrix x_test = coords.bottomRows(t - train_samples);
    for (Eigen::Index a = 0; a < truth.cols(); ++a) {
        const LinReg reg = linreg_fit(x_train, truth.col(a).head(train_samples));
        const Vector pred = linreg_predict(reg, x_test);
        out(a) = pearson(pred, truth.col(a).tail(t - train_samples));
    }
    return out;
}

void sphere_metrics(const ExperimentConfig& cfg, const fs::path& out) {
    const auto algs = sphere_algorithms(cfg);
    const int n_c = static_cast<int>(cfg.sphere.c_grid.size());
    const int k = cfg.pipeline.n_coords;

    parallel_for(cfg.realizations * n_c, [&](int idx) {
        const int j = idx / n_c;
        const double c = cfg.sphere.c_grid[static_cast<size_t>(idx % n_c)];
        const fs::path dir = out / c_dir_name(c) / real_dir_name(j);
        require_artifact(dir / "dmk.csv", "metrics");
        const TimeSeries truth = read_timeseries_csv((dir / "truth_binned.csv").string());

        json report;
        for (const auto& alg : algs) {
            const RunResult r = read_run_csv((dir / (alg + ".csv")).string(), k);
            const Vector corr = regression_correlations(r.psi_hat.values, truth.values,
                                                        cfg.sphere.regression_samples);
            report["correlation"][alg] =
                std::vector<double>(corr.data(), corr.data() + corr.size());
        }
        write_json_file(dir / "metrics.json", report);
    });

    const fs::path agg = out / "aggregate";
    fs::create_directories(agg);
    json summary;
    summary["realizations"] = cfg.realizations;
    summary["seed"] = cfg.seed;
    summary["config_hash"] = config_hash(cfg.echo);

    std::ofstream plot(agg / "correlation_vs_c.csv");
    if (!plot)
        throw IoError("cannot open for writing: " + (agg / "correlation_vs_c.csv").string());
    plot << "c,algorithm,angle,mean,std\n";
    for (double c : cfg.sphere.c_grid) {
        const std::string ckey = format_label(c);
        for (const auto& alg : algs) {
            std::vector<std::vector<double>> per_angle(2);
            for (int j = 0; j < cfg.realizations; ++j) {
                const json m =
                    read_json_file(out / c_dir_name(c) / real_dir_name(j) / "metrics.json");
                const auto vals = m.at("correlation").at(alg).get<std::vector<double>>();
                for (size_t a = 0; a < per_angle.size(); ++a)
                    per_angle[a].push_back(vals[a]);
            }
            for (size_t a = 0; a < per_angle.size(); ++a) {
                const Stats s = mean_std(per_angle[a]);
                summary["correlation"][ckey][alg].push_back(
                    {{"mean", s.mean}, {"std", s.stddev}});
                plot << ckey << ',' << alg << ',' << a + 1 << ',' << format_double(s.mean) << ','
                     << format_double(s.stddev) << '\n';
            }
        }
    }
    write_json_file(agg / "metrics.json", summary);
}

// ---------------------------------------------------------------------------
// Spikes experiment (place-cell decoding)
// ---------------------------------------------------------------------------

void spikes_simulate(const ExperimentConfig& cfg, const fs::path& out) {
    parallel_for(cfg.realizations, [&](int j) {
        const fs::path dir = out / real_dir_name(j);
        fs::create_directories(dir);

        SpikeRecording rec;
        if (cfg.spikes.manifest) {
            rec = read_spikes(*cfg.spikes.manifest);
        } else {
            PlaceCellParams params;
            params.n_neurons = cfg.spikes.n_neurons;
            params.duration = cfg.spikes.duration_s;
            params.peak_rate = cfg.spikes.peak_rate_hz;
            params.tuning_width = cfg.spikes.tuning_width;
            params.walk_step = cfg.spikes.walk_step;
            params.traj_dt = cfg.spikes.traj_dt;
            params.seed = realization_seed(cfg.seed, j);
            rec = synthesize_place_cell_recording(params);
        }
        write_spikes((dir / "spikes_manifest.json").string(), rec);

        const BinnedSpikes binned = bin_spikes(rec, cfg.spikes.bin_size_s);
        std::vector<std::string> names;
        for (Eigen::Index i = 0; i < binned.histograms.dim(); ++i)
            names.push_back("n_" + std::to_string(i));
        write_timeseries_csv((dir / "hist.csv").string(), binned.histograms, names);
        write_timeseries_csv((dir / "position.csv").string(), binned.aligned_position,
                             {"x", "y"});
        json diag;
        diag["all_zero_bins"] = binned.all_zero_bins;
        diag["total_spikes"] = rec.total_spikes();
        write_json_file(dir / "binning_diagnostics.json", diag);
    });
}

void spikes_embed(const ExperimentConfig& cfg, const fs::path& out) {
    parallel_for(cfg.realizations, [&](int j) {
        const fs::path dir = out / real_dir_name(j);
        require_artifact(dir / "hist.csv", "embed");
        const TimeSeries hist = read_timeseries_csv((dir / "hist.csv").string());
        const Embedding emb = embed_measurements(hist, cfg.pipeline);
        write_embedding((dir / "embedding.csv").string(), (dir / "embedding_meta.json").string(),
                        emb);
    });
}

void spikes_filter(const ExperimentConfig& cfg, const fs::path& out) {
    parallel_for(cfg.realizations, [&](int j) {
        const fs::path dir = out / real_dir_name(j);
        require_artifact(dir / "embedding.csv", "filter");
        const TimeSeries hist = read_timeseries_csv((dir / "hist.csv").string());
        const Embedding emb = read_embedding((dir / "embedding.csv").string(),
                                             (dir / "embedding_meta.json").string());

        const LinearSystemModel model = assemble_model(emb, hist, hist.dt);
        write_model_json((dir / "model.json").string(), model);
        write_observability_json((dir / "observability.json").string(),
                                 observability_report(model));
        write_run_csv((dir / "dmk.csv").string(),
                      run(hist, model, pipeline_init(model, emb, cfg.pipeline)));
        if (cfg.baselines.diffusion_maps)
            write_run_csv((dir / "dm.csv").string(),
                          diffusion_maps_passthrough(emb, model, hist.dt));
        if (cfg.baselines.pca) {
            const int k = std::min<int>(cfg.pipeline.n_coords, static_cast<int>(hist.dim()));
            const TimeSeries scores = pca_embed(hist, k);
            std::vector<std::string> names;
            for (int l = 1; l <= k; ++l)
                names.push_back("pc_" + std::to_string(l));
            write_timeseries_csv((dir / "pca.csv").string(), scores, names);
        }
    });
}

/// Consecutive-segment k-fold CV of position regression on a coordinate set.
json cv_correlations(const Matrix& coords, const Matrix& position, int folds) {
    std::vector<std::vector<double>> test_corr(2), train_corr(2);
    for (const auto& fold : kfold_consecutive(coords.rows(), folds)) {
        Matrix x_train(static_cast<Eigen::Index>(fold.train.size()), coords.cols());
        Matrix x_test(static_cast<Eigen::Index>(fold.test.size()), coords.cols());
        Matrix y_train(x_train.rows(), 2);
        Matrix y_test(x_test.rows(), 2);
        for (size_t i = 0; i < fold.train.size(); ++i) {
            x_train.row(static_cast<Eigen::Index>(i)) = coords.row(fold.train[i]);
            y_train.row(static_cast<Eigen::Index>(i)) = position.row(fold.train[i]);
        }
        for (size_t i = 0; i < fold.test.size(); ++i) {
            x_test.row(static_cast<Eigen::Index>(i)) = coords.row(fold.test[i]);
            y_test.row(static_cast<Eigen::Index>(i)) = position.row(fold.test[i]);
        }
        for (Eigen::Index a = 0; a < 2; ++a) {
            const LinReg reg = linreg_fit(x_train, y_train.col(a));
            test_corr[static_cast<size_t>(a)].push_back(
                pearson(linreg_predict(reg, x_test), y_test.col(a)));
            train_corr[static_cast<size_t>(a)].push_back(
                pearson(linreg_predict(reg, x_train), y_train.col(a)));
        }
    }
    json out;
    for (size_t a = 0; a < 2; ++a) {
        out["test"].push_back(mean_std(test_corr[a]).mean);
        out["train"].push_back(mean_std(train_corr[a]).mean);
    }
    return out;
}

void spikes_metrics(const ExperimentConfig& cfg, const fs::path& out) {
    const int k = cfg.pipeline.n_coords;
    parallel_for(cfg.realizations, [&](int j) {
        const fs::path dir = out / real_dir_name(j);
        require_artifact(dir / "dmk.csv", "metrics");
        const TimeSeries position = read_timeseries_csv((dir / "position.csv").string());

        json report;
        const RunResult dmk_run = read_run_csv((dir / "dmk.csv").string(), k);
        report["correlation"]["dmk"] =
            cv_correlations(dmk_run.psi_hat.values, position.values, cfg.spikes.cv_folds);
        if (cfg.baselines.diffusion_maps) {
            const RunResult dm_run = read_run_csv((dir / "dm.csv").string(), k);
            report["correlation"]["dm"] =
                cv_correlations(dm_run.psi_hat.values, position.values, cfg.spikes.cv_folds);
        }
        if (cfg.baselines.pca) {
            const TimeSeries scores = read_timeseries_csv((dir / "pca.csv").string());
            report["correlation"]["pca"] =
                cv_correlations(scores.values, position.values, cfg.spikes.cv_folds);
        }
        write_json_file(dir / "metrics.json", report);
    });

    const fs::path agg = out / "aggregate";
    fs::create_directories(agg);
    json summary;
    summary["realizations"] = cfg.realizations;
    summary["seed"] = cfg.seed;
    summary["config_hash"] = config_hash(cfg.echo);

    std::vector<std::string> algs = {"dmk"};
    if (cfg.baselines.diffusion_maps)
        algs.push_back("dm");
    if (cfg.baselines.pca)
        algs.push_back("pca");

    std::ofstream plot(agg / "correlations.csv");
    if (!plot)
        throw IoError("cannot open for writing: " + (agg / "correlations.csv").string());
    plot << "algorithm,coordinate,split,mean,std\n";
    for (const auto& alg : algs) {
        for (const std::string split : {"test", "train"}) {
            std::vector<std::vector<double>> per_coord(2);
            for (int j = 0; j < cfg.realizations; ++j) {
                const json m = read_json_file(out / real_dir_name(j) / "metrics.json");
                const auto vals =
                    m.at("correlation").at(alg).at(split).get<std::vector<double>>();
                for (size_t a = 0; a < 2; ++a)
                    per_coord[a].push_back(vals[a]);
            }
            for (size_t a = 0; a < 2; ++a) {
                const Stats s = mean_std(per_coord[a]);
                summary["correlation"][alg][split].push_back(
                    {{"mean", s.mean}, {"std", s.stddev}});
                plot << alg << ',' << (a == 0 ? "x" : "y") << ',' << split << ','
                     << format_double(s.mean) << ',' << format_double(s.stddev) << '\n';
            }
        }
    }
    write_json_file(agg / "metrics.json", summary);
}

// ---------------------------------------------------------------------------
// Custom experiment (bring-your-own measurement CSV)
// ---------------------------------------------------------------------------

void custom_simulate(const ExperimentConfig& cfg, const fs::path& out) {
    const fs::path dir = out / "run";
    fs::create_directories(dir);
    const TimeSeries z = read_timeseries_csv(cfg.custom.input_csv);
    std::vector<std::string> names;
    for (Eigen::Index i = 1; i <= z.dim(); ++i)
        names.push_back("z_" + std::to_string(i));
    write_timeseries_csv((dir / "noisy.csv").string(), z, names);
    if (cfg.custom.truth_csv) {
        const TimeSeries truth = read_timeseries_csv(*cfg.custom.truth_csv);
        write_timeseries_csv((dir / "clean.csv").string(), truth, names);
    }
}

void custom_embed(const ExperimentConfig& cfg, const fs::path& out) {
    const fs::path dir = out / "run";
    require_artifact(dir / "noisy.csv", "embed");
    const TimeSeries z = read_timeseries_csv((dir / "noisy.csv").string());
    const Embedding emb = embed_measurements(z, cfg.pipeline);
    write_embedding((dir / "embedding.csv").string(), (dir / "embedding_meta.json").string(),
                    emb);
}

void custom_filter(const ExperimentConfig& cfg, const fs::path& out) {
    const fs::path dir = out / "run";
    require_artifact(dir / "embedding.csv", "filter");
    const TimeSeries z = read_timeseries_csv((dir / "noisy.csv").string());
    const Embedding emb =
        read_embedding((dir / "embedding.csv").string(), (dir / "embedding_meta.json").string());
    const LinearSystemModel model = assemble_model(emb, z, z.dt);
    write_model_json((dir / "model.json").string(), model);
    write_observability_json((dir / "observability.json").string(), observability_report(model));
    write_run_csv((dir / "dmk.csv").string(),
                  run(z, model, pipeline_init(model, emb, cfg.pipeline)));
}

void custom_metrics(const ExperimentConfig& cfg, const fs::path& out) {
    const fs::path dir = out / "run";
    require_artifact(dir / "dmk.csv", "metrics");
    json report;
    if (cfg.custom.truth_csv) {
        const TimeSeries clean = read_timeseries_csv((dir / "clean.csv").string());
        const TimeSeries noisy = read_timeseries_csv((dir / "noisy.csv").string());
        const RunResult r = read_run_csv((dir / "dmk.csv").string(), cfg.pipeline.n_coords);
        const Vector e_dmk = nrmse(r.z_hat, clean);
        const Vector e_noisy = nrmse(noisy, clean);
        report["nrmse"]["dmk"] = std::vector<double>(e_dmk.data(), e_dmk.data() + e_dmk.size());
        report["nrmse"]["noisy"] =
            std::vector<double>(e_noisy.data(), e_noisy.data() + e_noisy.size());
    } else {
        report["note"] = "no truth series provided; nRMSE unavailable";
    }
    write_json_file(dir / "metrics.json", report);
}

} // namespace

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

void run_stage(const ExperimentConfig& cfg, const std::string& out_dir, PipelineStage stage) {
    const fs::path out(out_dir);
    write_manifest(cfg, out);
    switch (cfg.kind) {
    case ExperimentKind::Polar:
        switch (stage) {
        case PipelineStage::Simulate: polar_simulate(cfg, out); break;
        case PipelineStage::Embed: polar_embed(cfg, out); break;
        case PipelineStage::Filter: polar_filter(cfg, out); break;
        case PipelineStage::Metrics: polar_metrics(cfg, out); break;
        }
        break;
    case ExperimentKind::Sphere:
        switch (stage) {
        case PipelineStage::Simulate: sphere_simulate(cfg, out); break;
        case PipelineStage::Embed: sphere_embed(cfg, out); break;
        case PipelineStage::Filter: sphere_filter(cfg, out); break;
        case PipelineStage::Metrics: sphere_metrics(cfg, out); break;
        }
        break;
    case ExperimentKind::Spikes:
        switch (stage) {
        case PipelineStage::Simulate: spikes_simulate(cfg, out); break;
        case PipelineStage::Embed: spikes_embed(cfg, out); break;
        case PipelineStage::Filter: spikes_filter(cfg, out); break;
        case PipelineStage::Metrics: spikes_metrics(cfg, out); break;
        }
        break;
    case ExperimentKind::Custom:
        switch (stage) {
        case PipelineStage::Simulate: custom_simulate(cfg, out); break;
        case PipelineStage::Embed: custom_embed(cfg, out); break;
        case PipelineStage::Filter: custom_filter(cfg, out); break;
        case PipelineStage::Metrics: custom_metrics(cfg, out); break;
        }
        break;
    }
}

void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    for (PipelineStage stage : {PipelineStage::Simulate, PipelineStage::Embed,
                                PipelineStage::Filter, PipelineStage::Metrics})
        run_stage(cfg, out_dir, stage);
}

} // namespace dmk
