#pragma once

#include "dmk/timeseries.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dmk {

enum class ExperimentKind { Polar, Sphere, Spikes, Custom };
enum class PipelineStage { Simulate, Embed, Filter, Metrics };

struct PipelineParams {
    int covariance_window = 30;
    double epsilon_multiplier = 1.0;
    int n_coords = 2;
    bool init_first_row = true;
};

struct BaselineParams {
    bool particle_filter = false;
    int pf_particles = 1000;
    bool observer = false;
    double observer_gamma = 0.5;
    bool diffusion_maps = false;
    bool pca = false;
};

struct PolarParams {
    int n_samples = 1000;
    double dt = 0.01;
    std::vector<double> snr_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
};

struct SphereParams {
    int n_samples = 30000;
    double dt = 0.5;
    double b = 0.01;
    double lambda_v = 0.1;
    // Unit-axis sensors unless the config overrides them.
    std::vector<std::vector<double>> sensors;
    std::vector<double> c_grid = {0.1, 0.5, 1.0};
    int frame = 60;
    int stride = 60;
    int regression_samples = 100;
};

struct SpikesParams {
    int n_neurons = 20;
    double duration_s = 500.0;
    double bin_size_s = 1.0;
    double peak_rate_hz = 20.0;
    double tuning_width = 0.25;
    double walk_step = 0.03;
    double traj_dt = 0.1;
    int cv_folds = 5;
    std::optional<std::string> manifest; // real data instead of synthesis
};

struct CustomParams {
    std::string input_csv;
    std::optional<std::string> truth_csv;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Polar;
    std::uint64_t seed = 0;
    int realizations = 1;
    bool clean_dynamics = false;
    PipelineParams pipeline;
    BaselineParams baselines;
    PolarParams polar;
    SphereParams sphere;
    SpikesParams spikes;
    CustomParams custom;
    nlohmann::json echo; // effective config, seed override applied
};

/// Strict parse: unknown keys are errors, every parameter is validated
/// against the module contracts before any computation starts.
ExperimentConfig parse_config(const std::string& path,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig parse_config_json(const nlohmann::json& j,
                                   std::optional<std::uint64_t> seed_override = std::nullopt);

/// FNV-1a over the canonical dump of the effective config.
std::string config_hash(const nlohmann::json& effective);

/// Counter-scheme per-realization seed; growing the realization count never
/// perturbs earlier realizations.
std::uint64_t realization_seed(std::uint64_t master, int realization);

/// Run one stage (file-driven: each stage reads the previous stage's
/// artifacts from out_dir). Chaining all four equals run_experiment exactly.
void run_stage(const ExperimentConfig& cfg, const std::string& out_dir, PipelineStage stage);

/// simulate -> embed -> filter -> metrics.
void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

std::string stage_name(PipelineStage stage);
std::optional<PipelineStage> stage_from_name(const std::string& name);

} // namespace dmk
