#include "dmk/errors.hpp"
#include "dmk/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

void write_error_json(const std::string& out_dir, const std::string& stage,
                      const std::string& kind, const std::string& message) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream f(std::filesystem::path(out_dir) / "error.json");
    if (!f)
        return;
    nlohmann::json j;
    j["stage"] = stage;
    j["error"] = kind;
    j["message"] = message;
    f << j.dump(2) << '\n';
}

std::string default_out_dir() {
    if (const char* root = std::getenv("DMK_OUT_ROOT"))
        return (std::filesystem::path(root) / "out").string();
    return "out";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion-maps Kalman filtering pipeline"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir = default_out_dir();
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string stage_flag;

    app.add_option("--config", config_path, "experiment config JSON")->required();
    app.add_option("--out", out_dir, "output directory (default: $DMK_OUT_ROOT/out or ./out)");
    app.add_option("--seed", seed, "master seed, overrides the config");
    app.add_option("--workers", workers, "worker threads (default: all cores)");
    app.add_option("--stage", stage_flag, "run a single stage: simulate|embed|filter|metrics");

    for (const std::string name : {"run", "simulate", "embed", "filter", "metrics"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    std::string command = "run";
    for (const CLI::App* sub : app.get_subcommands())
        command = sub->get_name();
    if (!stage_flag.empty()) {
        if (command != "run" && command != stage_flag) {
            std::cerr << "dmk: --stage conflicts with subcommand '" << command << "'\n";
            return kExitValidation;
        }
        command = stage_flag;
    }

    std::optional<dmk::PipelineStage> stage;
    if (command != "run") {
        stage = dmk::stage_from_name(command);
        if (!stage) {
            std::cerr << "dmk: unknown stage '" << command << "'\n";
            return kExitValidation;
        }
    }

#ifdef _OPENMP
    if (workers > 0)
        omp_set_num_threads(workers);
#else
    (void)workers;
#endif

    std::string failing_stage = stage ? dmk::stage_name(*stage) : "config";
    try {
        const dmk::ExperimentConfig cfg = dmk::parse_config(config_path, seed);
        if (stage) {
            dmk::run_stage(cfg, out_dir, *stage);
            std::cout << "dmk: stage " << dmk::stage_name(*stage) << " done, artifacts in "
                      << out_dir << '\n';
        } else {
            for (dmk::PipelineStage s :
                 {dmk::PipelineStage::Simulate, dmk::PipelineStage::Embed,
                  dmk::PipelineStage::Filter, dmk::PipelineStage::Metrics}) {
                failing_stage = dmk::stage_name(s);
                dmk::run_stage(cfg, out_dir, s);
                std::cout << "dmk: stage " << failing_stage << " done\n";
            }
            std::cout << "dmk: experiment complete, artifacts in " << out_dir << '\n';
        }
        return kExitOk;
    } catch (const dmk::InvalidInput& e) {
        write_error_json(out_dir, failing_stage, "validation", e.what());
        std::cerr << "dmk: validation error in stage " << failing_stage << ": " << e.what()
                  << '\n';
        return kExitValidation;
    } catch (const dmk::NumericalDegeneracy& e) {
        write_error_json(out_dir, failing_stage, "numerical", e.what());
        std::cerr << "dmk: numerical failure in stage " << failing_stage << ": " << e.what()
                  << '\n';
        return kExitNumerical;
    } catch (const dmk::IoError& e) {
        write_error_json(out_dir, failing_stage, "io", e.what());
        std::cerr << "dmk: I/O error in stage " << failing_stage << ": " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        write_error_json(out_dir, failing_stage, "numerical", e.what());
        std::cerr << "dmk: failure in stage " << failing_stage << ": " << e.what() << '\n';
        return kExitNumerical;
    }
}
