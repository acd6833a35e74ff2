#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

// End-to-end checks of the installed command-line contract: flag parsing,
// exit codes, and the machine-readable error report.

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DMK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

const char* kTinyConfig = R"({
  "kind": "polar", "seed": 3, "realizations": 1,
  "pipeline": {"covariance_window": 20, "epsilon_multiplier": 1.0, "n_coords": 2},
  "baselines": {},
  "simulator": {"n_samples": 120, "dt": 0.01, "snr_grid": [1.0]}
})";

} // namespace

TEST_CASE("cli runs an experiment and the staged subcommands agree") {
    const fs::path dir = scratch_dir("dmk_test_cli_run");
    write_file(dir / "config.json", kTinyConfig);
    const std::string config = " --config " + (dir / "config.json").string();

    CHECK(run_cli("run" + config + " --out " + (dir / "full").string() + " --workers 1") == 0);
    for (const char* stage : {"simulate", "embed", "filter", "metrics"})
        CHECK(run_cli(std::string(stage) + config + " --out " + (dir / "staged").string()) == 0);
    // The --stage flag is an alias for the subcommands.
    CHECK(run_cli(config + " --stage simulate --out " + (dir / "flagged").string()) == 0);

    CHECK(fs::exists(dir / "full" / "aggregate" / "nrmse_vs_snr.csv"));
    CHECK(fs::exists(dir / "staged" / "aggregate" / "nrmse_vs_snr.csv"));
    CHECK(fs::exists(dir / "flagged" / "real_000" / "theta.csv"));
}

TEST_CASE("cli exit codes and error report") {
    const fs::path dir = scratch_dir("dmk_test_cli_err");

    // Unknown config key: validation error, exit 2, stage named in the report.
    write_file(dir / "bad.json", R"({"kind": "polar", "surprise": 1})");
    const fs::path bad_out = dir / "bad_out";
    CHECK(run_cli("run --config " + (dir / "bad.json").string() + " --out " +
                  bad_out.string()) == 2);
    std::ifstream report(bad_out / "error.json");
    REQUIRE(report.good());
    nlohmann::json j;
    report >> j;
    CHECK(j.at("error") == "validation");
    CHECK(j.at("stage") == "config");

    // Missing config file: I/O error, exit 4.
    CHECK(run_cli("run --config " + (dir / "nope.json").string() + " --out " +
                  (dir / "io_out").string()) == 4);

    // Stage run without its inputs: I/O error naming the stage.
    write_file(dir / "config.json", kTinyConfig);
    const fs::path stage_out = dir / "stage_out";
    CHECK(run_cli("embed --config " + (dir / "config.json").string() + " --out " +
                  stage_out.string()) == 4);
    std::ifstream stage_report(stage_out / "error.json");
    REQUIRE(stage_report.good());
    stage_report >> j;
    CHECK(j.at("stage") == "embed");

    // Conflicting stage selectors.
    CHECK(run_cli("metrics --stage embed --config " + (dir / "config.json").string()) == 2);
}

TEST_CASE("cli default output root follows the environment variable") {
    const fs::path dir = scratch_dir("dmk_test_cli_env");
    write_file(dir / "config.json", kTinyConfig);
    const std::string cmd = "cd " + dir.string() + " && DMK_OUT_ROOT=" + dir.string() + " " +
                            std::string(DMK_CLI_PATH) + " simulate --config " +
                            (dir / "config.json").string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "out" / "real_000" / "theta.csv"));
}
