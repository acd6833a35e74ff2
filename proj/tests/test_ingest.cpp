#include "dmk/errors.hpp"
#include "dmk/ingest.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dmk;

namespace {

std::filesystem::path scratch_dir(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("spike recordings round-trip bit-identically") {
    SpikeRecording rec;
    rec.duration = 2.0;
    rec.neurons = {{0.5, 1.5}, {1.0}};
    PositionTrace pos;
    pos.times = {0.0, 1.0, 2.0};
    pos.xy.resize(3, 2);
    pos.xy << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    rec.position = pos;

    const auto dir = scratch_dir("dmk_test_ingest_rt");
    const std::string manifest = (dir / "manifest.json").string();
    write_spikes(manifest, rec);
    const SpikeRecording back = read_spikes(manifest);
    CHECK(back.duration == rec.duration);
    CHECK(back.neurons == rec.neurons);
    REQUIRE(back.position.has_value());
    CHECK(back.position->times == pos.times);
    CHECK((back.position->xy - pos.xy).cwiseAbs().maxCoeff() == 0.0);

    // Writing the re-read recording reproduces the files byte for byte.
    const auto dir2 = scratch_dir("dmk_test_ingest_rt2");
    write_spikes((dir2 / "manifest.json").string(), back);
    CHECK(read_file(dir / "spikes.csv") == read_file(dir2 / "spikes.csv"));
    CHECK(read_file(dir / "position.csv") == read_file(dir2 / "position.csv"));
}

TEST_CASE("read_spikes validates the on-disk format") {
    const auto dir = scratch_dir("dmk_test_ingest_bad");
    {
        std::ofstream m(dir / "manifest.json");
        m << R"({"duration_s": 2.0, "spikes_csv": "spikes.csv", "units": "seconds"})";
        std::ofstream s(dir / "spikes.csv");
        s << "neuron_id,time_s\n0,0.5\n0,0.25\n"; // unsorted within the neuron
    }
    CHECK_THROWS_AS(read_spikes((dir / "manifest.json").string()), InvalidInput);
    {
        std::ofstream s(dir / "spikes.csv");
        s << "neuron_id,time_s\n0,garbage\n";
    }
    CHECK_THROWS_WITH_AS(read_spikes((dir / "manifest.json").string()),
                         doctest::Contains(":2:"), IoError);
    CHECK_THROWS_AS(read_spikes((dir / "missing.json").string()), IoError);
}

TEST_CASE("bin_spikes counts, boundaries, and conservation") {
    SpikeRecording rec;
    rec.duration = 3.0;
    rec.neurons = {{0.2, 0.8, 1.0}, {2.999}};
    const BinnedSpikes binned = bin_spikes(rec, 1.0);
    REQUIRE(binned.histograms.length() == 3);
    CHECK(binned.histograms.values(0, 0) == 2.0);
    CHECK(binned.histograms.values(1, 0) == 1.0); // t = 1.0 goes to bin 1 (half-open bins)
    CHECK(binned.histograms.values(2, 1) == 1.0);
    CHECK(binned.all_zero_bins == 0);

    // Exact conservation per neuron.
    for (size_t i = 0; i < rec.neurons.size(); ++i)
        CHECK(binned.histograms.values.col(static_cast<Eigen::Index>(i)).sum() ==
              static_cast<double>(rec.neurons[i].size()));

    SpikeRecording edge;
    edge.duration = 2.0;
    edge.neurons = {{2.0}}; // t == duration lands in the last bin
    const BinnedSpikes eb = bin_spikes(edge, 1.0);
    CHECK(eb.histograms.values(1, 0) == 1.0);
    CHECK(eb.all_zero_bins == 1);

    SpikeRecording empty;
    empty.duration = 1.0;
    CHECK_THROWS_AS(bin_spikes(empty, 0.5), InvalidInput);
    CHECK_THROWS_AS(bin_spikes(rec, 0.0), InvalidInput);
}

TEST_CASE("bin_spikes aligns positions by bin average with nearest-bin fill") {
    SpikeRecording rec;
    rec.duration = 3.0;
    rec.neurons = {{0.1}};
    PositionTrace pos;
    pos.times = {0.25, 0.75, 2.5};
    pos.xy.resize(3, 2);
    pos.xy << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    rec.position = pos;
    const BinnedSpikes binned = bin_spikes(rec, 1.0);
    CHECK(binned.aligned_position.values(0, 0) == doctest::Approx(2.0));
    CHECK(binned.aligned_position.values(0, 1) == doctest::Approx(3.0));
    // Bin 1 has no samples: filled from the nearest populated bin (bin 0).
    CHECK(binned.aligned_position.values(1, 0) == doctest::Approx(2.0));
    CHECK(binned.aligned_position.values(2, 0) == doctest::Approx(5.0));
}

TEST_CASE("synthetic place-cell recordings are deterministic and well formed") {
    PlaceCellParams p;
    p.n_neurons = 9;
    p.duration = 60.0;
    p.peak_rate = 8.0;
    p.seed = 3;
    const SpikeRecording a = synthesize_place_cell_recording(p);
    const SpikeRecording b = synthesize_place_cell_recording(p);
    CHECK(a.neurons == b.neurons);
    CHECK(a.total_spikes() > 0);
    REQUIRE(a.position.has_value());
    CHECK(a.position->xy.minCoeff() >= 0.0);
    CHECK(a.position->xy.maxCoeff() <= 1.0);
    a.validate();

    const BinnedSpikes binned = bin_spikes(a, 1.0);
    double total = 0.0;
    for (const auto& neuron : a.neurons)
        total += static_cast<double>(neuron.size());
    CHECK(binned.histograms.values.sum() == total);
}

TEST_CASE("homogeneous firing matches the Poisson mean per bin") {
    // A neuron centered on a pinned trajectory fires at its peak rate.
    PlaceCellParams p;
    p.n_neurons = 1;
    p.duration = 2000.0;
    p.walk_step = 1e-12; // trajectory pinned at (0.5, 0.5)
    p.tuning_width = 1e6;
    p.peak_rate = 3.0;
    p.seed = 9;
    const SpikeRecording rec = synthesize_place_cell_recording(p);
    const BinnedSpikes binned = bin_spikes(rec, 1.0);
    const double mean = binned.histograms.values.col(0).mean();
    const double stderr3 = 3.0 * std::sqrt(3.0 / 2000.0);
    CHECK(std::abs(mean - 3.0) < stderr3);
}
