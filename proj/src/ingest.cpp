#include "dmk/ingest.hpp"

#include "dmk/errors.hpp"
#include "dmk/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace dmk {

namespace fs = std::filesystem;

std::size_t SpikeRecording::total_spikes() const {
    std::size_t n = 0;
    for (const auto& neuron : neurons)
        n += neuron.size();
    return n;
}

void SpikeRecording::validate() const {
    if (!(duration > 0.0))
        throw InvalidInput("SpikeRecording: duration must be > 0");
    for (size_t i = 0; i < neurons.size(); ++i)
        for (size_t s = 0; s < neurons[i].size(); ++s) {
            const double t = neurons[i][s];
            if (!(t >= 0.0) || t > duration)
                throw InvalidInput("SpikeRecording: neuron " + std::to_string(i) +
                                   " spike time out of [0, duration]");
            if (s > 0 && !(t > neurons[i][s - 1]))
                throw InvalidInput("SpikeRecording: neuron " + std::to_string(i) +
                                   " spike times not strictly sorted");
        }
    if (position) {
        if (position->times.size() != static_cast<size_t>(position->xy.rows()) ||
            position->xy.cols() != 2)
            throw InvalidInput("SpikeRecording: malformed position trace");
        if (!position->xy.allFinite())
            throw InvalidInput("SpikeRecording: non-finite position");
    }
}

namespace {

std::vector<std::vector<double>> parse_spike_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(f, line))
        throw IoError(path + ": empty file");

    std::vector<std::vector<double>> neurons;
    int lineno = 1;
    long prev_id = -1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected neuron_id,time_s");
        char* end = nullptr;
        const long id = std::strtol(line.c_str(), &end, 10);
        if (end != line.c_str() + comma || id < 0)
            throw IoError(path + ":" + std::to_string(lineno) + ": bad neuron_id");
        const double t = std::strtod(line.c_str() + comma + 1, &end);
        if (end == line.c_str() + comma + 1 || *end != '\0')
            throw IoError(path + ":" + std::to_string(lineno) + ": bad time_s");
        if (id < prev_id)
            throw IoError(path + ":" + std::to_string(lineno) + ": rows not sorted by neuron");
        prev_id = id;
        if (static_cast<size_t>(id) >= neurons.size())
            neurons.resize(static_cast<size_t>(id) + 1);
        neurons[static_cast<size_t>(id)].push_back(t);
    }
    return neurons;
}

} // namespace

SpikeRecording read_spikes(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f)
        throw IoError("cannot open for reading: " + manifest_path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(manifest_path + ": " + e.what());
    }

    const fs::path base = fs::path(manifest_path).parent_path();
    SpikeRecording rec;
    rec.duration = j.at("duration_s").get<double>();
    rec.neurons = parse_spike_csv((base / j.at("spikes_csv").get<std::string>()).string());
    if (j.contains("position_csv")) {
        const Matrix table =
            read_table_csv((base / j.at("position_csv").get<std::string>()).string());
        if (table.cols() != 3)
            throw IoError("position CSV must have columns time_s,x,y");
        PositionTrace pos;
        pos.times.assign(table.col(0).data(), table.col(0).data() + table.rows());
        pos.xy = table.rightCols(2);
        rec.position = std::move(pos);
    }
    rec.validate();
    return rec;
}

void write_spikes(const std::string& manifest_path, const SpikeRecording& rec) {
    rec.validate();
    const fs::path base = fs::path(manifest_path).parent_path();

    std::ofstream sf(base / "spikes.csv");
    if (!sf)
        throw IoError("cannot open for writing: " + (base / "spikes.csv").string());
    sf << "neuron_id,time_s\n";
    for (size_t i = 0; i < rec.neurons.size(); ++i)
        for (const double t : rec.neurons[i])
            sf << i << ',' << format_double(t) << '\n';

    nlohmann::json j;
    j["duration_s"] = rec.duration;
    j["units"] = "seconds";
    j["spikes_csv"] = "spikes.csv";
    if (rec.position) {
        Matrix table(rec.position->xy.rows(), 3);
        table.col(0) = Eigen::Map<const Vector>(rec.position->times.data(),
                                                static_cast<Eigen::Index>(rec.position->times.size()));
        table.rightCols(2) = rec.position->xy;
        write_table_csv((base / "position.csv").string(), table, {"time_s", "x", "y"});
        j["position_csv"] = "position.csv";
    }
    std::ofstream mf(manifest_path);
    if (!mf)
        throw IoError("cannot open for writing: " + manifest_path);
    mf << j.dump(2) << '\n';
}

BinnedSpikes bin_spikes(const SpikeRecording& rec, double bin_size) {
    rec.validate();
    if (!(bin_size > 0.0))
        throw InvalidInput("bin_spikes: bin_size must be > 0");
    if (rec.neurons.empty())
        throw InvalidInput("bin_spikes: zero neurons");

    const Eigen::Index n_bins =
        static_cast<Eigen::Index>(std::ceil(rec.duration / bin_size - 1e-12));
    if (n_bins < 1)
        throw InvalidInput("bin_spikes: duration shorter than one bin");

    BinnedSpikes out;
    out.histograms.dt = bin_size;
    out.histograms.values =
        Matrix::Zero(n_bins, static_cast<Eigen::Index>(rec.neurons.size()));
    for (size_t i = 0; i < rec.neurons.size(); ++i)
        for (const double t : rec.neurons[i]) {
            Eigen::Index bin = static_cast<Eigen::Index>(std::floor(t / bin_size));
            bin = std::min(bin, n_bins - 1); // t == duration lands in the last bin
            out.histograms.values(bin, static_cast<Eigen::Index>(i)) += 1.0;
        }
    for (Eigen::Index b = 0; b < n_bins; ++b)
        if (out.histograms.values.row(b).sum() == 0.0)
            ++out.all_zero_bins;

    if (rec.position) {
        Matrix sums = Matrix::Zero(n_bins, 2);
        Vector counts = Vector::Zero(n_bins);
        for (size_t s = 0; s < rec.position->times.size(); ++s) {
            Eigen::Index bin =
                static_cast<Eigen::Index>(std::floor(rec.position->times[s] / bin_size));
            bin = std::clamp<Eigen::Index>(bin, 0, n_bins - 1);
            sums.row(bin) += rec.position->xy.row(static_cast<Eigen::Index>(s));
            counts(bin) += 1.0;
        }
        out.aligned_position.dt = bin_size;
        out.aligned_position.values.resize(n_bins, 2);
        for (Eigen::Index b = 0; b < n_bins; ++b) {
            if (counts(b) > 0.0) {
                out.aligned_position.values.row(b) = sums.row(b) / counts(b);
            } else {
                // Fill from the nearest bin that has position samples.
                Eigen::Index best = -1;
                for (Eigen::Index offset = 1; offset < n_bins; ++offset) {
                    if (b >= offset && counts(b - offset) > 0.0) {
                        best = b - offset;
                        break;
                    }
                    if (b + offset < n_bins && counts(b + offset) > 0.0) {
                        best = b + offset;
                        break;
                    }
                }
                if (best < 0)
                    throw InvalidInput("bin_spikes: position trace is empty");
                out.aligned_position.values.row(b) = sums.row(best) / counts(best);
            }
        }
    }
    return out;
}

SpikeRecording synthesize_place_cell_recording(const PlaceCellParams& p) {
    if (p.n_neurons < 1 || !(p.duration > 0.0) || !(p.traj_dt > 0.0))
        throw InvalidInput("synthesize_place_cell_recording: bad parameters");

    auto traj_rng = make_engine(p.seed, Stream::Process);
    auto spike_rng = make_engine(p.seed, Stream::Spikes);
    std::normal_distribution<double> gauss(0.0, p.walk_step);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const int n_steps = static_cast<int>(std::floor(p.duration / p.traj_dt));
    PositionTrace pos;
    pos.times.resize(static_cast<size_t>(n_steps));
    pos.xy.resize(n_steps, 2);
    double x = 0.5;
    double y = 0.5;
    for (int n = 0; n < n_steps; ++n) {
        x += gauss(traj_rng);
        y += gauss(traj_rng);
        // Reflect into the unit square.
        x = std::abs(x);
        if (x > 1.0)
            x = 2.0 - x;
        y = std::abs(y);
        if (y > 1.0)
            y = 2.0 - y;
        pos.times[static_cast<size_t>(n)] = n * p.traj_dt;
        pos.xy(n, 0) = x;
        pos.xy(n, 1) = y;
    }

    // Tuning centers on a jittered grid covering the square.
    const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p.n_neurons))));
    SpikeRecording rec;
    rec.duration = p.duration;
    rec.neurons.resize(static_cast<size_t>(p.n_neurons));
    for (int i = 0; i < p.n_neurons; ++i) {
        const double cx = (i % grid + 0.5) / grid;
        const double cy = (i / grid + 0.5) / grid;
        auto& spikes = rec.neurons[static_cast<size_t>(i)];
        for (int n = 0; n < n_steps; ++n) {
            const double dx = pos.xy(n, 0) - cx;
            const double dy = pos.xy(n, 1) - cy;
            const double rate =
                p.peak_rate * std::exp(-(dx * dx + dy * dy) / (2.0 * p.tuning_width * p.tuning_width));
            std::poisson_distribution<int> pois(rate * p.traj_dt);
            const int count = rate > 0.0 ? pois(spike_rng) : 0;
            for (int s = 0; s < count; ++s) {
                const double t = (n + uniform(spike_rng)) * p.traj_dt;
                if (t <= p.duration)
                    spikes.push_back(t);
            }
        }
        std::sort(spikes.begin(), spikes.end());
        spikes.erase(std::unique(spikes.begin(), spikes.end()), spikes.end());
    }
    rec.position = std::move(pos);
    rec.validate();
    return rec;
}

} // namespace dmk
