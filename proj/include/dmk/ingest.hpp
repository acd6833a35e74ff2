#pragma once

#include "dmk/timeseries.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dmk {

/// Position trace with its own timestamps (not necessarily uniform).
struct PositionTrace {
    std::vector<double> times;
    Matrix xy; // one row per timestamp
};

/// Spike-event recording: per-neuron strictly sorted spike times in seconds.
struct SpikeRecording {
    std::vector<std::vector<double>> neurons;
    double duration = 0.0;
    std::optional<PositionTrace> position;

    std::size_t total_spikes() const;
    void validate() const;
};

/// Manifest JSON names the spikes CSV (columns neuron_id,time_s, sorted by
/// neuron then time), the optional position CSV (columns time_s,x,y), the
/// duration, and the units.
SpikeRecording read_spikes(const std::string& manifest_path);
void write_spikes(const std::string& manifest_path, const SpikeRecording& rec);

struct BinnedSpikes {
    TimeSeries histograms;       // per-neuron counts per bin
    TimeSeries aligned_position; // per-bin position average (nearest timestamp)
    int all_zero_bins = 0;       // diagnostic: bins with no activity at all
};

/// Half-open bins [k b, (k+1) b). Total counts are conserved exactly.
BinnedSpikes bin_spikes(const SpikeRecording& rec, double bin_size);

/// Synthetic place-cell recording: neurons with Gaussian spatial tuning fire
/// as inhomogeneous Poisson processes along a smooth 2-D random-walk
/// trajectory. Used by the spike-decoding experiment in place of the
/// unbundled real dataset.
struct PlaceCellParams {
    int n_neurons = 20;
    double duration = 500.0; // seconds
    double traj_dt = 0.1;    // trajectory sampling step
    double peak_rate = 20.0; // Hz at the tuning center
    double tuning_width = 0.25;
    double walk_step = 0.03; // random-walk step std, reflected into [0,1]^2
    std::uint64_t seed = 0;
};
SpikeRecording synthesize_place_cell_recording(const PlaceCellParams& p);

} // namespace dmk
