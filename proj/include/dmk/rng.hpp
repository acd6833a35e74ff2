#pragma once

#include <cstdint>
#include <random>

namespace dmk {

/// SplitMix64 mixing step.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named noise streams. Each simulator draws from its own stream so that
/// toggling one noise source does not perturb the others.
enum class Stream : std::uint64_t {
    Process = 1,
    MeasurementNoise = 2,
    Sensor0 = 10,
    Sensor1 = 11,
    Sensor2 = 12,
    SensorNoise = 13,
    Particles = 20,
    Spikes = 30,
};

/// Counter-scheme seed derivation: master -> (stream, index) -> engine seed.
/// Growing the realization count never perturbs earlier realizations.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
    return splitmix64(s ^ index);
}

inline std::mt19937_64 make_engine(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return std::mt19937_64(derive_seed(master, stream, index));
}

} // namespace dmk
