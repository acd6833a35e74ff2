#pragma once

#include "dmk/numkit.hpp"

#include <string>
#include <vector>

namespace dmk {

/// Ordered sequence of fixed-dimension real vectors with a fixed time step.
/// Rows of `values` are samples, columns are coordinates.
struct TimeSeries {
    Matrix values; // T x m
    double dt = 1.0;

    TimeSeries() = default;
    TimeSeries(Matrix v, double step) : values(std::move(v)), dt(step) { validate(); }

    Eigen::Index length() const { return values.rows(); }
    Eigen::Index dim() const { return values.cols(); }
    Vector sample(Eigen::Index n) const { return values.row(n).transpose(); }

    void validate() const;
};

/// CSV with a leading `time` column followed by the named coordinate columns.
/// Values are printed with 17 significant digits so a read round-trips
/// bit-identically.
void write_timeseries_csv(const std::string& path, const TimeSeries& ts,
                          const std::vector<std::string>& names);
TimeSeries read_timeseries_csv(const std::string& path);

/// Raw table I/O used by the embedding and generic artifacts (no time column).
void write_table_csv(const std::string& path, const Matrix& table,
                     const std::vector<std::string>& names);
Matrix read_table_csv(const std::string& path);

/// Round-trippable formatting shared by all writers.
std::string format_double(double x);

} // namespace dmk
