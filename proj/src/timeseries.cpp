#include "dmk/timeseries.hpp"

#include "dmk/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dmk {

void TimeSeries::validate() const {
    if (values.rows() < 1 || values.cols() < 1)
        throw InvalidInput("TimeSeries: need at least one sample and one coordinate");
    if (!values.allFinite())
        throw InvalidInput("TimeSeries: non-finite entries");
    if (!(dt > 0.0))
        throw InvalidInput("TimeSeries: dt must be > 0");
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    return out;
}

double parse_double(const std::string& s, const std::string& path, int lineno) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw IoError(path + ":" + std::to_string(lineno) + ": malformed number '" + s + "'");
    return v;
}

} // namespace

void write_table_csv(const std::string& path, const Matrix& table,
                     const std::vector<std::string>& names) {
    if (static_cast<Eigen::Index>(names.size()) != table.cols())
        throw InvalidInput("write_table_csv: header/column count mismatch");
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    for (size_t i = 0; i < names.size(); ++i)
        f << (i ? "," : "") << names[i];
    f << '\n';
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.cols(); ++c)
            f << (c ? "," : "") << format_double(table(r, c));
        f << '\n';
    }
    if (!f)
        throw IoError("write failed: " + path);
}

Matrix read_table_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(f, line))
        throw IoError(path + ": empty file");
    const size_t ncols = split_line(line).size();
    std::vector<double> data;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto fields = split_line(line);
        if (fields.size() != ncols)
            throw IoError(path + ":" + std::to_string(lineno) + ": wrong field count");
        for (const auto& s : fields)
            data.push_back(parse_double(s, path, lineno));
    }
    if (data.empty())
        throw IoError(path + ": no data rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(data.size() / ncols);
    Matrix out(rows, static_cast<Eigen::Index>(ncols));
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            out(r, c) = data[static_cast<size_t>(r) * ncols + static_cast<size_t>(c)];
    return out;
}

void write_timeseries_csv(const std::string& path, const TimeSeries& ts,
                          const std::vector<std::string>& names) {
    ts.validate();
    std::vector<std::string> header;
    header.reserve(names.size() + 1);
    header.push_back("time");
    header.insert(header.end(), names.begin(), names.end());
    Matrix table(ts.length(), ts.dim() + 1);
    for (Eigen::Index n = 0; n < ts.length(); ++n)
        table(n, 0) = static_cast<double>(n) * ts.dt;
    table.rightCols(ts.dim()) = ts.values;
    write_table_csv(path, table, header);
}

TimeSeries read_timeseries_csv(const std::string& path) {
    Matrix table = read_table_csv(path);
    if (table.cols() < 2)
        throw IoError(path + ": expected a time column plus data columns");
    TimeSeries ts;
    ts.dt = table.rows() > 1 ? table(1, 0) - table(0, 0) : 1.0;
    if (!(ts.dt > 0.0))
        throw IoError(path + ": non-increasing time column");
    ts.values = table.rightCols(table.cols() - 1);
    ts.validate();
    return ts;
}

} // namespace dmk
