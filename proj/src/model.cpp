#include "dmk/model.hpp"

#include "dmk/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace dmk {

namespace {

double population_variance(const Vector& x) {
    const double mean = x.mean();
    return (x.array() - mean).square().sum() / static_cast<double>(x.size());
}

std::vector<double> to_std(const Vector& v) {
    return {v.data(), v.data() + v.size()};
}

Vector from_std(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

Matrix compute_lift(const TimeSeries& z, const Matrix& psi_nontrivial) {
    z.validate();
    if (z.length() != psi_nontrivial.rows())
        throw InvalidInput("compute_lift: series length does not match eigenvector length");
    return z.values.transpose() * psi_nontrivial;
}

LinearSystemModel assemble_model(const Embedding& emb, const TimeSeries& z, double dt) {
    if (emb.n_nontrivial() < 1)
        throw InvalidInput("assemble_model: need at least one nontrivial coordinate");
    if (!(dt > 0.0))
        throw InvalidInput("assemble_model: dt must be > 0");
    const int k = emb.n_nontrivial();

    LinearSystemModel model;
    model.dt = dt;
    model.h = compute_lift(z, emb.coords());
    model.f_diag.resize(k);
    model.q_diag.resize(k);
    for (int l = 0; l < k; ++l) {
        const double lambda = emb.lambda(l + 1);
        model.f_diag(l) = 1.0 - lambda * dt;
        if (model.f_diag(l) <= -1.0)
            model.warnings.push_back("coordinate " + std::to_string(l + 1) +
                                     ": |1 - lambda dt| >= 1, time step too large for rate " +
                                     std::to_string(lambda));
        model.q_diag(l) = population_variance(lambda * emb.psi.col(l + 1));
    }
    model.r_diag.resize(z.dim());
    model.bias.resize(z.dim());
    for (Eigen::Index p = 0; p < z.dim(); ++p) {
        model.r_diag(p) = population_variance(z.values.col(p));
        model.bias(p) = z.values.col(p).mean();
    }
    return model;
}

std::vector<bool> check_observability(const Matrix& h, double tol) {
    if (tol < 0.0)
        tol = 1e-8 * h.cwiseAbs().maxCoeff();
    std::vector<bool> flags(static_cast<size_t>(h.cols()));
    for (Eigen::Index l = 0; l < h.cols(); ++l)
        flags[static_cast<size_t>(l)] = h.col(l).cwiseAbs().maxCoeff() > tol;
    return flags;
}

bool check_detectability(const LinearSystemModel& model, const std::vector<bool>& observable) {
    if (static_cast<int>(observable.size()) != model.state_dim())
        throw InvalidInput("check_detectability: flag count mismatch");
    for (int l = 0; l < model.state_dim(); ++l)
        if (!observable[static_cast<size_t>(l)] && !(model.f_diag(l) < 0.0))
            return false;
    return true;
}

ObservabilityReport observability_report(const LinearSystemModel& model, double tol) {
    ObservabilityReport report;
    report.inner_products = model.h;
    report.observable = check_observability(model.h, tol);
    report.detectable.resize(report.observable.size());
    for (size_t l = 0; l < report.observable.size(); ++l)
        report.detectable[l] =
            report.observable[l] || model.f_diag(static_cast<Eigen::Index>(l)) < 0.0;
    report.verdict = check_detectability(model, report.observable);
    return report;
}

void write_model_json(const std::string& path, const LinearSystemModel& model) {
    nlohmann::json j;
    j["dt"] = model.dt;
    j["F_diag"] = to_std(model.f_diag);
    j["Q_diag"] = to_std(model.q_diag);
    j["R_diag"] = to_std(model.r_diag);
    j["bias"] = to_std(model.bias);
    j["H"] = nlohmann::json::array();
    for (Eigen::Index p = 0; p < model.h.rows(); ++p)
        j["H"].push_back(to_std(model.h.row(p).transpose()));
    j["warnings"] = model.warnings;
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
}

LinearSystemModel read_model_json(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open for reading: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    LinearSystemModel model;
    model.dt = j.at("dt").get<double>();
    model.f_diag = from_std(j.at("F_diag").get<std::vector<double>>());
    model.q_diag = from_std(j.at("Q_diag").get<std::vector<double>>());
    model.r_diag = from_std(j.at("R_diag").get<std::vector<double>>());
    model.bias = j.contains("bias") ? from_std(j.at("bias").get<std::vector<double>>())
                                    : Vector(Vector::Zero(model.r_diag.size()));
    const auto rows = j.at("H").get<std::vector<std::vector<double>>>();
    if (rows.empty())
        throw IoError(path + ": H must have at least one row");
    model.h.resize(static_cast<Eigen::Index>(rows.size()), model.f_diag.size());
    for (size_t p = 0; p < rows.size(); ++p) {
        if (static_cast<Eigen::Index>(rows[p].size()) != model.f_diag.size())
            throw IoError(path + ": H column count inconsistent with F");
        model.h.row(static_cast<Eigen::Index>(p)) = from_std(rows[p]).transpose();
    }
    if (model.h.rows() != model.r_diag.size() || model.q_diag.size() != model.f_diag.size())
        throw IoError(path + ": inconsistent model dimensions");
    if (j.contains("warnings"))
        model.warnings = j.at("warnings").get<std::vector<std::string>>();
    return model;
}

void write_observability_json(const std::string& path, const ObservabilityReport& report) {
    nlohmann::json j;
    j["observable"] = report.observable;
    j["detectable"] = report.detectable;
    j["verdict"] = report.verdict;
    j["inner_products"] = nlohmann::json::array();
    for (Eigen::Index p = 0; p < report.inner_products.rows(); ++p)
        j["inner_products"].push_back(to_std(report.inner_products.row(p).transpose()));
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
}

} // namespace dmk
