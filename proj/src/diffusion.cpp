#include "dmk/diffusion.hpp"

#include "dmk/errors.hpp"
#include "dmk/timeseries.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

namespace dmk {

double median_scale(const Matrix& d, double multiplier) {
    validate_matrix(d, "median_scale");
    const Eigen::Index n = d.rows();
    if (d.cols() != n || n < 2)
        throw InvalidInput("median_scale: need a square distance matrix with N >= 2");
    if (!(multiplier > 0.0))
        throw InvalidInput("median_scale: multiplier must be > 0");

    std::vector<double> upper;
    upper.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            upper.push_back(d(i, j));

    const size_t mid = upper.size() / 2;
    std::nth_element(upper.begin(), upper.begin() + mid, upper.end());
    double median = upper[mid];
    if (upper.size() % 2 == 0) {
        const double lower = *std::max_element(upper.begin(), upper.begin() + mid);
        median = 0.5 * (median + lower);
    }
    return multiplier * median;
}

Matrix build_kernel(const Matrix& d, double epsilon) {
    validate_matrix(d, "build_kernel");
    if (!(epsilon > 0.0))
        throw InvalidInput("build_kernel: epsilon must be > 0");
    const Eigen::Index n = d.rows();
    Matrix k(n, d.cols());
    const double inv_eps2 = 1.0 / (epsilon * epsilon);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            k(i, j) = std::exp(-d(i, j) * d(i, j) * inv_eps2);
    return k;
}

std::pair<Matrix, Vector> row_normalize(const Matrix& k) {
    validate_matrix(k, "row_normalize");
    // Entries are exp(-d^2/eps^2) > 0 mathematically, but far pairs can
    // underflow to exactly zero; the diagonal keeps every row sum >= 1.
    if ((k.array() < 0.0).any())
        throw InvalidInput("row_normalize: kernel must be entrywise nonnegative");
    Vector degrees = k.rowwise().sum();
    if ((degrees.array() <= 0.0).any())
        throw InvalidInput("row_normalize: zero row sum");
    Matrix p = degrees.cwiseInverse().asDiagonal() * k;
    return {std::move(p), std::move(degrees)};
}

double rates_from_eigs(double mu, double epsilon) {
    if (!(epsilon > 0.0))
        throw InvalidInput("rates_from_eigs: epsilon must be > 0");
    if (mu <= 0.0)
        throw InvalidInput("rates_from_eigs: mu must be positive");
    if (mu > 1.0 + 1e-10)
        throw InvalidInput("rates_from_eigs: mu exceeds 1");
    return std::max(0.0, -(2.0 / epsilon) * std::log(mu));
}

Embedding embed(const Matrix& k, const Vector& degrees, int n_coords, double epsilon) {
    validate_matrix(k, "embed");
    const Eigen::Index n = k.rows();
    if (degrees.size() != n)
        throw InvalidInput("embed: degree vector length mismatch");
    if (n_coords < 1 || n_coords + 1 > n)
        throw InvalidInput("embed: need k+1 <= N");

    // Symmetric conjugate of P = D^-1 K shares its spectrum and keeps the
    // numerics real and orthogonal.
    const Vector d_inv_sqrt = degrees.cwiseSqrt().cwiseInverse();
    Matrix s = d_inv_sqrt.asDiagonal() * k * d_inv_sqrt.asDiagonal();
    s = 0.5 * (s + s.transpose());

    auto [mu, v] = sym_eigs(s, n_coords + 1);
    for (int l = 0; l <= n_coords; ++l)
        if (!(mu(l) > 0.0))
            throw NumericalDegeneracy("embed: non-positive eigenvalue among the top k+1");

    Embedding emb;
    emb.epsilon = epsilon;
    emb.mu = mu;
    emb.psi.resize(n, n_coords + 1);
    emb.lambda.resize(n_coords + 1);
    for (int l = 0; l <= n_coords; ++l) {
        Vector psi = d_inv_sqrt.asDiagonal() * v.col(l);
        psi.normalize();
        Eigen::Index arg = 0;
        psi.cwiseAbs().maxCoeff(&arg);
        if (psi(arg) < 0.0)
            psi = -psi;
        emb.psi.col(l) = psi;
        emb.lambda(l) = rates_from_eigs(std::min(mu(l), 1.0), epsilon);
    }
    return emb;
}

int spectral_gap(const Vector& mu) {
    if (mu.size() < 4)
        throw InvalidInput("spectral_gap: need at least 3 nontrivial eigenvalues");
    int best = 1;
    double best_ratio = -1.0;
    for (int l = 1; l < mu.size(); ++l) {
        if (!(mu(l) > 0.0))
            break;
        const double ratio = mu(l - 1) / mu(l);
        if (ratio > best_ratio + 1e-15) {
            best_ratio = ratio;
            best = l;
        }
    }
    return best;
}

void write_embedding(const std::string& csv_path, const std::string& sidecar_path,
                     const Embedding& emb) {
    std::vector<std::string> names;
    for (int l = 1; l <= emb.n_nontrivial(); ++l)
        names.push_back("psi_" + std::to_string(l));
    write_table_csv(csv_path, emb.coords(), names);

    nlohmann::json j;
    j["epsilon"] = emb.epsilon;
    j["mu"] = std::vector<double>(emb.mu.data(), emb.mu.data() + emb.mu.size());
    j["lambda"] = std::vector<double>(emb.lambda.data(), emb.lambda.data() + emb.lambda.size());
    j["psi_0"] = std::vector<double>(emb.psi.col(0).data(), emb.psi.col(0).data() + emb.psi.rows());
    std::ofstream f(sidecar_path);
    if (!f)
        throw IoError("cannot open for writing: " + sidecar_path);
    f << j.dump(2) << '\n';
}

Embedding read_embedding(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream f(sidecar_path);
    if (!f)
        throw IoError("cannot open for reading: " + sidecar_path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(sidecar_path + ": " + e.what());
    }
    Embedding emb;
    emb.epsilon = j.at("epsilon").get<double>();
    const auto mu = j.at("mu").get<std::vector<double>>();
    const auto lambda = j.at("lambda").get<std::vector<double>>();
    const auto psi0 = j.at("psi_0").get<std::vector<double>>();
    emb.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    emb.lambda = Eigen::Map<const Vector>(lambda.data(), static_cast<Eigen::Index>(lambda.size()));

    Matrix coords = read_table_csv(csv_path);
    if (coords.cols() + 1 != emb.mu.size() ||
        coords.rows() != static_cast<Eigen::Index>(psi0.size()))
        throw IoError("read_embedding: sidecar inconsistent with coordinate CSV");
    emb.psi.resize(coords.rows(), coords.cols() + 1);
    emb.psi.col(0) = Eigen::Map<const Vector>(psi0.data(), static_cast<Eigen::Index>(psi0.size()));
    emb.psi.rightCols(coords.cols()) = coords;
    return emb;
}

} // namespace dmk
