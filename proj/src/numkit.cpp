#include "dmk/numkit.hpp"

#include "dmk/errors.hpp"

#include <cmath>
#include <string>

namespace dmk {

void validate_matrix(const Matrix& m, const char* name) {
    if (m.rows() < 1 || m.cols() < 1)
        throw InvalidInput(std::string(name) + ": dimension-zero matrix");
    if (!m.allFinite())
        throw InvalidInput(std::string(name) + ": non-finite entries");
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
    validate_matrix(m, "pseudo_inverse");
    if (rel_tol < 0.0)
        rel_tol = default_pinv_tol(m.rows(), m.cols());
    if (rel_tol >= 1.0)
        throw InvalidInput("pseudo_inverse: rel_tol must be in (0, 1)");

    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = rel_tol * (sigma.size() > 0 ? sigma(0) : 0.0);

    Vector inv_sigma = Vector::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cutoff && sigma(i) > 0.0)
            inv_sigma(i) = 1.0 / sigma(i);

    return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

Matrix pseudo_inverse_psd(const Matrix& m, double rel_tol) {
    validate_matrix(m, "pseudo_inverse_psd");
    if (m.rows() != m.cols())
        throw InvalidInput("pseudo_inverse_psd: matrix not square");
    if (rel_tol < 0.0)
        rel_tol = default_pinv_tol(m.rows(), m.cols());
    if (rel_tol >= 1.0)
        throw InvalidInput("pseudo_inverse_psd: rel_tol must be in (0, 1)");

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success)
        throw NumericalDegeneracy("pseudo_inverse_psd: eigensolver failed");
    const Vector& ev = es.eigenvalues();
    const double cutoff = rel_tol * std::max(0.0, ev(ev.size() - 1));

    Vector inv_ev = Vector::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cutoff && ev(i) > 0.0)
            inv_ev(i) = 1.0 / ev(i);
    return es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();
}

std::pair<Vector, Matrix> sym_eigs(const Matrix& s, int k) {
    validate_matrix(s, "sym_eigs");
    if (s.rows() != s.cols())
        throw InvalidInput("sym_eigs: matrix not square");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if (((s - s.transpose()).cwiseAbs().maxCoeff()) > 1e-10 * scale)
        throw InvalidInput("sym_eigs: matrix not symmetric to 1e-10");
    if (k < 1 || k > s.rows())
        throw InvalidInput("sym_eigs: k out of range");

    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
        throw NumericalDegeneracy("sym_eigs: eigensolver failed");

    // Eigen returns ascending order; take the top k reversed.
    const Eigen::Index n = s.rows();
    Vector values(k);
    Matrix vectors(n, k);
    for (int i = 0; i < k; ++i) {
        values(i) = es.eigenvalues()(n - 1 - i);
        Vector v = es.eigenvectors().col(n - 1 - i);
        v.normalize();
        // Sign convention: entry of largest magnitude positive, lowest index wins ties.
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = std::abs(v(j));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (v(arg) < 0.0)
            v = -v;
        vectors.col(i) = v;
    }
    return {std::move(values), std::move(vectors)};
}

} // namespace dmk
