#pragma once

#include <Eigen/Dense>
#include <utility>

namespace dmk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws InvalidInput if the matrix has a zero dimension or non-finite entries.
void validate_matrix(const Matrix& m, const char* name);

/// Default relative singular-value cutoff for pseudo_inverse.
inline double default_pinv_tol(Eigen::Index rows, Eigen::Index cols) {
    return 1e-10 * static_cast<double>(std::max(rows, cols));
}

/// Moore-Penrose pseudoinverse via SVD. Singular values sigma_i <=
/// rel_tol * sigma_max are treated as zero. rel_tol < 0 selects the default.
Matrix pseudo_inverse(const Matrix& m, double rel_tol = -1.0);

/// Pseudoinverse of a symmetric positive-semidefinite matrix via its
/// eigendecomposition. Eigenvalues <= rel_tol * max eigenvalue are treated as
/// zero; tiny negative eigenvalues from round-off are dropped rather than
/// inverted (an SVD would flip their sign and invert them). The result is
/// symmetric PSD by construction.
Matrix pseudo_inverse_psd(const Matrix& m, double rel_tol = -1.0);

/// Top-k eigenpairs of a symmetric matrix, eigenvalues descending.
/// Eigenvectors are unit norm with the entry of largest magnitude positive
/// (ties broken by lowest index). Throws InvalidInput if S is not symmetric
/// to 1e-10 or k exceeds its dimension.
std::pair<Vector, Matrix> sym_eigs(const Matrix& s, int k);

} // namespace dmk
