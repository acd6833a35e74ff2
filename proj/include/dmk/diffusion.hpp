#pragma once

#include "dmk/numkit.hpp"

#include <string>
#include <utility>

namespace dmk {

/// Diffusion-maps output. Index 0 holds the trivial pair (mu = 1, constant
/// eigenvector); downstream model assembly uses columns 1..k only.
struct Embedding {
    double epsilon = 0.0;
    Vector mu;     // k+1 eigenvalues of P, descending, mu(0) ~ 1
    Vector lambda; // rates -(2/eps) log mu, nondecreasing
    Matrix psi;    // N x (k+1) unit-norm eigenvectors of P

    int n_nontrivial() const { return static_cast<int>(mu.size()) - 1; }
    /// Nontrivial coordinates psi^(1)..psi^(k).
    Matrix coords() const { return psi.rightCols(psi.cols() - 1); }
};

/// multiplier times the median of the strictly-upper-triangular entries of D.
double median_scale(const Matrix& d, double multiplier = 1.0);

/// K(i,j) = exp(-D(i,j)^2 / epsilon^2). Parallel over rows.
Matrix build_kernel(const Matrix& d, double epsilon);

/// Row-stochastic normalization; returns (P, degrees).
std::pair<Matrix, Vector> row_normalize(const Matrix& k);

/// Spectral embedding of P = diag(degrees)^-1 K, computed through the
/// symmetric conjugate S = D^-1/2 K D^-1/2. Returns the top k+1 eigenpairs
/// (trivial pair included at index 0).
Embedding embed(const Matrix& k, const Vector& degrees, int n_coords, double epsilon);

/// lambda = -(2/epsilon) log(mu), clamped at zero.
double rates_from_eigs(double mu, double epsilon);

/// Eigenvalue-ratio heuristic for the embedding dimension: the index l >= 1
/// (into the descending sequence, trivial value first) maximizing
/// mu(l-1)/mu(l), ties broken low. Advisory; experiment configs may override.
int spectral_gap(const Vector& mu);

/// CSV of the nontrivial coordinates plus a JSON sidecar with epsilon, mu,
/// lambda (trivial pair included).
void write_embedding(const std::string& csv_path, const std::string& sidecar_path,
                     const Embedding& emb);
Embedding read_embedding(const std::string& csv_path, const std::string& sidecar_path);

} // namespace dmk
