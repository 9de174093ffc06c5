#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string_view>

namespace stream_kpca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition A = U * diag(S) * V^T with r = min(rows, cols).
/// S is non-increasing and non-negative.
struct SvdResult {
  Matrix U;
  Vector S;
  Matrix V;
};

/// Eigenpairs of a symmetric matrix, eigenvalues non-increasing.
struct EigResult {
  Vector values;
  Matrix vectors;
};

struct PowerIterationOptions {
  double tolerance = 1e-6;  // relative change in the Rayleigh quotient
  int max_iterations = 10000;
};

// Throws ContractViolation if any entry is NaN or infinite.
void require_finite(const Matrix& A, std::string_view what);

SvdResult thin_svd(const Matrix& A);

/// Symmetric eigendecomposition of (G + G^T)/2.
EigResult sym_eig(const Matrix& G);

/// Eigenvalues only (non-increasing); roughly 3x cheaper than sym_eig for large inputs.
Vector sym_eigenvalues(const Matrix& G);

/// Default relative cutoff for pinv: max(rows, cols) * machine epsilon.
double default_pinv_tolerance(Eigen::Index rows, Eigen::Index cols);

/// Moore-Penrose pseudoinverse. Singular values <= tol * sigma_1 are treated as zero;
/// tol defaults to default_pinv_tolerance().
Matrix pinv(const Matrix& A, std::optional<double> tol = std::nullopt);

/// Largest singular value. Symmetric inputs go through the dense symmetric
/// eigensolver; everything else through power iteration on A^T A.
double spectral_norm(const Matrix& A);

/// Power iteration on A^T A from the normalized all-ones start vector.
double spectral_norm_power(const Matrix& A, const PowerIterationOptions& opts = {});

bool is_symmetric(const Matrix& A, double rel_tol = 1e-12);

}  // namespace stream_kpca
