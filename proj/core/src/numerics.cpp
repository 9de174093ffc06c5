#include "stream_kpca/numerics.hpp"

#include "stream_kpca/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stream_kpca {

void require_finite(const Matrix& A, std::string_view what) {
  if (!A.allFinite()) {
    throw ContractViolation(std::string(what) + ": matrix contains NaN or Inf");
  }
}

bool is_symmetric(const Matrix& A, double rel_tol) {
  if (A.rows() != A.cols()) return false;
  const double scale = A.norm();
  return (A - A.transpose()).norm() <= rel_tol * std::max(scale, std::numeric_limits<double>::min());
}

SvdResult thin_svd(const Matrix& A) {
  if (A.rows() < 1 || A.cols() < 1) throw ContractViolation("thin_svd: empty matrix");
  require_finite(A, "thin_svd");

  // Jacobi with column-pivoting QR preconditioning. Eigen 3.4.0's BDCSVD returns
  // inaccurate factors on some short wide inputs (seen on 16 x 40 sketches).
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalFailure("thin_svd: SVD did not converge");
  }
  SvdResult out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (!out.U.allFinite() || !out.S.allFinite() || !out.V.allFinite()) {
    throw NumericalFailure("thin_svd: non-finite factors");
  }
  return out;
}

namespace {

Matrix symmetrized(const Matrix& G, std::string_view what) {
  if (G.rows() != G.cols()) {
    throw ContractViolation(std::string(what) + ": matrix is " + std::to_string(G.rows()) + "x" +
                            std::to_string(G.cols()) + ", expected square");
  }
  if (G.rows() == 0) throw ContractViolation(std::string(what) + ": empty matrix");
  require_finite(G, what);
  return 0.5 * (G + G.transpose());
}

}  // namespace

EigResult sym_eig(const Matrix& G) {
  const Matrix S = symmetrized(G, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalFailure("sym_eig: did not converge");
  // Eigen returns ascending order.
  return EigResult{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

Vector sym_eigenvalues(const Matrix& G) {
  const Matrix S = symmetrized(G, "sym_eigenvalues");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("sym_eigenvalues: did not converge");
  return solver.eigenvalues().reverse();
}

double default_pinv_tolerance(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

Matrix pinv(const Matrix& A, std::optional<double> tol) {
  const double rel = tol.value_or(default_pinv_tolerance(A.rows(), A.cols()));
  if (rel < 0.0) throw ContractViolation("pinv: negative tolerance");
  if (A.size() == 0) return Matrix::Zero(A.cols(), A.rows());

  const SvdResult svd = thin_svd(A);
  const double cutoff = rel * svd.S(0);
  Vector inv = Vector::Zero(svd.S.size());
  for (Eigen::Index i = 0; i < svd.S.size(); ++i) {
    if (svd.S(i) > cutoff && svd.S(i) > 0.0) inv(i) = 1.0 / svd.S(i);
  }
  return svd.V * inv.asDiagonal() * svd.U.transpose();
}

double spectral_norm_power(const Matrix& A, const PowerIterationOptions& opts) {
  require_finite(A, "spectral_norm");
  if (A.size() == 0) return 0.0;
  if (A.norm() == 0.0) return 0.0;

  const Eigen::Index n = A.cols();
  Vector x = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vector y = A * x;
  if (y.norm() == 0.0) {
    // All-ones start lies in the null space; restart from the heaviest column.
    Eigen::Index j = 0;
    A.colwise().squaredNorm().maxCoeff(&j);
    x = Vector::Unit(n, j);
    y = A * x;
  }

  double rq = y.squaredNorm();
  for (int it = 0; it < opts.max_iterations; ++it) {
    Vector w = A.transpose() * y;
    const double wn = w.norm();
    if (wn == 0.0) return std::sqrt(rq);
    x = w / wn;
    y = A * x;
    const double next = y.squaredNorm();
    if (std::abs(next - rq) <= opts.tolerance * next) return std::sqrt(next);
    rq = next;
  }
  throw NumericalFailure("spectral_norm: power iteration did not converge in " +
                         std::to_string(opts.max_iterations) + " iterations");
}

double spectral_norm(const Matrix& A) {
  require_finite(A, "spectral_norm");
  if (A.size() == 0) return 0.0;
  if (is_symmetric(A)) {
    const Vector ev = sym_eigenvalues(A);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  return spectral_norm_power(A);
}

}  // namespace stream_kpca
