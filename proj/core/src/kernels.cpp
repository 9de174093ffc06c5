#include "stream_kpca/kernels.hpp"

#include "stream_kpca/error.hpp"

#include <cmath>
#include <string>

namespace stream_kpca {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian:
      return "gaussian";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("kernel bandwidth sigma must be positive and finite, got " +
                      std::to_string(sigma));
  }
}

KernelSpec gaussian_kernel(double sigma) {
  KernelSpec spec{KernelFamily::gaussian, sigma};
  spec.validate();
  return spec;
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size() || x.size() == 0) {
    throw ContractViolation("eval_kernel: dimension mismatch (" + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()) + ")");
  }
  return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
}

namespace {

// Points as contiguous columns.
double kernel_columns(double inv_two_sigma_sq, const Matrix& P, Eigen::Index i, const Matrix& Q,
                      Eigen::Index j) {
  return std::exp(-(P.col(i) - Q.col(j)).squaredNorm() * inv_two_sigma_sq);
}

}  // namespace

Matrix gram(const KernelSpec& spec, const Matrix& A) {
  spec.validate();
  if (A.rows() < 1) throw ContractViolation("gram: no points");
  require_finite(A, "gram");
  const Matrix P = A.transpose();
  const Eigen::Index n = A.rows();
  const double s = 1.0 / (2.0 * spec.sigma * spec.sigma);

  Matrix G(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    G(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = kernel_columns(s, P, i, P, j);
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& A, const Matrix& B) {
  spec.validate();
  if (A.cols() != B.cols()) {
    throw ContractViolation("cross_gram: dimension mismatch (" + std::to_string(A.cols()) +
                            " vs " + std::to_string(B.cols()) + ")");
  }
  const Matrix P = A.transpose();
  const Matrix Q = B.transpose();
  const double s = 1.0 / (2.0 * spec.sigma * spec.sigma);
  Matrix C(A.rows(), B.rows());
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) C(i, j) = kernel_columns(s, P, i, Q, j);
  }
  return C;
}

Matrix best_rank_k(const Matrix& G, std::size_t k) {
  const auto n = static_cast<std::size_t>(G.rows());
  if (k < 1 || k > n) {
    throw ContractViolation("best_rank_k: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");
  }
  const EigResult eig = sym_eig(G);
  const auto kk = static_cast<Eigen::Index>(k);
  const Matrix Vk = eig.vectors.leftCols(kk);
  return Vk * eig.values.head(kk).asDiagonal() * Vk.transpose();
}

}  // namespace stream_kpca
