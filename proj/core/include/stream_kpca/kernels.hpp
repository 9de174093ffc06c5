#pragma once

#include "stream_kpca/numerics.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace stream_kpca {

enum class KernelFamily { gaussian };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Shift-invariant kernel K(x, y) = K(x - y), normalized so K(x, x) = 1.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double sigma = 1.0;

  // Throws ConfigError unless sigma is positive and finite.
  void validate() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

KernelSpec gaussian_kernel(double sigma = 1.0);

/// exp(-||x - y||^2 / (2 sigma^2)).
double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y);

/// Exact n x n gram matrix over the rows of A. Only the upper triangle is
/// evaluated; the lower triangle is mirrored and the diagonal is exactly 1.
Matrix gram(const KernelSpec& spec, const Matrix& A);

/// n x c matrix of K(a_i, b_j) for rows a_i of A and rows b_j of B.
Matrix cross_gram(const KernelSpec& spec, const Matrix& A, const Matrix& B);

/// Best rank-k approximation V_k Lambda_k V_k^T of a symmetric matrix.
Matrix best_rank_k(const Matrix& G, std::size_t k);

}  // namespace stream_kpca
