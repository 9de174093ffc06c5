#pragma once

#include "stream_kpca/io.hpp"
#include "stream_kpca/kernels.hpp"
#include "stream_kpca/rff.hpp"
#include "stream_kpca/rng.hpp"
#include "stream_kpca/skpca.hpp"
#include "stream_kpca/space.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace stream_kpca {

// ---------------------------------------------------------------------------
// RNCA: exact linear PCA on the random-feature matrix, via the m x m covariance.
// ---------------------------------------------------------------------------

class RncaModel {
 public:
  // eigenvalues non-increasing; eigenvectors m x r with r <= m columns.
  RncaModel(FeatureMap fm, std::optional<Matrix> covariance, Vector eigenvalues,
            Matrix eigenvectors, std::size_t n_seen);

  // Loading = first k coordinates of V^T z(x); residual = ||z(x) - V_k loading||.
  Projection project(const Eigen::Ref<const Vector>& x, std::size_t k) const;
  /// Y = Z V_k, so the rank-k reconstruction is Y Y^T.
  Matrix factor(const Matrix& A, std::size_t k) const;
  /// Z V_k V_k^T Z^T. k = m gives Z Z^T. Throws ContractViolation for k > r.
  Matrix reconstruct(const Matrix& A, std::size_t k) const;

  const FeatureMap& feature_map() const { return fm_; }
  // Present on freshly trained models; models loaded from disk carry only the eigenpairs.
  const std::optional<Matrix>& covariance() const { return cov_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  std::size_t stored_rank() const { return static_cast<std::size_t>(eigenvectors_.cols()); }
  std::size_t m() const { return fm_.m(); }
  std::size_t d() const { return fm_.d(); }
  std::size_t n_seen() const { return n_seen_; }

 private:
  FeatureMap fm_;
  std::optional<Matrix> cov_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  std::size_t n_seen_;
};

/// Accumulates Cov = sum_i z_i z_i^T one outer product per point; the
/// eigendecomposition runs once in finish().
class RncaTrainer {
 public:
  explicit RncaTrainer(FeatureMap fm, EntryCounter* counter = nullptr);
  void push(const Eigen::Ref<const Vector>& x);
  RncaModel finish();
  std::size_t n_seen() const { return n_seen_; }

 private:
  FeatureMap fm_;
  EntryCounter* counter_;
  Matrix cov_;  // lower triangle is authoritative until finish()
  Vector lifted_;
  std::size_t n_seen_ = 0;
  EntryCounter::Lease fm_lease_;
  EntryCounter::Lease cov_lease_;
  EntryCounter::Lease buffer_lease_;
};

RncaModel rnca_train(const FeatureMap& fm, RowStream& stream, EntryCounter* counter = nullptr);
RncaModel rnca_train(const FeatureMap& fm, const Matrix& A, EntryCounter* counter = nullptr);

// ---------------------------------------------------------------------------
// Streaming Nystrom: c independent single-slot reservoirs, then C W_k^+ C^T.
// ---------------------------------------------------------------------------

struct NystromProjection {
  Vector c_row;    // K(x, sample_i), length c
  Vector loading;  // length k
  double residual = 0.0;  // norm of the retained-eigenspace coordinates beyond k
};

class NystromModel {
 public:
  // Builds W from the samples and its rank-k pseudoinverse from one eigensolve.
  NystromModel(KernelSpec kernel, Matrix samples, std::size_t k, std::size_t n_seen,
               std::vector<std::size_t> replacements = {}, EntryCounter* counter = nullptr);

  NystromProjection project(const Eigen::Ref<const Vector>& x) const;
  /// Y = C V_k Lambda_k^{-1/2}, so Y Y^T = C W_k^+ C^T.
  Matrix factor(const Matrix& A) const;
  /// C W_k^+ C^T with C_ij = K(a_i, sample_j). Evaluation only.
  Matrix reconstruct(const Matrix& A) const;

  const KernelSpec& kernel() const { return kernel_; }
  const Matrix& samples() const { return samples_; }
  const Matrix& landmark_gram() const { return W_; }
  const Matrix& rank_k_pinv() const { return Wk_pinv_; }
  // Eigenpairs of W above the pinv cutoff, eigenvalues non-increasing.
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }  // c x retained
  std::size_t retained_rank() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  std::size_t c() const { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(samples_.cols()); }
  std::size_t k() const { return k_; }
  std::size_t n_seen() const { return n_seen_; }
  const std::vector<std::size_t>& replacements() const { return replacements_; }

 private:
  KernelSpec kernel_;
  Matrix samples_;
  std::size_t k_;
  std::size_t n_seen_;
  std::vector<std::size_t> replacements_;
  Matrix W_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  Matrix Wk_pinv_;
};

/// c slots, each an independent size-1 reservoir: at step t the slot takes the
/// new point with probability 1/t. Randomness comes from the "nystrom/reservoir"
/// stream of the seed, drawn slot by slot for each point.
class NystromTrainer {
 public:
  NystromTrainer(KernelSpec kernel, std::size_t c, std::size_t k, std::uint64_t seed,
                 EntryCounter* counter = nullptr);
  void push(const Eigen::Ref<const Vector>& x);
  NystromModel finish();
  std::size_t n_seen() const { return n_seen_; }

 private:
  KernelSpec kernel_;
  std::size_t c_;
  std::size_t k_;
  Rng rng_;
  EntryCounter* counter_;
  Matrix samples_;
  std::vector<std::size_t> replacements_;
  std::size_t n_seen_ = 0;
  EntryCounter::Lease samples_lease_;
};

NystromModel nystrom_train(const KernelSpec& kernel, std::size_t c, std::size_t k,
                           std::uint64_t seed, RowStream& stream,
                           EntryCounter* counter = nullptr);
NystromModel nystrom_train(const KernelSpec& kernel, std::size_t c, std::size_t k,
                           std::uint64_t seed, const Matrix& A, EntryCounter* counter = nullptr);

}  // namespace stream_kpca
