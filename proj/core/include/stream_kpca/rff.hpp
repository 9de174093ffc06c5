#pragma once

#include "stream_kpca/kernels.hpp"
#include "stream_kpca/numerics.hpp"

#include <cstddef>
#include <cstdint>

namespace stream_kpca {

/// The reproducible identity of a feature map: enough to regenerate it bit for bit.
struct FeatureMapRecord {
  KernelSpec kernel;
  std::size_t m = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const FeatureMapRecord&, const FeatureMapRecord&) = default;
};

/// m frozen random Fourier features z(x)_j = sqrt(2/m) cos(r_j^T x + gamma_j).
///
/// For the Gaussian kernel of bandwidth sigma, r_j ~ N(0, sigma^-2 I_d) and
/// gamma_j ~ Unif(0, 2pi]. Draws come from the "feature_map" stream of the seed:
/// all frequencies first (row-major, j over m then coordinate over d), then phases.
/// Immutable once sampled.
class FeatureMap {
 public:
  static FeatureMap sample(const KernelSpec& spec, std::size_t m, std::size_t d,
                           std::uint64_t seed);
  static FeatureMap from_record(const FeatureMapRecord& record);

  Vector apply(const Eigen::Ref<const Vector>& x) const;
  // Writes z(x) into out (length m) without allocating.
  void apply_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;
  // Row i of the result is apply(row i of A).
  Matrix apply_batch(const Matrix& A) const;

  const Matrix& frequencies() const { return frequencies_; }  // m x d
  const Vector& phases() const { return phases_; }
  std::size_t m() const { return record_.m; }
  std::size_t d() const { return record_.d; }
  const KernelSpec& kernel() const { return record_.kernel; }
  std::uint64_t seed() const { return record_.seed; }
  double scale() const { return scale_; }
  const FeatureMapRecord& record() const { return record_; }

  // md + m: frequencies plus phases.
  std::size_t logical_entries() const { return record_.m * record_.d + record_.m; }

 private:
  FeatureMap() = default;

  FeatureMapRecord record_;
  Matrix frequencies_;
  Vector phases_;
  double scale_ = 0.0;
};

}  // namespace stream_kpca
