#pragma once

#include "stream_kpca/fd.hpp"
#include "stream_kpca/io.hpp"
#include "stream_kpca/kernels.hpp"
#include "stream_kpca/rff.hpp"
#include "stream_kpca/space.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace stream_kpca {

/// ceil(((9 + 8 eps) / eps^2) * ln(2n / delta)): feature count for the for-all
/// spectral guarantee ||G - ZZ^T||_2 <= eps n with probability 1 - delta.
std::size_t rff_feature_count(double eps, double delta, std::size_t n);

/// ceil(4 / eps), rounded up to the next even number.
std::size_t sketch_size_for(double eps);

/// ceil(ln(2n / delta) / eps^2): Nystrom sample count at the same accuracy.
std::size_t nystrom_sample_count(double eps, double delta, std::size_t n);

// Rounds an odd sketch size up to even.
inline std::size_t even_sketch_size(std::size_t ell) { return ell % 2 == 0 ? ell : ell + 1; }

struct SkpcaConfig {
  std::size_t m = 0;
  std::size_t ell = 0;
  KernelSpec kernel;
  std::uint64_t seed = 0;
  std::optional<double> eps;
  std::optional<double> delta;

  /// m and ell derived from (eps, delta) for a stream of n points.
  static SkpcaConfig from_error(double eps, double delta, std::size_t n, KernelSpec kernel,
                                std::uint64_t seed);

  // Throws ConfigError unless m >= ell >= 2, ell even and eps, delta in (0, 1).
  void validate() const;
};

struct Projection {
  Vector lifted;   // z(x), length m
  Vector loading;  // first k coordinates of W^T z(x)
  double residual = 0.0;  // ||z(x) - W_k loading||
};

/// Trained SKPCA model: the feature map plus the learned ell-dimensional basis.
/// Immutable; project() is safe to call from many threads.
class SkpcaModel {
 public:
  SkpcaModel(FeatureMap fm, Matrix W, Vector S, std::size_t n_seen);

  // O(dm + mk). Throws ContractViolation for k outside [1, ell] or a wrong d.
  Projection project(const Eigen::Ref<const Vector>& x, std::size_t k) const;

  /// Y = Z W (n x ell), so the reconstructed gram is Y Y^T.
  Matrix factor(const Matrix& A) const;
  /// (ZW)(ZW)^T, formed through the n x ell intermediate. Evaluation only.
  Matrix reconstruct_gram(const Matrix& A) const;

  const FeatureMap& feature_map() const { return fm_; }
  const Matrix& basis() const { return W_; }
  const Vector& singular_values() const { return S_; }
  std::size_t ell() const { return static_cast<std::size_t>(W_.cols()); }
  std::size_t m() const { return fm_.m(); }
  std::size_t d() const { return fm_.d(); }
  std::size_t n_seen() const { return n_seen_; }

 private:
  FeatureMap fm_;
  Matrix W_;
  Vector S_;
  std::size_t n_seen_;
};

/// One-pass SKPCA training: lift each point with the feature map and insert the
/// lifted row into a Frequent Directions sketch.
class SkpcaTrainer {
 public:
  explicit SkpcaTrainer(const SkpcaConfig& config, EntryCounter* counter = nullptr);

  // The first point fixes d unless the config was built for a known d.
  void push(const Eigen::Ref<const Vector>& x);
  // W from a fresh SVD of the final sketch. Throws ContractViolation if nothing was pushed.
  SkpcaModel finish();

  std::size_t n_seen() const { return n_seen_; }
  const FdSketch& sketch() const { return sketch_; }

 private:
  SkpcaConfig config_;
  EntryCounter* counter_;
  std::optional<FeatureMap> fm_;
  FdSketch sketch_;
  Vector lifted_;
  std::size_t n_seen_ = 0;
  EntryCounter::Lease fm_lease_;
  EntryCounter::Lease buffer_lease_;
};

SkpcaModel train(const SkpcaConfig& config, RowStream& stream, EntryCounter* counter = nullptr);
SkpcaModel train(const SkpcaConfig& config, const Matrix& A, EntryCounter* counter = nullptr);

}  // namespace stream_kpca
