#include "stream_kpca/rff.hpp"

#include "stream_kpca/error.hpp"
#include "stream_kpca/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace stream_kpca {

FeatureMap FeatureMap::sample(const KernelSpec& spec, std::size_t m, std::size_t d,
                              std::uint64_t seed) {
  spec.validate();
  if (m < 1 || d < 1) throw ConfigError("feature map needs m >= 1 and d >= 1");

  FeatureMap fm;
  fm.record_ = FeatureMapRecord{spec, m, d, seed};
  fm.scale_ = std::sqrt(2.0 / static_cast<double>(m));

  Rng rng(seed, "feature_map");
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(d);
  // Gaussian kernel: the Fourier transform is N(0, sigma^-2 I).
  const double freq_scale = 1.0 / spec.sigma;
  fm.frequencies_.resize(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index t = 0; t < cols; ++t) fm.frequencies_(j, t) = freq_scale * rng.normal();
  }
  fm.phases_.resize(rows);
  for (Eigen::Index j = 0; j < rows; ++j) {
    fm.phases_(j) = 2.0 * std::numbers::pi * rng.uniform_open_closed();
  }
  return fm;
}

FeatureMap FeatureMap::from_record(const FeatureMapRecord& record) {
  return sample(record.kernel, record.m, record.d, record.seed);
}

void FeatureMap::apply_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  if (static_cast<std::size_t>(x.size()) != d()) {
    throw ContractViolation("feature map expects dimension " + std::to_string(d()) + ", got " +
                            std::to_string(x.size()));
  }
  out.noalias() = frequencies_ * x;
  out = scale_ * (out + phases_).array().cos().matrix();
}

Vector FeatureMap::apply(const Eigen::Ref<const Vector>& x) const {
  Vector z(static_cast<Eigen::Index>(m()));
  apply_into(x, z);
  return z;
}

Matrix FeatureMap::apply_batch(const Matrix& A) const {
  if (static_cast<std::size_t>(A.cols()) != d()) {
    throw ContractViolation("feature map expects " + std::to_string(d()) + " columns, got " +
                            std::to_string(A.cols()));
  }
  Matrix Z = A * frequencies_.transpose();
  Z.rowwise() += phases_.transpose();
  return scale_ * Z.array().cos().matrix();
}

}  // namespace stream_kpca
