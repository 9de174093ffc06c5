#pragma once

#include "stream_kpca/numerics.hpp"

#include <cstddef>
#include <cstdint>

namespace stream_kpca {

/// Parameters of the RandomNoisy generator A = S D U + F / zeta.
struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t s = 50;  // signal dimension
  double zeta = 10.0;  // noise divisor
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError unless 1 <= s < d, n >= 1, zeta > 0
};

/// S (n x s) and F (n x d) are i.i.d. N(0, 1); D = diag(1 - (i - 1)/d), i = 1..s;
/// U (s x d) has orthonormal rows from the QR factor of a Gaussian d x s matrix.
/// zeta = +infinity drops the noise term.
Matrix gen_random_noisy(const SyntheticSpec& spec);

/// The diagonal of D for a given spec.
Vector random_noisy_signal_scales(std::size_t s, std::size_t d);

/// Isotropic Gaussian clusters: centers ~ N(0, center_scale^2 I), points ~
/// N(center, spread^2 I), cluster index uniform.
struct MixtureSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t clusters = 5;
  double center_scale = 1.0;
  double spread = 0.5;
  std::uint64_t seed = 0;
};

Matrix gen_gaussian_mixture(const MixtureSpec& spec);

}  // namespace stream_kpca
