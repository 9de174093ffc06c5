#include "stream_kpca/data.hpp"

#include "stream_kpca/error.hpp"
#include "stream_kpca/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stream_kpca {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  // Row-major draw order, independent of Eigen's storage order.
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = rng.normal();
  return M;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n < 1 || d < 1) throw ConfigError("synthetic data needs n >= 1 and d >= 1");
  if (s < 1 || s >= d) {
    throw ConfigError("signal dimension s=" + std::to_string(s) + " must satisfy 1 <= s < d=" +
                      std::to_string(d));
  }
  if (!(zeta > 0.0)) throw ConfigError("noise divisor zeta must be positive");
}

Vector random_noisy_signal_scales(std::size_t s, std::size_t d) {
  Vector D(static_cast<Eigen::Index>(s));
  for (std::size_t i = 1; i <= s; ++i) {
    D(static_cast<Eigen::Index>(i - 1)) = 1.0 - static_cast<double>(i - 1) / static_cast<double>(d);
  }
  return D;
}

Matrix gen_random_noisy(const SyntheticSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto d = static_cast<Eigen::Index>(spec.d);
  const auto s = static_cast<Eigen::Index>(spec.s);

  Rng rng_s(spec.seed, "data/S");
  Rng rng_u(spec.seed, "data/U");
  Rng rng_f(spec.seed, "data/F");

  const Matrix S = gaussian_matrix(n, s, rng_s);
  const Vector D = random_noisy_signal_scales(spec.s, spec.d);
  const Matrix G = gaussian_matrix(d, s, rng_u);
  Eigen::HouseholderQR<Matrix> qr(G);
  const Matrix Q = qr.householderQ() * Matrix::Identity(d, s);  // d x s, orthonormal columns
  const Matrix U = Q.transpose();

  Matrix A = S * D.asDiagonal() * U;
  if (std::isfinite(spec.zeta)) A += gaussian_matrix(n, d, rng_f) / spec.zeta;
  return A;
}

Matrix gen_gaussian_mixture(const MixtureSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.clusters < 1) {
    throw ConfigError("mixture needs n, d and clusters all >= 1");
  }
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto d = static_cast<Eigen::Index>(spec.d);
  Rng rng_c(spec.seed, "mixture/centers");
  Rng rng_a(spec.seed, "mixture/assign");
  Rng rng_p(spec.seed, "mixture/points");

  const Matrix centers =
      spec.center_scale * gaussian_matrix(static_cast<Eigen::Index>(spec.clusters), d, rng_c);
  Matrix A(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(rng_a.below(spec.clusters));
    for (Eigen::Index j = 0; j < d; ++j) A(i, j) = centers(c, j) + spec.spread * rng_p.normal();
  }
  return A;
}

}  // namespace stream_kpca
