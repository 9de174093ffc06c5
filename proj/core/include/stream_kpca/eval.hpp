#pragma once

#include "stream_kpca/kernels.hpp"
#include "stream_kpca/numerics.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stream_kpca {

// ---------------------------------------------------------------------------
// Error measures
// ---------------------------------------------------------------------------

/// ||G - Gp||_2 / n.
double spectral_error(const Matrix& G, const Matrix& Gp);
/// ||G - Gp||_F / n^2.
double frobenius_error(const Matrix& G, const Matrix& Gp);

struct RankKCheck {
  double lhs = 0.0;  // ||G - (Gp)_k||_F
  double rhs = 0.0;  // ||G - G_k||_F + ||G - Gp||_2 sqrt(k)
  bool holds = false;  // lhs <= rhs + 1e-6 n
};

/// Rank-k Frobenius bound driven by the measured spectral error.
RankKCheck rank_k_frobenius_check(const Matrix& G, const Matrix& Gp, std::size_t k);

/// Exact gram matrix together with its spectrum, computed once and reused
/// against several approximations.
struct GramOracle {
  Matrix G;
  Vector eigenvalues;  // non-increasing

  static GramOracle build(const KernelSpec& kernel, const Matrix& A);
  std::size_t n() const { return static_cast<std::size_t>(G.rows()); }
  // ||G - G_k||_F from the spectrum.
  double tail_frobenius(std::size_t k) const;
};

/// Best rank-k factor of Y: Y_k Y_k^T = (Y Y^T)_k.
Matrix best_rank_k_factor(const Matrix& Y, std::size_t k);

/// Measurements of Gp = Y Y^T against the oracle.
struct FactorErrors {
  double spectral_abs = 0.0;         // ||G - Gp||_2
  double frobenius_abs = 0.0;        // ||G - Gp||_F
  std::optional<double> rank_k_abs;  // ||G - (Gp)_k||_F
};

FactorErrors factor_errors(const GramOracle& oracle, const Matrix& Y,
                           std::optional<std::size_t> k = std::nullopt);

/// Same inequality as rank_k_frobenius_check, using precomputed pieces.
RankKCheck rank_k_frobenius_check(const GramOracle& oracle, const Matrix& Y, std::size_t k,
                                  double spectral_abs);

/// Phi = V Lambda^{1/2} with negative eigenvalues clamped to 0, so Phi Phi^T ~ G.
Matrix feature_matrix_from_gram(const Matrix& G);

/// max over eigenvectors v of G - Y Y^T of | ||Phi^T v||^2 - ||Y^T v||^2 |.
double max_directional_gap(const Matrix& G, const Matrix& Y);

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

enum class Method { skpca, rnca, nystrom };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct BenchmarkCell {
  Method method = Method::skpca;
  std::size_t sample_size = 0;    // m for skpca/rnca, c for nystrom
  std::size_t ell_requested = 0;  // skpca only; rounded up to even
  KernelSpec kernel;
};

struct ErrorReport {
  Method method = Method::skpca;
  std::size_t sample_size = 0;
  std::size_t ell_requested = 0;
  std::size_t ell = 0;
  std::size_t space_entries = 0;
  double spectral_err = 0.0;
  double frobenius_err = 0.0;
  std::optional<double> rank_k_frobenius;
  double train_seconds = 0.0;
  double test_seconds = 0.0;  // whole test set
  std::size_t test_n = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<double> eps;
  std::optional<double> delta;
  std::size_t k = 0;
  double sigma = 1.0;
};

struct BenchmarkOptions {
  std::size_t k = 5;
  std::size_t repetitions = 3;  // timings are medians over this many runs
  std::size_t jobs = 1;
  std::uint64_t master_seed = 0;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<std::size_t> oracle_max_n;  // defaults to oracle_max_n()
};

/// 5000, or STREAM_KPCA_ORACLE_MAX_N when set.
std::size_t oracle_max_n();

/// md + m ell, m^2 + md, or c^2 + cd.
std::size_t space_formula(Method method, std::size_t sample_size, std::size_t ell,
                          std::size_t d);

/// Trains every cell on `data`, times projection of `test_set`, and scores the
/// reconstructed gram against the exact one. Cell i draws its randomness from
/// derive_seed(master_seed, "cell/i"); results come back in grid order.
/// Throws ConfigError when data has more rows than the oracle guard.
std::vector<ErrorReport> run_benchmark(const std::vector<BenchmarkCell>& grid,
                                       const Matrix& data, const Matrix& test_set,
                                       const BenchmarkOptions& options);

struct TrainTestSplit {
  Matrix train;
  Matrix test;
};

/// Removes a uniformly random subset of `test_size` rows as the test set.
TrainTestSplit split_train_test(const Matrix& A, std::size_t test_size, std::uint64_t seed);

/// Column order of the report CSV.
const std::vector<std::string>& report_columns();
void write_reports_csv(std::ostream& out, const std::vector<ErrorReport>& reports);
void write_reports_jsonl(std::ostream& out, const std::vector<ErrorReport>& reports);

}  // namespace stream_kpca
