#include "stream_kpca/eval.hpp"

#include "stream_kpca/baselines.hpp"
#include "stream_kpca/error.hpp"
#include "stream_kpca/io.hpp"
#include "stream_kpca/rng.hpp"
#include "stream_kpca/skpca.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

namespace stream_kpca {

namespace {

void require_same_square(const Matrix& G, const Matrix& Gp, const char* what) {
  if (G.rows() != G.cols() || G.rows() != Gp.rows() || G.cols() != Gp.cols() || G.rows() == 0) {
    throw ContractViolation(std::string(what) + ": expected two non-empty n x n matrices, got " +
                            std::to_string(G.rows()) + "x" + std::to_string(G.cols()) + " and " +
                            std::to_string(Gp.rows()) + "x" + std::to_string(Gp.cols()));
  }
}

// max |lambda| of a symmetric matrix.
double symmetric_norm2(const Matrix& D) {
  const Vector ev = sym_eigenvalues(D);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace

double spectral_error(const Matrix& G, const Matrix& Gp) {
  require_same_square(G, Gp, "spectral_error");
  if (!is_symmetric(G, 1e-8) || !is_symmetric(Gp, 1e-8)) {
    throw ContractViolation("spectral_error: inputs must be symmetric");
  }
  return symmetric_norm2(G - Gp) / static_cast<double>(G.rows());
}

double frobenius_error(const Matrix& G, const Matrix& Gp) {
  require_same_square(G, Gp, "frobenius_error");
  const double n = static_cast<double>(G.rows());
  return (G - Gp).norm() / (n * n);
}

RankKCheck rank_k_frobenius_check(const Matrix& G, const Matrix& Gp, std::size_t k) {
  require_same_square(G, Gp, "rank_k_frobenius_check");
  const double n = static_cast<double>(G.rows());
  RankKCheck out;
  out.lhs = (G - best_rank_k(Gp, k)).norm();
  out.rhs = (G - best_rank_k(G, k)).norm() + symmetric_norm2(G - Gp) * std::sqrt(static_cast<double>(k));
  out.holds = out.lhs <= out.rhs + 1e-6 * n;
  return out;
}

GramOracle GramOracle::build(const KernelSpec& kernel, const Matrix& A) {
  GramOracle o;
  o.G = gram(kernel, A);
  o.eigenvalues = sym_eigenvalues(o.G);
  return o;
}

double GramOracle::tail_frobenius(std::size_t k) const {
  const auto kk = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), eigenvalues.size());
  return eigenvalues.tail(eigenvalues.size() - kk).norm();
}

Matrix best_rank_k_factor(const Matrix& Y, std::size_t k) {
  if (k < 1) throw ContractViolation("best_rank_k_factor: k must be at least 1");
  const SvdResult svd = thin_svd(Y);
  const auto kk = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), svd.S.size());
  return svd.U.leftCols(kk) * svd.S.head(kk).asDiagonal();
}

FactorErrors factor_errors(const GramOracle& oracle, const Matrix& Y, std::optional<std::size_t> k) {
  if (Y.rows() != oracle.G.rows()) {
    throw ContractViolation("factor_errors: factor has " + std::to_string(Y.rows()) +
                            " rows, oracle has " + std::to_string(oracle.G.rows()));
  }
  FactorErrors out;
  const Matrix D = oracle.G - Y * Y.transpose();
  out.spectral_abs = symmetric_norm2(D);
  out.frobenius_abs = D.norm();
  if (k) {
    const Matrix Yk = best_rank_k_factor(Y, *k);
    out.rank_k_abs = (oracle.G - Yk * Yk.transpose()).norm();
  }
  return out;
}

RankKCheck rank_k_frobenius_check(const GramOracle& oracle, const Matrix& Y, std::size_t k,
                                  double spectral_abs) {
  const Matrix Yk = best_rank_k_factor(Y, k);
  RankKCheck out;
  out.lhs = (oracle.G - Yk * Yk.transpose()).norm();
  out.rhs = oracle.tail_frobenius(k) + spectral_abs * std::sqrt(static_cast<double>(k));
  out.holds = out.lhs <= out.rhs + 1e-6 * static_cast<double>(oracle.n());
  return out;
}

Matrix feature_matrix_from_gram(const Matrix& G) {
  const EigResult eig = sym_eig(G);
  return eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double max_directional_gap(const Matrix& G, const Matrix& Y) {
  const Matrix Phi = feature_matrix_from_gram(G);
  const EigResult eig = sym_eig(G - Y * Y.transpose());
  const Vector phi_energy = (Phi.transpose() * eig.vectors).colwise().squaredNorm();
  const Vector y_energy = (Y.transpose() * eig.vectors).colwise().squaredNorm();
  return (phi_energy - y_energy).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

std::string_view to_string(Method method) {
  switch (method) {
    case Method::skpca:
      return "skpca";
    case Method::rnca:
      return "rnca";
    case Method::nystrom:
      return "nystrom";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "skpca") return Method::skpca;
  if (name == "rnca") return Method::rnca;
  if (name == "nystrom") return Method::nystrom;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected skpca, rnca or nystrom)");
}

std::size_t oracle_max_n() {
  constexpr std::size_t kDefault = 5000;
  const char* env = std::getenv("STREAM_KPCA_ORACLE_MAX_N");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) {
    throw ConfigError(std::string("STREAM_KPCA_ORACLE_MAX_N must be a positive integer, got '") +
                      env + "'");
  }
  return static_cast<std::size_t>(v);
}

std::size_t space_formula(Method method, std::size_t sample_size, std::size_t ell, std::size_t d) {
  switch (method) {
    case Method::skpca:
      return sample_size * d + sample_size * ell;
    case Method::rnca:
    case Method::nystrom:
      return sample_size * sample_size + sample_size * d;
  }
  return 0;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename TrainFn, typename TestFn>
auto timed_cell(std::size_t reps, TrainFn&& train_once, TestFn&& test_once, double& train_s,
                double& test_s) {
  std::vector<double> train_times;
  std::vector<double> test_times;
  auto model = train_once();
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    model = train_once();
    train_times.push_back(seconds_since(t0));
  }
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    test_once(model);
    test_times.push_back(seconds_since(t0));
  }
  train_s = median(train_times);
  test_s = median(test_times);
  return model;
}

// Keeps projection results alive so the optimizer cannot drop them.
volatile double g_sink = 0.0;

ErrorReport run_cell(const BenchmarkCell& cell, std::size_t index, const GramOracle& oracle,
                     const Matrix& data, const Matrix& test_set, const BenchmarkOptions& options) {
  const std::size_t reps = std::max<std::size_t>(options.repetitions, 1);
  const auto d = static_cast<std::size_t>(data.cols());

  ErrorReport rep;
  rep.method = cell.method;
  rep.sample_size = cell.sample_size;
  rep.seed = derive_seed(options.master_seed, "cell/" + std::to_string(index));
  rep.n = static_cast<std::size_t>(data.rows());
  rep.d = d;
  rep.eps = options.eps;
  rep.delta = options.delta;
  rep.k = options.k;
  rep.sigma = cell.kernel.sigma;
  rep.test_n = static_cast<std::size_t>(test_set.rows());

  Matrix Y;
  switch (cell.method) {
    case Method::skpca: {
      rep.ell_requested = cell.ell_requested;
      rep.ell = even_sketch_size(cell.ell_requested);
      SkpcaConfig config;
      config.m = cell.sample_size;
      config.ell = rep.ell;
      config.kernel = cell.kernel;
      config.seed = rep.seed;
      const std::size_t kt = std::min(options.k, rep.ell);
      auto model = timed_cell(
          reps, [&] { return train(config, data); },
          [&](const SkpcaModel& mdl) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < test_set.rows(); ++i)
              acc += mdl.project(test_set.row(i).transpose(), kt).residual;
            g_sink = acc;
          },
          rep.train_seconds, rep.test_seconds);
      Y = model.factor(data);
      break;
    }
    case Method::rnca: {
      const FeatureMap fm = FeatureMap::sample(cell.kernel, cell.sample_size, d, rep.seed);
      const std::size_t kt = std::min(options.k, cell.sample_size);
      auto model = timed_cell(
          reps, [&] { return rnca_train(fm, data); },
          [&](const RncaModel& mdl) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < test_set.rows(); ++i)
              acc += mdl.project(test_set.row(i).transpose(), kt).residual;
            g_sink = acc;
          },
          rep.train_seconds, rep.test_seconds);
      Y = model.factor(data, model.stored_rank());
      break;
    }
    case Method::nystrom: {
      const std::size_t c = cell.sample_size;
      auto model = timed_cell(
          reps, [&] { return nystrom_train(cell.kernel, c, c, rep.seed, data); },
          [&](const NystromModel& mdl) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < test_set.rows(); ++i)
              acc += mdl.project(test_set.row(i).transpose()).loading.sum();
            g_sink = acc;
          },
          rep.train_seconds, rep.test_seconds);
      Y = model.factor(data);
      break;
    }
  }
  rep.space_entries = space_formula(cell.method, cell.sample_size, rep.ell, d);

  const std::optional<std::size_t> k = options.k >= 1 && options.k <= rep.n
                                           ? std::optional<std::size_t>(options.k)
                                           : std::nullopt;
  const FactorErrors err = factor_errors(oracle, Y, k);
  const double n = static_cast<double>(rep.n);
  rep.spectral_err = err.spectral_abs / n;
  rep.frobenius_err = err.frobenius_abs / (n * n);
  if (err.rank_k_abs) rep.rank_k_frobenius = *err.rank_k_abs / (n * n);
  return rep;
}

}  // namespace

std::vector<ErrorReport> run_benchmark(const std::vector<BenchmarkCell>& grid, const Matrix& data,
                                       const Matrix& test_set, const BenchmarkOptions& options) {
  if (grid.empty()) return {};
  const std::size_t guard = options.oracle_max_n.value_or(oracle_max_n());
  if (static_cast<std::size_t>(data.rows()) > guard) {
    throw ConfigError("n=" + std::to_string(data.rows()) + " exceeds the exact-gram oracle guard of " +
                      std::to_string(guard) +
                      "; use a smaller n or raise STREAM_KPCA_ORACLE_MAX_N");
  }
  if (data.rows() < 1) throw ContractViolation("run_benchmark: empty training data");
  if (test_set.rows() > 0 && test_set.cols() != data.cols()) {
    throw ContractViolation("run_benchmark: test set dimension differs from training data");
  }
  for (const auto& cell : grid) {
    cell.kernel.validate();
    if (cell.sample_size < 1) throw ConfigError("benchmark cell has sample size 0");
    if (cell.method == Method::skpca &&
        (cell.ell_requested < 1 || even_sketch_size(cell.ell_requested) > cell.sample_size)) {
      throw ConfigError("skpca cell needs 1 <= ell <= m");
    }
  }

  // One exact gram per distinct bandwidth would be needed for mixed grids.
  const KernelSpec kernel = grid.front().kernel;
  for (const auto& cell : grid) {
    if (!(cell.kernel == kernel)) throw ConfigError("all benchmark cells must share one kernel");
  }
  const GramOracle oracle = GramOracle::build(kernel, data);

  std::vector<ErrorReport> reports(grid.size());
  const std::size_t workers = std::clamp<std::size_t>(options.jobs, 1, grid.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      reports[i] = run_cell(grid[i], i, oracle, data, test_set, options);
    return reports;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < grid.size(); i = next++) {
        try {
          reports[i] = run_cell(grid[i], i, oracle, data, test_set, options);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return reports;
}

TrainTestSplit split_train_test(const Matrix& A, std::size_t test_size, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(A.rows());
  if (test_size >= n) {
    throw ConfigError("test size " + std::to_string(test_size) + " must be smaller than n=" +
                      std::to_string(n));
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, "split");
  for (std::size_t i = 0; i < test_size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(test_size));
  std::sort(idx.begin() + static_cast<std::ptrdiff_t>(test_size), idx.end());

  TrainTestSplit out;
  out.test.resize(static_cast<Eigen::Index>(test_size), A.cols());
  out.train.resize(static_cast<Eigen::Index>(n - test_size), A.cols());
  for (std::size_t i = 0; i < test_size; ++i)
    out.test.row(static_cast<Eigen::Index>(i)) = A.row(static_cast<Eigen::Index>(idx[i]));
  for (std::size_t i = test_size; i < n; ++i)
    out.train.row(static_cast<Eigen::Index>(i - test_size)) = A.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "method",        "sample_size",   "ell_requested",    "ell",           "space_entries",
      "spectral_err",  "frobenius_err", "rank_k_frobenius", "train_seconds", "test_seconds",
      "test_n",        "seed",          "n",                "d",             "eps",
      "delta",         "k",             "sigma"};
  return cols;
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void write_reports_csv(std::ostream& out, const std::vector<ErrorReport>& reports) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i > 0 ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : reports) {
    out << to_string(r.method) << ',' << r.sample_size << ',' << r.ell_requested << ',' << r.ell
        << ',' << r.space_entries << ',' << format_double(r.spectral_err) << ','
        << format_double(r.frobenius_err) << ',' << opt_number(r.rank_k_frobenius) << ','
        << format_double(r.train_seconds) << ',' << format_double(r.test_seconds) << ','
        << r.test_n << ',' << r.seed << ',' << r.n << ',' << r.d << ',' << opt_number(r.eps) << ','
        << opt_number(r.delta) << ',' << r.k << ',' << format_double(r.sigma) << '\n';
  }
}

void write_reports_jsonl(std::ostream& out, const std::vector<ErrorReport>& reports) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["method"] = to_string(r.method);
    j["sample_size"] = r.sample_size;
    j["ell_requested"] = r.ell_requested;
    j["ell"] = r.ell;
    j["space_entries"] = r.space_entries;
    j["spectral_err"] = r.spectral_err;
    j["frobenius_err"] = r.frobenius_err;
    j["rank_k_frobenius"] = opt(r.rank_k_frobenius);
    j["train_seconds"] = r.train_seconds;
    j["test_seconds"] = r.test_seconds;
    j["test_n"] = r.test_n;
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["d"] = r.d;
    j["eps"] = opt(r.eps);
    j["delta"] = opt(r.delta);
    j["k"] = r.k;
    j["sigma"] = r.sigma;
    out << j.dump() << '\n';
  }
}

}  // namespace stream_kpca
