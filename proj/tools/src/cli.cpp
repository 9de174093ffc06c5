#include "stream_kpca_cli/cli.hpp"

#include <stream_kpca/baselines.hpp>
#include <stream_kpca/data.hpp>
#include <stream_kpca/error.hpp>
#include <stream_kpca/eval.hpp>
#include <stream_kpca/io.hpp>
#include <stream_kpca/persist.hpp>
#include <stream_kpca/skpca.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace stream_kpca::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flags shared by several subcommands. Unset optionals mean "not given".
struct RunConfig {
  std::string input;
  std::string output;
  std::string model;
  std::string jsonl;
  std::vector<std::string> methods{"skpca"};
  std::vector<std::size_t> m;
  std::vector<std::size_t> ell;
  std::vector<std::size_t> c;
  std::optional<std::size_t> k;
  double sigma = 1.0;
  std::optional<double> eps;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  bool header = false;
  bool drop_first_col = false;
  bool center = false;

  // gen-data
  std::string dataset = "random-noisy";
  std::size_t n = 500;
  std::size_t d = 100;
  std::size_t s = 50;
  double zeta = 10.0;
  std::size_t clusters = 5;

  // benchmark
  std::optional<std::size_t> test_size;
  std::size_t reps = 3;

  CsvOptions csv() const { return CsvOptions{header, drop_first_col}; }
  KernelSpec kernel() const {
    KernelSpec spec{KernelFamily::gaussian, sigma};
    spec.validate();
    return spec;
  }
};

std::optional<std::size_t> single(const std::vector<std::size_t>& v, const char* flag) {
  if (v.empty()) return std::nullopt;
  if (v.size() > 1) throw UsageError(std::string(flag) + " takes one value outside benchmark");
  return v.front();
}

// Explicit values must agree with the ones derived from --eps.
std::size_t agree(std::optional<std::size_t> given, std::size_t derived, const char* flag) {
  if (given && *given != derived) {
    throw ConfigError(std::string(flag) + "=" + std::to_string(*given) +
                      " conflicts with the value " + std::to_string(derived) +
                      " derived from --eps/--delta");
  }
  return derived;
}

void require_eps_delta(const RunConfig& cfg) {
  if (cfg.eps && !(*cfg.eps > 0.0 && *cfg.eps < 1.0)) {
    throw ConfigError("--eps must lie in (0, 1)");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("--delta must lie in (0, 1)");
}

// Yields a row read ahead of time, then the rest of the stream.
class PeekedStream final : public RowStream {
 public:
  PeekedStream(RowStream& inner, const std::string& path) : inner_(inner) {
    if (!inner_.next(first_)) throw IoError(path + ": no data rows");
  }
  std::size_t d() const { return static_cast<std::size_t>(first_.size()); }
  bool next(Vector& row) override {
    if (!used_) {
      used_ = true;
      row = first_;
      return true;
    }
    return inner_.next(row);
  }

 private:
  RowStream& inner_;
  Vector first_;
  bool used_ = false;
};

// Opens the input as a row stream, centered when requested.
struct InputStream {
  std::optional<Vector> mean;
  CsvRowStream raw;
  std::optional<CenteredRowStream> centered;

  InputStream(const RunConfig& cfg, std::optional<Vector> center)
      : mean(std::move(center)), raw(cfg.input, cfg.csv()) {
    if (mean) centered.emplace(raw, *mean);
  }
  RowStream& stream() { return centered ? static_cast<RowStream&>(*centered) : raw; }
};

std::optional<Vector> centering_mean(const RunConfig& cfg) {
  if (!cfg.center) return std::nullopt;
  CsvRowStream pass(cfg.input, cfg.csv());
  PeekedStream peek(pass, cfg.input);
  return stream_mean(peek);
}

// Fails early on an unwritable path without leaving a new file behind.
void ensure_output_writable(const std::string& path) {
  const bool existed = std::filesystem::exists(path);
  {
    std::ofstream probe(path, std::ios::app);
    if (!probe) throw IoError("cannot open '" + path + "' for writing");
  }
  if (!existed) std::filesystem::remove(path);
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const RunConfig& cfg, std::ostream& out) {
  Matrix A;
  if (cfg.dataset == "random-noisy") {
    SyntheticSpec spec;
    spec.n = cfg.n;
    spec.d = cfg.d;
    spec.s = cfg.s;
    spec.zeta = cfg.zeta;
    spec.seed = cfg.seed;
    spec.validate();
    A = gen_random_noisy(spec);
  } else {
    if (cfg.n < 1 || cfg.d < 1 || cfg.clusters < 1) {
      throw ConfigError("mixture needs n, d and clusters of at least 1");
    }
    MixtureSpec spec;
    spec.n = cfg.n;
    spec.d = cfg.d;
    spec.clusters = cfg.clusters;
    spec.seed = cfg.seed;
    A = gen_gaussian_mixture(spec);
  }
  write_csv(cfg.output, A, cfg.header);
  out << "dataset=" << cfg.dataset << " n=" << A.rows() << " d=" << A.cols()
      << " seed=" << cfg.seed << " output=" << cfg.output << '\n';
  return 0;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  require_eps_delta(cfg);
  if (cfg.methods.size() != 1) throw UsageError("train takes exactly one --method");
  const Method method = parse_method(cfg.methods.front());
  const KernelSpec kernel = cfg.kernel();
  const auto m_flag = single(cfg.m, "--m");
  const auto ell_flag = single(cfg.ell, "--ell");
  const auto c_flag = single(cfg.c, "--c");

  std::optional<std::size_t> n_rows;
  if (cfg.eps) n_rows = count_csv_rows(cfg.input, cfg.csv());
  if (n_rows && *n_rows == 0) throw IoError(cfg.input + ": no data rows");

  // Validate the parameter set before touching the data stream.
  std::size_t m = 0;
  std::size_t ell = 0;
  std::size_t ell_requested = 0;
  std::size_t c = 0;
  switch (method) {
    case Method::skpca:
      if (cfg.eps) {
        m = agree(m_flag, rff_feature_count(*cfg.eps, cfg.delta, *n_rows), "--m");
        ell_requested = agree(ell_flag, sketch_size_for(*cfg.eps), "--ell");
      } else {
        if (!m_flag || !ell_flag) throw UsageError("skpca needs --m and --ell, or --eps");
        m = *m_flag;
        ell_requested = *ell_flag;
      }
      ell = even_sketch_size(ell_requested);
      break;
    case Method::rnca:
      if (cfg.eps) {
        m = agree(m_flag, rff_feature_count(*cfg.eps, cfg.delta, *n_rows), "--m");
      } else {
        if (!m_flag) throw UsageError("rnca needs --m, or --eps");
        m = *m_flag;
      }
      if (m < 1) throw ConfigError("--m must be at least 1");
      break;
    case Method::nystrom:
      if (cfg.eps) {
        c = agree(c_flag, nystrom_sample_count(*cfg.eps, cfg.delta, *n_rows), "--c");
      } else {
        if (!c_flag) throw UsageError("nystrom needs --c, or --eps");
        c = *c_flag;
      }
      if (c < 1) throw ConfigError("--c must be at least 1");
      if (cfg.k && (*cfg.k < 1 || *cfg.k > c)) throw ConfigError("--k must lie in [1, c]");
      break;
  }
  SkpcaConfig skpca_config;
  if (method == Method::skpca) {
    skpca_config.m = m;
    skpca_config.ell = ell;
    skpca_config.kernel = kernel;
    skpca_config.seed = cfg.seed;
    skpca_config.eps = cfg.eps;
    if (cfg.eps) skpca_config.delta = cfg.delta;
    skpca_config.validate();
  }
  ensure_output_writable(cfg.output);

  std::optional<Vector> mean = centering_mean(cfg);
  InputStream input(cfg, mean);
  PeekedStream rows(input.stream(), cfg.input);
  const std::size_t d = rows.d();

  const auto t0 = Clock::now();
  std::optional<StoredModel> stored;
  std::size_t n = 0;
  std::size_t space = 0;
  switch (method) {
    case Method::skpca: {
      SkpcaModel model = train(skpca_config, rows);
      n = model.n_seen();
      space = space_formula(method, m, ell, d);
      stored = StoredModel{std::move(model), mean, cfg.seed};
      break;
    }
    case Method::rnca: {
      RncaModel model = rnca_train(FeatureMap::sample(kernel, m, d, cfg.seed), rows);
      n = model.n_seen();
      space = space_formula(method, m, 0, d);
      stored = StoredModel{std::move(model), mean, cfg.seed};
      break;
    }
    case Method::nystrom: {
      NystromModel model = nystrom_train(kernel, c, cfg.k.value_or(c), cfg.seed, rows);
      n = model.n_seen();
      space = space_formula(method, c, 0, d);
      stored = StoredModel{std::move(model), mean, cfg.seed};
      break;
    }
  }
  const double elapsed = seconds_since(t0);
  save_model(std::filesystem::path(cfg.output), *stored);

  out << "method=" << to_string(method) << " n=" << n << " d=" << d;
  if (method == Method::nystrom) {
    out << " c=" << c << " k=" << cfg.k.value_or(c);
  } else {
    out << " m=" << m;
  }
  if (method == Method::skpca) out << " ell=" << ell << " ell_requested=" << ell_requested;
  if (cfg.eps) out << " eps=" << format_double(*cfg.eps) << " delta=" << format_double(cfg.delta);
  out << " sigma=" << format_double(kernel.sigma) << " centered=" << (mean ? 1 : 0)
      << " elapsed_seconds=" << format_double(elapsed) << " space_entries=" << space
      << " model=" << cfg.output << '\n';
  return 0;
}

int cmd_test(const RunConfig& cfg, std::ostream& out) {
  const StoredModel stored = load_model(std::filesystem::path(cfg.model));

  // Model dimension and the largest k it can report.
  std::size_t d = 0;
  std::size_t k_max = 0;
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        d = model.d();
        if constexpr (std::is_same_v<T, SkpcaModel>) {
          k_max = model.ell();
        } else if constexpr (std::is_same_v<T, RncaModel>) {
          k_max = model.stored_rank();
        } else {
          k_max = model.k();
        }
      },
      stored.model);
  const std::size_t k = cfg.k.value_or(std::min<std::size_t>(5, k_max));
  if (k < 1 || k > k_max) {
    throw ContractViolation("--k=" + std::to_string(k) + " outside [1, " + std::to_string(k_max) +
                            "] for this model");
  }

  std::ofstream result(cfg.output, std::ios::binary);
  if (!result) throw IoError("cannot open '" + cfg.output + "' for writing");

  InputStream input(cfg, stored.center);
  RowStream& rows = input.stream();
  Vector x;
  Vector line(static_cast<Eigen::Index>(k + 1));
  std::size_t n = 0;
  double projecting = 0.0;
  while (rows.next(x)) {
    ++n;
    if (static_cast<std::size_t>(x.size()) != d) {
      throw ContractViolation("test point " + std::to_string(n) + " has d=" +
                              std::to_string(x.size()) + ", model expects d=" + std::to_string(d));
    }
    const auto t0 = Clock::now();
    std::visit(
        [&](const auto& model) {
          using T = std::decay_t<decltype(model)>;
          const auto kk = static_cast<Eigen::Index>(k);
          if constexpr (std::is_same_v<T, NystromModel>) {
            const NystromProjection p = model.project(x);
            line.head(kk) = p.loading.head(kk);
            // Coordinates dropped by a smaller k join the residual.
            const double tail = p.loading.tail(p.loading.size() - kk).squaredNorm();
            line(kk) = std::sqrt(p.residual * p.residual + tail);
          } else {
            const Projection p = model.project(x, k);
            line.head(kk) = p.loading;
            line(kk) = p.residual;
          }
        },
        stored.model);
    projecting += seconds_since(t0);
    write_csv_row(result, line);
  }
  result.flush();
  if (!result) throw IoError("failed writing '" + cfg.output + "'");

  const double per_point = n > 0 ? projecting / static_cast<double>(n) : 0.0;
  out << "n=" << n << " d=" << d << " k=" << k << " total_seconds=" << format_double(projecting)
      << " per_point_seconds=" << format_double(per_point) << " output=" << cfg.output << '\n';
  return 0;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& out) {
  require_eps_delta(cfg);
  if (cfg.reps < 1) throw ConfigError("--reps must be at least 1");
  if (cfg.jobs < 1) throw ConfigError("--jobs must be at least 1");
  std::vector<Method> methods;
  for (const auto& name : cfg.methods) methods.push_back(parse_method(name));
  const KernelSpec kernel = cfg.kernel();

  Matrix A = read_csv(cfg.input, cfg.csv());
  if (A.rows() < 2) throw IoError(cfg.input + ": benchmark needs at least 2 data rows");
  if (cfg.center) A.rowwise() -= A.colwise().mean();
  const auto n = static_cast<std::size_t>(A.rows());
  const std::size_t test_size = cfg.test_size.value_or(std::max<std::size_t>(1, n / 10));
  const std::size_t guard = oracle_max_n();
  if (n - std::min(test_size, n) > guard) {
    throw ConfigError("n=" + std::to_string(n - test_size) +
                      " exceeds the exact-gram oracle guard of " + std::to_string(guard) +
                      "; use a smaller n or raise STREAM_KPCA_ORACLE_MAX_N");
  }
  const TrainTestSplit split = split_train_test(A, test_size, cfg.seed);
  const auto n_train = static_cast<std::size_t>(split.train.rows());

  std::vector<std::size_t> m_list = cfg.m;
  std::vector<std::size_t> ell_list = cfg.ell;
  std::vector<std::size_t> c_list = cfg.c;
  if (cfg.eps) {
    auto derive = [](std::vector<std::size_t>& list, std::size_t value, const char* flag) {
      if (list.size() > 1) throw ConfigError(std::string(flag) + " takes one value with --eps");
      list = {agree(list.empty() ? std::nullopt : std::optional(list.front()), value, flag)};
    };
    derive(m_list, rff_feature_count(*cfg.eps, cfg.delta, n_train), "--m");
    derive(ell_list, sketch_size_for(*cfg.eps), "--ell");
    derive(c_list, nystrom_sample_count(*cfg.eps, cfg.delta, n_train), "--c");
  }
  if (c_list.empty()) c_list = m_list;
  if (ell_list.empty()) ell_list = {16};

  std::vector<BenchmarkCell> grid;
  for (Method method : methods) {
    const auto& sizes = method == Method::nystrom ? c_list : m_list;
    if (sizes.empty()) {
      throw UsageError(std::string(to_string(method)) + " needs sample sizes: --m, --c or --eps");
    }
    for (std::size_t size : sizes) {
      if (method == Method::skpca) {
        for (std::size_t ell : ell_list) grid.push_back({method, size, ell, kernel});
      } else {
        grid.push_back({method, size, 0, kernel});
      }
    }
  }

  BenchmarkOptions options;
  options.k = cfg.k.value_or(5);
  options.repetitions = cfg.reps;
  options.jobs = cfg.jobs;
  options.master_seed = cfg.seed;
  options.eps = cfg.eps;
  if (cfg.eps) options.delta = cfg.delta;
  ensure_output_writable(cfg.output);
  if (!cfg.jsonl.empty()) ensure_output_writable(cfg.jsonl);

  const auto t0 = Clock::now();
  const std::vector<ErrorReport> reports = run_benchmark(grid, split.train, split.test, options);
  const double elapsed = seconds_since(t0);

  {
    std::ofstream csv(cfg.output, std::ios::binary);
    write_reports_csv(csv, reports);
    if (!csv) throw IoError("failed writing '" + cfg.output + "'");
  }
  if (!cfg.jsonl.empty()) {
    std::ofstream jl(cfg.jsonl, std::ios::binary);
    write_reports_jsonl(jl, reports);
    if (!jl) throw IoError("failed writing '" + cfg.jsonl + "'");
  }
  out << "cells=" << reports.size() << " n_train=" << n_train << " n_test=" << split.test.rows()
      << " d=" << A.cols() << " elapsed_seconds=" << format_double(elapsed)
      << " output=" << cfg.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

void add_input_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "input CSV, one point per row")->required();
  sub->add_flag("--header", cfg.header, "input starts with a header line");
  sub->add_flag("--drop-first-col", cfg.drop_first_col, "ignore the first column (labels)");
}

void add_kernel_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--sigma", cfg.sigma, "Gaussian kernel bandwidth");
  sub->add_option("--seed", cfg.seed, "master seed for all randomness");
}

void add_size_flags(CLI::App* sub, RunConfig& cfg, bool lists) {
  const char* suffix = lists ? " (comma list)" : "";
  auto* m = sub->add_option("--m", cfg.m, std::string("random features") + suffix);
  auto* ell = sub->add_option("--ell", cfg.ell, std::string("sketch rows, odd values round up") + suffix);
  auto* c = sub->add_option("--c", cfg.c, std::string("nystrom landmarks") + suffix);
  for (auto* opt : {m, ell, c}) {
    opt->default_str("");
    if (lists) {
      opt->delimiter(',');
    } else {
      opt->expected(1);
    }
  }
  if (lists) ell->default_str("16");
  sub->add_option("--eps", cfg.eps, "target spectral error; derives m, ell and c");
  sub->add_option("--delta", cfg.delta, "failure probability used with --eps");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Streaming kernel PCA with random features and Frequent Directions",
               "stream-kpca"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);

  auto* gen = app.add_subcommand("gen-data", "write a synthetic data set as CSV");
  gen->add_option("--output", cfg.output, "output CSV path")->required();
  gen->add_option("--dataset", cfg.dataset, "random-noisy or mixture")
      ->check(CLI::IsMember({"random-noisy", "mixture"}));
  gen->add_option("--n", cfg.n, "number of points");
  gen->add_option("--d", cfg.d, "dimension");
  gen->add_option("--s", cfg.s, "random-noisy signal dimension");
  gen->add_option("--zeta", cfg.zeta, "random-noisy noise divisor");
  gen->add_option("--clusters", cfg.clusters, "mixture cluster count");
  gen->add_option("--seed", cfg.seed, "seed");
  gen->add_flag("--header", cfg.header, "write column names c0..c{d-1}");

  auto* trn = app.add_subcommand("train", "train a model in one pass over a CSV");
  add_input_flags(trn, cfg);
  trn->add_option("--output", cfg.output, "model file to write")->required();
  trn->add_option("--method", cfg.methods, "skpca, rnca or nystrom")->expected(1)->default_str("skpca");
  add_size_flags(trn, cfg, false);
  trn->add_option("--k", cfg.k, "nystrom rank (default c)");
  add_kernel_flags(trn, cfg);
  trn->add_flag("--center", cfg.center, "subtract the column mean (extra pass)");

  auto* tst = app.add_subcommand("test", "project points onto a trained model");
  add_input_flags(tst, cfg);
  tst->add_option("--model", cfg.model, "model file from train")->required();
  tst->add_option("--output", cfg.output, "CSV of k loadings then the residual")->required();
  tst->add_option("--k", cfg.k, "loading coordinates per point (default min(5, model rank))");

  auto* bench = app.add_subcommand("benchmark", "score methods against the exact gram matrix");
  add_input_flags(bench, cfg);
  bench->add_option("--output", cfg.output, "report CSV")->required();
  bench->add_option("--jsonl", cfg.jsonl, "optional JSON-lines copy of the report");
  bench->add_option("--method", cfg.methods, "methods (comma list)")->delimiter(',')->default_str("skpca");
  add_size_flags(bench, cfg, true);
  bench->add_option("--k", cfg.k, "rank for the rank-k Frobenius column (default 5)");
  add_kernel_flags(bench, cfg);
  bench->add_option("--jobs", cfg.jobs, "worker threads for grid cells");
  bench->add_option("--reps", cfg.reps, "timing repetitions (median reported)");
  bench->add_option("--test-size", cfg.test_size, "held-out rows (default n/10)");
  bench->add_flag("--center", cfg.center, "subtract the column mean before splitting");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    }
    if (gen->parsed()) return cmd_gen_data(cfg, out);
    if (trn->parsed()) return cmd_train(cfg, out);
    if (tst->parsed()) return cmd_test(cfg, out);
    return cmd_benchmark(cfg, out);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
  } catch (const ContractViolation& e) {
    err << "error: contract: " << e.what() << '\n';
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << '\n';
  } catch (const NumericalFailure& e) {
    err << "error: numerical: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace stream_kpca::cli
