#include "stream_kpca/persist.hpp"

#include "stream_kpca/error.hpp"
#include "stream_kpca/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace stream_kpca {

namespace {

constexpr const char* kMagic = "stream-kpca-model 1";

void write_block(std::ostream& out, const char* name, const Matrix& M) {
  out << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j > 0 ? " " : "") << format_double(M(i, j));
    out << '\n';
  }
}

void write_feature_map(std::ostream& out, const FeatureMap& fm) {
  out << "kernel " << to_string(fm.kernel().family) << '\n'
      << "sigma " << format_double(fm.kernel().sigma) << '\n'
      << "m " << fm.m() << '\n'
      << "d " << fm.d() << '\n'
      << "feature_seed " << fm.seed() << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of model file");
    ++lineno_;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  // "key value" with the given key.
  std::string value(const std::string& key) {
    const std::string s = line();
    const auto sp = s.find(' ');
    if (sp == std::string::npos || s.compare(0, sp, key) != 0) {
      fail("expected '" + key + " <value>', got '" + s + "'");
    }
    return s.substr(sp + 1);
  }

  template <typename T>
  T number(const std::string& key) {
    return parse<T>(value(key), key);
  }

  Matrix block(const std::string& name) {
    std::istringstream head(value(name));
    long long rows = -1;
    long long cols = -1;
    if (!(head >> rows >> cols) || rows < 0 || cols < 0) fail("bad shape for block '" + name + "'");
    Matrix M(rows, cols);
    for (long long i = 0; i < rows; ++i) {
      const std::string s = line();
      std::vector<std::string> parts;
      std::istringstream ss(s);
      for (std::string tok; ss >> tok;) parts.push_back(tok);
      if (static_cast<long long>(parts.size()) != cols) {
        fail("block '" + name + "' row has " + std::to_string(parts.size()) + " values, expected " +
             std::to_string(cols));
      }
      for (long long j = 0; j < cols; ++j) M(i, j) = parse<double>(parts[j], name);
    }
    return M;
  }

  template <typename T>
  T parse(const std::string& text, const std::string& what) {
    T v{};
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) fail("cannot parse '" + text + "' for " + what);
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw IoError("model line " + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::size_t lineno_ = 0;
};

FeatureMap read_feature_map(Reader& r) {
  FeatureMapRecord rec;
  rec.kernel.family = parse_kernel_family(r.value("kernel"));
  rec.kernel.sigma = r.number<double>("sigma");
  rec.m = r.number<std::size_t>("m");
  rec.d = r.number<std::size_t>("d");
  rec.seed = r.number<std::uint64_t>("feature_seed");
  return FeatureMap::from_record(rec);
}

}  // namespace

void save_model(std::ostream& out, const StoredModel& stored) {
  out << kMagic << '\n';
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, SkpcaModel>) {
          out << "method skpca\n" << "seed " << stored.seed << '\n';
          write_feature_map(out, model.feature_map());
          out << "n_seen " << model.n_seen() << '\n' << "ell " << model.ell() << '\n';
          write_block(out, "W", model.basis());
          write_block(out, "S", model.singular_values());
        } else if constexpr (std::is_same_v<T, RncaModel>) {
          out << "method rnca\n" << "seed " << stored.seed << '\n';
          write_feature_map(out, model.feature_map());
          out << "n_seen " << model.n_seen() << '\n';
          write_block(out, "eigenvalues", model.eigenvalues());
          write_block(out, "eigenvectors", model.eigenvectors());
        } else {
          out << "method nystrom\n" << "seed " << stored.seed << '\n'
              << "kernel " << to_string(model.kernel().family) << '\n'
              << "sigma " << format_double(model.kernel().sigma) << '\n'
              << "k " << model.k() << '\n'
              << "n_seen " << model.n_seen() << '\n'
              << "replacements";
          for (std::size_t r : model.replacements()) out << ' ' << r;
          out << '\n';
          write_block(out, "samples", model.samples());
        }
      },
      stored.model);
  if (stored.center) {
    write_block(out, "center", stored.center->transpose());
  } else {
    out << "center none\n";
  }
  if (!out) throw IoError("failed writing model");
}

void save_model(const std::filesystem::path& path, const StoredModel& stored) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  save_model(out, stored);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

StoredModel load_model(std::istream& in) {
  Reader r(in);
  if (r.line() != kMagic) r.fail("not a stream-kpca model file (bad first line)");
  const std::string method = r.value("method");
  const auto seed = r.number<std::uint64_t>("seed");

  auto read_center = [&](std::size_t d) -> std::optional<Vector> {
    // "center none" or a 1 x d block.
    const std::string s = r.value("center");
    if (s == "none") return std::nullopt;
    std::istringstream head(s);
    long long rows = -1;
    long long cols = -1;
    if (!(head >> rows >> cols) || rows != 1 || cols != static_cast<long long>(d)) {
      r.fail("center must be a 1 x " + std::to_string(d) + " block");
    }
    std::istringstream row(r.line());
    Vector c(static_cast<Eigen::Index>(d));
    std::string tok;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      if (!(row >> tok)) r.fail("center row is short");
      c(j) = r.parse<double>(tok, "center");
    }
    if (row >> tok) r.fail("center row is long");
    return c;
  };

  try {
    if (method == "skpca") {
      FeatureMap fm = read_feature_map(r);
      const auto n_seen = r.number<std::size_t>("n_seen");
      const auto ell = r.number<std::size_t>("ell");
      Matrix W = r.block("W");
      Matrix S = r.block("S");
      if (static_cast<std::size_t>(W.rows()) != fm.m() || static_cast<std::size_t>(W.cols()) != ell ||
          S.cols() != 1 || static_cast<std::size_t>(S.rows()) != ell) {
        r.fail("skpca blocks do not match m and ell");
      }
      const std::size_t d = fm.d();
      SkpcaModel model(std::move(fm), std::move(W), S.col(0), n_seen);
      return StoredModel{std::move(model), read_center(d), seed};
    }
    if (method == "rnca") {
      FeatureMap fm = read_feature_map(r);
      const auto n_seen = r.number<std::size_t>("n_seen");
      Matrix ev = r.block("eigenvalues");
      Matrix V = r.block("eigenvectors");
      if (ev.cols() != 1 || V.cols() != ev.rows() || static_cast<std::size_t>(V.rows()) != fm.m()) {
        r.fail("rnca blocks do not match m");
      }
      const std::size_t d = fm.d();
      RncaModel model(std::move(fm), std::nullopt, ev.col(0), std::move(V), n_seen);
      return StoredModel{std::move(model), read_center(d), seed};
    }
    if (method == "nystrom") {
      KernelSpec kernel;
      kernel.family = parse_kernel_family(r.value("kernel"));
      kernel.sigma = r.number<double>("sigma");
      const auto k = r.number<std::size_t>("k");
      const auto n_seen = r.number<std::size_t>("n_seen");
      std::vector<std::size_t> replacements;
      {
        const std::string s = r.line();
        std::istringstream ss(s);
        std::string tok;
        if (!(ss >> tok) || tok != "replacements") r.fail("expected 'replacements ...'");
        while (ss >> tok) replacements.push_back(r.parse<std::size_t>(tok, "replacements"));
      }
      Matrix samples = r.block("samples");
      if (!replacements.empty() && replacements.size() != static_cast<std::size_t>(samples.rows())) {
        r.fail("replacement counts do not match the sample count");
      }
      const auto d = static_cast<std::size_t>(samples.cols());
      NystromModel model(kernel, std::move(samples), k, n_seen, std::move(replacements));
      return StoredModel{std::move(model), read_center(d), seed};
    }
  } catch (const ConfigError& e) {
    r.fail(e.what());
  } catch (const ContractViolation& e) {
    r.fail(e.what());
  }
  r.fail("unknown method '" + method + "'");
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  try {
    return load_model(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace stream_kpca
