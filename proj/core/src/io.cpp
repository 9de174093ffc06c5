#include "stream_kpca/io.hpp"

#include "stream_kpca/error.hpp"

#include <charconv>
#include <ostream>
#include <string_view>
#include <system_error>
#include <vector>

namespace stream_kpca {

bool MatrixRowStream::next(Vector& row) {
  if (next_ >= A_.rows()) return false;
  row = A_.row(next_++).transpose();
  return true;
}

bool CenteredRowStream::next(Vector& row) {
  if (!inner_.next(row)) return false;
  if (row.size() != mean_.size()) {
    throw ContractViolation("centering mean has dimension " + std::to_string(mean_.size()) +
                            ", row has " + std::to_string(row.size()));
  }
  row -= mean_;
  return true;
}

namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool parse_csv_line(const std::string& line, Vector& row, bool drop_first_col) {
  if (is_blank(line)) return false;
  thread_local std::vector<double> values;
  values.clear();
  std::string_view rest(line);
  bool first = true;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view field = trim(rest.substr(0, comma));
    if (!(first && drop_first_col)) {
      double v = 0.0;
      const char* begin = field.data();
      const char* end = field.data() + field.size();
      if (!field.empty() && *begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, v);
      if (field.empty() || ec != std::errc() || ptr != end) {
        throw IoError("malformed numeric field '" + std::string(field) + "'");
      }
      values.push_back(v);
    }
    first = false;
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (values.empty()) throw IoError("row has no numeric fields");
  row = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return true;
}

CsvRowStream::CsvRowStream(const std::filesystem::path& path, CsvOptions options)
    : path_(path), in_(path), options_(options) {
  if (!in_) throw IoError("cannot open '" + path.string() + "' for reading");
  if (options_.header) {
    std::getline(in_, buffer_);
    ++line_;
  }
}

bool CsvRowStream::next(Vector& row) {
  while (std::getline(in_, buffer_)) {
    ++line_;
    try {
      if (parse_csv_line(buffer_, row, options_.drop_first_col)) return true;
    } catch (const IoError& e) {
      throw IoError(path_.string() + ":" + std::to_string(line_) + ": " + e.what());
    }
  }
  if (in_.bad()) throw IoError("read error on '" + path_.string() + "'");
  return false;
}

Matrix read_csv(const std::filesystem::path& path, CsvOptions options) {
  CsvRowStream stream(path, options);
  std::vector<double> data;
  Vector row;
  Eigen::Index d = -1;
  Eigen::Index n = 0;
  while (stream.next(row)) {
    if (d < 0) d = row.size();
    if (row.size() != d) {
      throw IoError(path.string() + ":" + std::to_string(stream.line_number()) + ": row has " +
                    std::to_string(row.size()) + " fields, expected " + std::to_string(d));
    }
    data.insert(data.end(), row.data(), row.data() + row.size());
    ++n;
  }
  if (n == 0) return Matrix(0, 0);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data.data(), n, d);
}

std::size_t count_csv_rows(const std::filesystem::path& path, CsvOptions options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  std::size_t n = 0;
  bool skip = options.header;
  while (std::getline(in, line)) {
    if (skip) {
      skip = false;
      continue;
    }
    if (!is_blank(line)) ++n;
  }
  return n;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

void write_csv_row(std::ostream& out, const Eigen::Ref<const Vector>& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j > 0) out << ',';
    out << format_double(row(j));
  }
  out << '\n';
}

void write_csv(std::ostream& out, const Matrix& A, bool header) {
  if (header) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) out << (j > 0 ? "," : "") << 'c' << j;
    out << '\n';
  }
  for (Eigen::Index i = 0; i < A.rows(); ++i) write_csv_row(out, A.row(i).transpose());
}

void write_csv(const std::filesystem::path& path, const Matrix& A, bool header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(out, A, header);
  out.flush();
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

Vector stream_mean(RowStream& stream) {
  Vector row;
  Vector sum;
  std::size_t n = 0;
  while (stream.next(row)) {
    if (n == 0) sum = Vector::Zero(row.size());
    if (row.size() != sum.size()) {
      throw ContractViolation("point " + std::to_string(n) + " has dimension " +
                              std::to_string(row.size()) + ", expected " + std::to_string(sum.size()));
    }
    sum += row;
    ++n;
  }
  if (n == 0) throw ContractViolation("cannot center an empty stream");
  return sum / static_cast<double>(n);
}

}  // namespace stream_kpca
