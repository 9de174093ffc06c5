#pragma once

#include "stream_kpca/numerics.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>

namespace stream_kpca {

/// A one-pass source of d-dimensional points.
class RowStream {
 public:
  virtual ~RowStream() = default;
  // Fills `row` (resized as needed) and returns true, or returns false at the end.
  virtual bool next(Vector& row) = 0;
};

/// Streams the rows of an in-memory matrix.
class MatrixRowStream final : public RowStream {
 public:
  explicit MatrixRowStream(const Matrix& A) : A_(A) {}
  bool next(Vector& row) override;

 private:
  const Matrix& A_;
  Eigen::Index next_ = 0;
};

/// Subtracts a fixed mean from every row of an underlying stream.
class CenteredRowStream final : public RowStream {
 public:
  CenteredRowStream(RowStream& inner, Vector mean) : inner_(inner), mean_(std::move(mean)) {}
  bool next(Vector& row) override;

 private:
  RowStream& inner_;
  Vector mean_;
};

struct CsvOptions {
  bool header = false;          // skip the first line
  bool drop_first_col = false;  // discard a leading label column
};

/// Reads a numeric CSV one line at a time; memory is one row.
/// Malformed lines raise IoError naming the 1-based line number.
class CsvRowStream final : public RowStream {
 public:
  CsvRowStream(const std::filesystem::path& path, CsvOptions options = {});
  bool next(Vector& row) override;

  std::size_t line_number() const { return line_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  CsvOptions options_;
  std::size_t line_ = 0;
  std::string buffer_;
};

// Parses one CSV record into `row`; returns false for lines that are blank.
bool parse_csv_line(const std::string& line, Vector& row, bool drop_first_col);

Matrix read_csv(const std::filesystem::path& path, CsvOptions options = {});
// Counts data records (non-blank lines, minus the header if present).
std::size_t count_csv_rows(const std::filesystem::path& path, CsvOptions options = {});

/// 17 significant digits in general format, trailing zeros dropped; round-trips exactly.
std::string format_double(double value);
void write_csv_row(std::ostream& out, const Eigen::Ref<const Vector>& row);
void write_csv(std::ostream& out, const Matrix& A, bool header);
void write_csv(const std::filesystem::path& path, const Matrix& A, bool header);

// Column means of a stream in one pass; throws ContractViolation on an empty stream.
Vector stream_mean(RowStream& stream);

}  // namespace stream_kpca
