#pragma once

#include "stream_kpca/numerics.hpp"
#include "stream_kpca/space.hpp"

#include <cstddef>

namespace stream_kpca {

/// Frequent Directions sketch with the half-spectrum shrink.
///
/// Holds an ell x m matrix B. Rows are written into free slots; when the last
/// free slot is taken, B is rewritten as sqrt(max(0, S^2 - s_{ell/2}^2)) W^T from
/// its SVD, which zeroes at least the bottom ell/2 rows. Occupancy is tracked
/// with a counter, so an all-zero input row still consumes a slot.
///
/// Single writer. basis() does not mutate and may run concurrently with other
/// const calls.
class FdSketch {
 public:
  struct Basis {
    Matrix W;  // m x ell, orthonormal columns
    Vector S;  // ell singular values of B, non-increasing (0 for padding)
  };

  // Throws ConfigError unless 2 <= ell <= m and ell is even. When a counter is
  // given, B and the SVD temporaries of every shrink/basis call are charged to it.
  FdSketch(std::size_t ell, std::size_t m, EntryCounter* counter = nullptr);

  void insert(const Eigen::Ref<const Vector>& z);

  // Fresh SVD of the current B. Throws ContractViolation before the first insert.
  Basis basis() const;

  const Matrix& matrix() const { return B_; }
  std::size_t ell() const { return ell_; }
  std::size_t m() const { return m_; }
  std::size_t filled() const { return filled_; }
  std::size_t rows_inserted() const { return rows_inserted_; }
  std::size_t shrink_count() const { return shrinks_; }
  double inserted_squared_norm() const { return inserted_sq_norm_; }
  // Sum over shrinks of the subtracted s_{ell/2}^2; bounds ||A^T A - B^T B||_2.
  double total_shrinkage() const { return total_shrinkage_; }
  // Singular values of B just before the most recent shrink (empty if none yet).
  const Vector& last_shrink_spectrum() const { return last_spectrum_; }

  // ell * m.
  std::size_t logical_entries() const { return ell_ * m_; }
  // Entries of the temporaries a shrink holds: W (m x ell), U (ell x ell), S (ell).
  std::size_t shrink_workspace_entries() const { return m_ * ell_ + ell_ * ell_ + ell_; }

 private:
  void shrink();

  std::size_t ell_;
  std::size_t m_;
  EntryCounter* counter_;
  EntryCounter::Lease lease_;
  Matrix B_;
  std::size_t filled_ = 0;
  std::size_t rows_inserted_ = 0;
  std::size_t shrinks_ = 0;
  double inserted_sq_norm_ = 0.0;
  double total_shrinkage_ = 0.0;
  Vector last_spectrum_;
};

/// Orthonormal m x ell matrix whose leading columns are the first `rank` columns
/// of V, completed by the Householder QR complement of those columns.
Matrix complete_orthonormal(const Matrix& V, Eigen::Index rank, Eigen::Index ell);

}  // namespace stream_kpca
