#include "stream_kpca/fd.hpp"

#include "stream_kpca/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stream_kpca {

FdSketch::FdSketch(std::size_t ell, std::size_t m, EntryCounter* counter)
    : ell_(ell), m_(m), counter_(counter) {
  if (ell < 2 || ell > m || ell % 2 != 0) {
    throw ConfigError("sketch size ell=" + std::to_string(ell) +
                      " must be even and satisfy 2 <= ell <= m=" + std::to_string(m));
  }
  lease_ = hold(counter_, logical_entries());
  B_ = Matrix::Zero(static_cast<Eigen::Index>(ell), static_cast<Eigen::Index>(m));
}

void FdSketch::insert(const Eigen::Ref<const Vector>& z) {
  if (static_cast<std::size_t>(z.size()) != m_) {
    throw ContractViolation("sketch row has length " + std::to_string(z.size()) +
                            ", expected " + std::to_string(m_));
  }
  if (!z.allFinite()) throw ContractViolation("sketch row contains NaN or Inf");

  B_.row(static_cast<Eigen::Index>(filled_)) = z.transpose();
  ++filled_;
  ++rows_inserted_;
  inserted_sq_norm_ += z.squaredNorm();
  if (filled_ == ell_) shrink();
}

void FdSketch::shrink() {
  auto workspace = hold(counter_, shrink_workspace_entries());
  const SvdResult svd = thin_svd(B_);
  const auto half = static_cast<Eigen::Index>(ell_ / 2);
  const double delta = svd.S(half - 1) * svd.S(half - 1);

  B_.setZero();
  for (Eigen::Index i = 0; i < half; ++i) {
    const double s2 = svd.S(i) * svd.S(i) - delta;
    if (s2 > 0.0) B_.row(i) = std::sqrt(s2) * svd.V.col(i).transpose();
  }
  last_spectrum_ = svd.S;
  total_shrinkage_ += delta;
  filled_ = ell_ / 2;
  ++shrinks_;
}

Matrix complete_orthonormal(const Matrix& V, Eigen::Index rank, Eigen::Index ell) {
  const Eigen::Index m = V.rows();
  Matrix W(m, ell);
  if (rank > 0) W.leftCols(rank) = V.leftCols(rank);
  if (rank < ell) {
    Matrix Q;
    if (rank > 0) {
      Eigen::HouseholderQR<Matrix> qr(V.leftCols(rank));
      // Columns rank..ell-1 of the full Q are orthogonal to span(V_r).
      Q = qr.householderQ() * Matrix::Identity(m, ell);
    } else {
      Q = Matrix::Identity(m, ell);
    }
    W.rightCols(ell - rank) = Q.middleCols(rank, ell - rank);
  }
  return W;
}

FdSketch::Basis FdSketch::basis() const {
  if (rows_inserted_ == 0) throw ContractViolation("sketch basis requested before any insert");
  auto workspace = hold(counter_, shrink_workspace_entries());
  const SvdResult svd = thin_svd(B_);
  const auto ell = static_cast<Eigen::Index>(ell_);

  const double cutoff = default_pinv_tolerance(B_.rows(), B_.cols()) * svd.S(0);
  Eigen::Index rank = 0;
  while (rank < svd.S.size() && svd.S(rank) > cutoff) ++rank;

  Basis out;
  out.W = complete_orthonormal(svd.V, rank, ell);
  out.S = Vector::Zero(ell);
  out.S.head(rank) = svd.S.head(rank);
  return out;
}

}  // namespace stream_kpca
