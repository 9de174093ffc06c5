#include "stream_kpca/baselines.hpp"

#include "stream_kpca/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stream_kpca {

namespace {

void check_dimension(std::size_t expected, Eigen::Index got, std::size_t index) {
  if (static_cast<std::size_t>(got) != expected) {
    throw ContractViolation("point " + std::to_string(index) + " has dimension " +
                            std::to_string(got) + ", expected " + std::to_string(expected));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RNCA
// ---------------------------------------------------------------------------

RncaModel::RncaModel(FeatureMap fm, std::optional<Matrix> covariance, Vector eigenvalues,
                     Matrix eigenvectors, std::size_t n_seen)
    : fm_(std::move(fm)),
      cov_(std::move(covariance)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      n_seen_(n_seen) {
  if (static_cast<std::size_t>(eigenvectors_.rows()) != fm_.m() ||
      eigenvectors_.cols() > eigenvalues_.size()) {
    throw ContractViolation("RNCA eigenbasis shape does not match the feature map");
  }
}

Projection RncaModel::project(const Eigen::Ref<const Vector>& x, std::size_t k) const {
  if (k < 1 || k > stored_rank()) {
    throw ContractViolation("projection rank k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(stored_rank()) + "]");
  }
  Projection p;
  p.lifted = fm_.apply(x);
  const auto Vk = eigenvectors_.leftCols(static_cast<Eigen::Index>(k));
  p.loading.noalias() = Vk.transpose() * p.lifted;
  p.residual = (p.lifted - Vk * p.loading).norm();
  return p;
}

Matrix RncaModel::factor(const Matrix& A, std::size_t k) const {
  if (k < 1 || k > stored_rank()) {
    throw ContractViolation("RNCA rank k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(stored_rank()) + "]");
  }
  return fm_.apply_batch(A) * eigenvectors_.leftCols(static_cast<Eigen::Index>(k));
}

Matrix RncaModel::reconstruct(const Matrix& A, std::size_t k) const {
  const Matrix Y = factor(A, k);
  Matrix G = Y * Y.transpose();
  return 0.5 * (G + G.transpose());
}

RncaTrainer::RncaTrainer(FeatureMap fm, EntryCounter* counter)
    : fm_(std::move(fm)), counter_(counter) {
  const auto m = static_cast<Eigen::Index>(fm_.m());
  fm_lease_ = hold(counter_, fm_.logical_entries());
  cov_lease_ = hold(counter_, fm_.m() * fm_.m());
  buffer_lease_ = hold(counter_, fm_.m() + fm_.d());
  cov_ = Matrix::Zero(m, m);
  lifted_.resize(m);
}

void RncaTrainer::push(const Eigen::Ref<const Vector>& x) {
  check_dimension(fm_.d(), x.size(), n_seen_);
  if (!x.allFinite()) {
    throw ContractViolation("point " + std::to_string(n_seen_) + " contains NaN or Inf");
  }
  fm_.apply_into(x, lifted_);
  cov_.selfadjointView<Eigen::Lower>().rankUpdate(lifted_);
  ++n_seen_;
}

RncaModel RncaTrainer::finish() {
  if (n_seen_ == 0) throw ContractViolation("RNCA training stream is empty");
  cov_.triangularView<Eigen::StrictlyUpper>() = cov_.transpose();
  auto eig_lease = hold(counter_, fm_.m() * fm_.m() + fm_.m());
  EigResult eig = sym_eig(cov_);
  return RncaModel(fm_, std::move(cov_), std::move(eig.values), std::move(eig.vectors), n_seen_);
}

RncaModel rnca_train(const FeatureMap& fm, RowStream& stream, EntryCounter* counter) {
  RncaTrainer trainer(fm, counter);
  Vector row;
  while (stream.next(row)) trainer.push(row);
  return trainer.finish();
}

RncaModel rnca_train(const FeatureMap& fm, const Matrix& A, EntryCounter* counter) {
  MatrixRowStream stream(A);
  return rnca_train(fm, stream, counter);
}

// ---------------------------------------------------------------------------
// Nystrom
// ---------------------------------------------------------------------------

NystromModel::NystromModel(KernelSpec kernel, Matrix samples, std::size_t k, std::size_t n_seen,
                           std::vector<std::size_t> replacements, EntryCounter* counter)
    : kernel_(kernel),
      samples_(std::move(samples)),
      k_(k),
      n_seen_(n_seen),
      replacements_(std::move(replacements)) {
  const auto c = static_cast<std::size_t>(samples_.rows());
  if (c < 1) throw ContractViolation("Nystrom model needs at least one sample");
  if (k_ < 1 || k_ > c) {
    throw ConfigError("Nystrom rank k=" + std::to_string(k_) + " outside [1, c=" +
                      std::to_string(c) + "]");
  }

  auto w_lease = hold(counter, c * c);
  W_ = gram(kernel_, samples_);

  auto eig_lease = hold(counter, c * c + c);
  EigResult eig = sym_eig(W_);
  const double cutoff =
      default_pinv_tolerance(W_.rows(), W_.cols()) * std::max(eig.values(0), 0.0);
  Eigen::Index r = 0;
  while (r < eig.values.size() && eig.values(r) > cutoff && eig.values(r) > 0.0) ++r;
  eigenvalues_ = eig.values.head(r);
  eigenvectors_ = eig.vectors.leftCols(r);

  // pinv(best_rank_k(W)) = V_k Lambda_k^{-1} V_k^T over the retained pairs.
  auto pinv_lease = hold(counter, c * c);
  const Eigen::Index kr = std::min<Eigen::Index>(r, static_cast<Eigen::Index>(k_));
  const auto Vk = eigenvectors_.leftCols(kr);
  Wk_pinv_ = Vk * eigenvalues_.head(kr).cwiseInverse().asDiagonal() * Vk.transpose();
}

NystromProjection NystromModel::project(const Eigen::Ref<const Vector>& x) const {
  check_dimension(d(), x.size(), 0);
  NystromProjection p;
  const double s = 1.0 / (2.0 * kernel_.sigma * kernel_.sigma);
  p.c_row = (-s * (samples_.rowwise() - x.transpose()).rowwise().squaredNorm()).array().exp().matrix();

  Vector coords = eigenvectors_.transpose() * p.c_row;
  coords.array() /= eigenvalues_.array().sqrt();
  const Eigen::Index r = coords.size();
  const Eigen::Index kr = std::min<Eigen::Index>(r, static_cast<Eigen::Index>(k_));
  p.loading = Vector::Zero(static_cast<Eigen::Index>(k_));
  p.loading.head(kr) = coords.head(kr);
  p.residual = coords.tail(r - kr).norm();
  return p;
}

Matrix NystromModel::factor(const Matrix& A) const {
  const Eigen::Index kr = std::min<Eigen::Index>(eigenvalues_.size(), static_cast<Eigen::Index>(k_));
  const Matrix C = cross_gram(kernel_, A, samples_);
  return C * eigenvectors_.leftCols(kr) *
         eigenvalues_.head(kr).cwiseSqrt().cwiseInverse().asDiagonal();
}

Matrix NystromModel::reconstruct(const Matrix& A) const {
  const Matrix C = cross_gram(kernel_, A, samples_);
  Matrix G = C * Wk_pinv_ * C.transpose();
  return 0.5 * (G + G.transpose());
}

NystromTrainer::NystromTrainer(KernelSpec kernel, std::size_t c, std::size_t k,
                               std::uint64_t seed, EntryCounter* counter)
    : kernel_(kernel), c_(c), k_(k), rng_(seed, "nystrom/reservoir"), counter_(counter) {
  kernel_.validate();
  if (c_ < 1) throw ConfigError("Nystrom sample count c must be at least 1");
  if (k_ < 1 || k_ > c_) {
    throw ConfigError("Nystrom rank k=" + std::to_string(k_) + " outside [1, c=" +
                      std::to_string(c_) + "]");
  }
  replacements_.assign(c_, 0);
}

void NystromTrainer::push(const Eigen::Ref<const Vector>& x) {
  if (n_seen_ == 0) {
    if (x.size() < 1) throw ContractViolation("training point has dimension 0");
    samples_lease_ = hold(counter_, c_ * static_cast<std::size_t>(x.size()) + static_cast<std::size_t>(x.size()));
    samples_.resize(static_cast<Eigen::Index>(c_), x.size());
  } else {
    check_dimension(static_cast<std::size_t>(samples_.cols()), x.size(), n_seen_);
  }
  if (!x.allFinite()) {
    throw ContractViolation("point " + std::to_string(n_seen_) + " contains NaN or Inf");
  }
  ++n_seen_;
  const std::uint64_t t = n_seen_;
  for (std::size_t slot = 0; slot < c_; ++slot) {
    if (rng_.below(t) == 0) {
      samples_.row(static_cast<Eigen::Index>(slot)) = x.transpose();
      ++replacements_[slot];
    }
  }
}

NystromModel NystromTrainer::finish() {
  if (n_seen_ == 0) throw ContractViolation("Nystrom training stream is empty");
  return NystromModel(kernel_, samples_, k_, n_seen_, replacements_, counter_);
}

NystromModel nystrom_train(const KernelSpec& kernel, std::size_t c, std::size_t k,
                           std::uint64_t seed, RowStream& stream, EntryCounter* counter) {
  NystromTrainer trainer(kernel, c, k, seed, counter);
  Vector row;
  while (stream.next(row)) trainer.push(row);
  return trainer.finish();
}

NystromModel nystrom_train(const KernelSpec& kernel, std::size_t c, std::size_t k,
                           std::uint64_t seed, const Matrix& A, EntryCounter* counter) {
  MatrixRowStream stream(A);
  return nystrom_train(kernel, c, k, seed, stream, counter);
}

}  // namespace stream_kpca
