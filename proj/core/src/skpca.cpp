#include "stream_kpca/skpca.hpp"

#include "stream_kpca/error.hpp"

#include <cmath>
#include <string>

namespace stream_kpca {

namespace {

void require_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw ConfigError(std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
  }
}

SkpcaConfig validated(const SkpcaConfig& config) {
  config.validate();
  return config;
}

}  // namespace

std::size_t rff_feature_count(double eps, double delta, std::size_t n) {
  require_unit_interval(eps, "eps");
  require_unit_interval(delta, "delta");
  if (n < 1) throw ConfigError("n must be positive");
  const double m = (9.0 + 8.0 * eps) / (eps * eps) * std::log(2.0 * static_cast<double>(n) / delta);
  return static_cast<std::size_t>(std::ceil(m));
}

std::size_t sketch_size_for(double eps) {
  require_unit_interval(eps, "eps");
  return even_sketch_size(static_cast<std::size_t>(std::ceil(4.0 / eps)));
}

std::size_t nystrom_sample_count(double eps, double delta, std::size_t n) {
  require_unit_interval(eps, "eps");
  require_unit_interval(delta, "delta");
  if (n < 1) throw ConfigError("n must be positive");
  return static_cast<std::size_t>(
      std::ceil(std::log(2.0 * static_cast<double>(n) / delta) / (eps * eps)));
}

SkpcaConfig SkpcaConfig::from_error(double eps, double delta, std::size_t n, KernelSpec kernel,
                                    std::uint64_t seed) {
  SkpcaConfig c;
  c.m = rff_feature_count(eps, delta, n);
  c.ell = sketch_size_for(eps);
  c.kernel = kernel;
  c.seed = seed;
  c.eps = eps;
  c.delta = delta;
  c.validate();
  return c;
}

void SkpcaConfig::validate() const {
  kernel.validate();
  if (ell < 2 || ell % 2 != 0) {
    throw ConfigError("ell must be even and at least 2, got " + std::to_string(ell));
  }
  if (m < ell) {
    throw ConfigError("m=" + std::to_string(m) + " must be at least ell=" + std::to_string(ell));
  }
  if (eps) require_unit_interval(*eps, "eps");
  if (delta) require_unit_interval(*delta, "delta");
}

SkpcaModel::SkpcaModel(FeatureMap fm, Matrix W, Vector S, std::size_t n_seen)
    : fm_(std::move(fm)), W_(std::move(W)), S_(std::move(S)), n_seen_(n_seen) {
  if (static_cast<std::size_t>(W_.rows()) != fm_.m() || W_.cols() != S_.size()) {
    throw ContractViolation("SKPCA basis shape does not match the feature map");
  }
}

Projection SkpcaModel::project(const Eigen::Ref<const Vector>& x, std::size_t k) const {
  if (k < 1 || k > ell()) {
    throw ContractViolation("projection rank k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(ell()) + "]");
  }
  Projection p;
  p.lifted = fm_.apply(x);
  const auto kk = static_cast<Eigen::Index>(k);
  const auto Wk = W_.leftCols(kk);
  p.loading.noalias() = Wk.transpose() * p.lifted;
  p.residual = (p.lifted - Wk * p.loading).norm();
  return p;
}

Matrix SkpcaModel::factor(const Matrix& A) const {
  return fm_.apply_batch(A) * W_;
}

Matrix SkpcaModel::reconstruct_gram(const Matrix& A) const {
  const Matrix Y = factor(A);
  Matrix G = Y * Y.transpose();
  return 0.5 * (G + G.transpose());
}

SkpcaTrainer::SkpcaTrainer(const SkpcaConfig& config, EntryCounter* counter)
    : config_(validated(config)), counter_(counter), sketch_(config.ell, config.m, counter) {}

void SkpcaTrainer::push(const Eigen::Ref<const Vector>& x) {
  if (!fm_) {
    if (x.size() < 1) throw ContractViolation("training point has dimension 0");
    fm_ = FeatureMap::sample(config_.kernel, config_.m, static_cast<std::size_t>(x.size()),
                             config_.seed);
    fm_lease_ = hold(counter_, fm_->logical_entries());
    buffer_lease_ = hold(counter_, fm_->m() + fm_->d());
    lifted_.resize(static_cast<Eigen::Index>(fm_->m()));
  } else if (static_cast<std::size_t>(x.size()) != fm_->d()) {
    throw ContractViolation("point " + std::to_string(n_seen_) + " has dimension " +
                            std::to_string(x.size()) + ", expected " + std::to_string(fm_->d()));
  }
  if (!x.allFinite()) {
    throw ContractViolation("point " + std::to_string(n_seen_) + " contains NaN or Inf");
  }
  fm_->apply_into(x, lifted_);
  sketch_.insert(lifted_);
  ++n_seen_;
}

SkpcaModel SkpcaTrainer::finish() {
  if (n_seen_ == 0 || !fm_) throw ContractViolation("SKPCA training stream is empty");
  FdSketch::Basis basis = sketch_.basis();
  return SkpcaModel(*fm_, std::move(basis.W), std::move(basis.S), n_seen_);
}

SkpcaModel train(const SkpcaConfig& config, RowStream& stream, EntryCounter* counter) {
  SkpcaTrainer trainer(config, counter);
  Vector row;
  while (stream.next(row)) trainer.push(row);
  return trainer.finish();
}

SkpcaModel train(const SkpcaConfig& config, const Matrix& A, EntryCounter* counter) {
  MatrixRowStream stream(A);
  return train(config, stream, counter);
}

}  // namespace stream_kpca
