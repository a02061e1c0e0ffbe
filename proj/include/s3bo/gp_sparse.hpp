#pragma once

#include "s3bo/gp_exact.hpp"

#include <string_view>

namespace s3bo {

enum class SparseVariant { SoR, DTC, FIC };
enum class SparseObjective { LML, ELBO };

SparseVariant parse_sparse_variant(std::string_view name);
SparseObjective parse_sparse_objective(std::string_view name);
std::string to_string(SparseVariant variant);
std::string to_string(SparseObjective objective);

/// Nystrom cross-covariance Q(A, B) = K(A,U) Kuu^{-1} K(U,B), realized with a
/// Cholesky solve against Kuu.
Matrix q_matrix(const KernelSpec& spec, const Matrix& A, const Matrix& U, const Matrix& B);

/// min(n_data, m) Latin hypercube inducing inputs in `bounds`.
Matrix sample_inducing(const Box& bounds, Eigen::Index m, Eigen::Index n_data, std::uint64_t seed);

/// Low-rank sparse GP with m inducing inputs. Fitting costs O(n m^2) and
/// keeps only m-sized state plus the diagonal Lambda, so a query costs O(m)
/// for the mean and O(m^2) for the variance.
///
/// Lambda is diag(Kff - Qff) + noise for FIC and noise for SoR/DTC, floored at
/// 1e-12. Sigma = (Kuu + Kuf Lambda^{-1} Kfu)^{-1} is held as
/// Luu^{-T} B^{-1} Luu^{-1} with B = I + V Lambda^{-1} V^T and V = Luu^{-1} Kuf.
class SparseGp final : public Surrogate {
 public:
  struct Options {
    bool compute_elbo = true;
  };

  static SparseGp fit(const Matrix& inputs, const Vector& outputs, const GpHypers& hypers,
                      const Matrix& inducing, SparseVariant variant, Options options);
  static SparseGp fit(const Matrix& inputs, const Vector& outputs, const GpHypers& hypers,
                      const Matrix& inducing, SparseVariant variant) {
    return fit(inputs, outputs, hypers, inducing, variant, Options{});
  }
  static SparseGp fit(const Dataset& data, const GpHypers& hypers, const Matrix& inducing,
                      SparseVariant variant) {
    return fit(data.inputs(), data.outputs(), hypers, inducing, variant, Options{});
  }

  [[nodiscard]] Eigen::Index dim() const override { return inducing_.cols(); }
  [[nodiscard]] Prediction predict(const Matrix& queries) const override;
  [[nodiscard]] PointPrediction predict_point(const Vector& query) const override;

  /// log N(y | m, Qff + Lambda) via Woodbury and the determinant lemma.
  [[nodiscard]] double log_marginal_likelihood() const { return lml_; }
  /// Variational lower bound: log N(y | m, noise*I + Qff) - tr(Kff - Qff)/(2 noise).
  [[nodiscard]] double elbo() const;

  [[nodiscard]] const GpHypers& hypers() const { return hypers_; }
  [[nodiscard]] SparseVariant variant() const { return variant_; }
  [[nodiscard]] const Matrix& inducing() const { return inducing_; }
  [[nodiscard]] const Vector& lambda() const { return lambda_; }
  [[nodiscard]] const Vector& weights() const { return weights_; }
  [[nodiscard]] Eigen::Index num_inducing() const { return inducing_.rows(); }

 private:
  SparseGp(GpHypers hypers, SparseVariant variant) : hypers_(std::move(hypers)), variant_(variant) {}

  GpHypers hypers_;
  SparseVariant variant_;
  Matrix inducing_;
  Matrix inducing_cols_;
  Matrix luu_;
  Matrix lb_;
  Vector weights_;
  Vector lambda_;
  double lml_ = 0.0;
  double elbo_ = 0.0;
  bool has_elbo_ = false;
};

/// Value of the chosen training objective without keeping a model.
double sparse_objective(const Matrix& inputs, const Vector& outputs, const GpHypers& hypers,
                        const Matrix& inducing, SparseVariant variant, SparseObjective objective);

/// Multi-start maximization of LML or ELBO with fixed inducing inputs.
TrainResult train_sparse(const Dataset& data, const GpHypers& init, const HyperBounds& bounds,
                         const Matrix& inducing, SparseVariant variant, SparseObjective objective,
                         const TrainOptions& options);

}  // namespace s3bo
