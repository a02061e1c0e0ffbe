#pragma once

#include "s3bo/dataset.hpp"
#include "s3bo/kernels.hpp"
#include "s3bo/optimize.hpp"
#include "s3bo/surrogate.hpp"

#include <cstdint>

namespace s3bo {

struct GpHypers {
  KernelSpec kernel;
  double noise_variance = 0.0;
  double mean = 0.0;
};

/// Box for hyperparameter search; every range is positive and searched in
/// log space.
struct HyperBounds {
  double amplitude_lo = 1e-2, amplitude_hi = 1e2;
  double lengthscale_lo = 1e-3, lengthscale_hi = 1e1;
  double noise_lo = 1e-8, noise_hi = 1.0;

  /// amplitude in [1e-2, 1e2]*std(y), lengthscale in [1e-3, 1e1]*width,
  /// noise variance in [1e-8, 1]*var(y). A degenerate std(y) counts as 1.
  static HyperBounds from_data(const Vector& y, double domain_width);
};

double sample_mean(const Vector& y);
double sample_std(const Vector& y);

/// Log-space parameter vector [log amplitude, log lengthscales..., log noise].
Vector pack_log_params(const GpHypers& hypers);
GpHypers unpack_log_params(const Vector& params, KernelFamily family, double mean);
void log_param_bounds(const HyperBounds& bounds, Eigen::Index n_lengthscales, Vector& lower,
                      Vector& upper);

/// Lower Cholesky factor of `A`, or of `A + jitter*I` when `A` is singular or
/// badly conditioned, escalating jitter by 10x from `base_jitter` up to
/// `max_jitter`. Throws NumericalError when all fail.
Matrix robust_cholesky(const Matrix& A, double base_jitter, double max_jitter, double* used_jitter,
                       const char* what);

class ExactGp final : public Surrogate {
 public:
  static ExactGp fit(const Matrix& inputs, const Vector& outputs, const GpHypers& hypers);
  static ExactGp fit(const Dataset& data, const GpHypers& hypers);

  [[nodiscard]] Eigen::Index dim() const override { return inputs_.cols(); }
  [[nodiscard]] Eigen::Index size() const { return inputs_.rows(); }
  [[nodiscard]] Prediction predict(const Matrix& queries) const override;
  [[nodiscard]] PointPrediction predict_point(const Vector& query) const override;

  [[nodiscard]] double log_marginal_likelihood() const { return lml_; }
  /// Gradient of the log marginal likelihood w.r.t. pack_log_params().
  [[nodiscard]] Vector log_marginal_likelihood_gradient() const;

  [[nodiscard]] const GpHypers& hypers() const { return hypers_; }
  [[nodiscard]] const Matrix& cholesky_factor() const { return chol_; }
  [[nodiscard]] double jitter() const { return jitter_; }

 private:
  ExactGp(GpHypers hypers) : hypers_(std::move(hypers)) {}

  GpHypers hypers_;
  Matrix inputs_;
  Matrix scaled_cols_;
  Matrix chol_;
  Vector alpha_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

struct TrainOptions {
  int restarts = 5;
  std::uint64_t seed = 0;
  BoxMinimizeOptions local{};
};

struct TrainResult {
  GpHypers hypers;
  double objective = 0.0;
  int failed_restarts = 0;
};

/// Shared multi-start driver: minimizes `negative_objective` over the log
/// parameters, first from `init` then from uniform draws in the log box.
TrainResult multi_start_train(const Objective& negative_objective, const GpHypers& init,
                              const HyperBounds& bounds, const TrainOptions& options, const char* what);

/// Multi-start maximization of the exact log marginal likelihood over
/// amplitude, lengthscales and noise variance. The mean stays at init.mean.
/// The first start is `init` itself, so the result never scores below it.
TrainResult train_hypers_exact(const Dataset& data, const GpHypers& init, const HyperBounds& bounds,
                               const TrainOptions& options);

}  // namespace s3bo
