#include "s3bo/gp_exact.hpp"

#include "s3bo/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace s3bo {

namespace {

constexpr double kBaseJitter = 1e-10;
constexpr double kMaxJitter = 1e-6;
constexpr double kExactRcond = 1e-10;

}  // namespace

HyperBounds HyperBounds::from_data(const Vector& y, double domain_width) {
  double s = y.size() > 1 ? sample_std(y) : 0.0;
  if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
  if (!(domain_width > 0.0)) throw InputError("domain width must be positive");
  HyperBounds b;
  b.amplitude_lo = 1e-2 * s;
  b.amplitude_hi = 1e2 * s;
  b.lengthscale_lo = 1e-3 * domain_width;
  b.lengthscale_hi = 1e1 * domain_width;
  b.noise_lo = 1e-8 * s * s;
  b.noise_hi = s * s;
  return b;
}

double sample_mean(const Vector& y) { return y.size() == 0 ? 0.0 : y.mean(); }

double sample_std(const Vector& y) {
  if (y.size() == 0) return 0.0;
  const double m = y.mean();
  return std::sqrt((y.array() - m).square().mean());
}

Vector pack_log_params(const GpHypers& hypers) {
  const auto& ls = hypers.kernel.lengthscales();
  Vector p(ls.size() + 2);
  p[0] = std::log(hypers.kernel.amplitude());
  p.segment(1, ls.size()) = ls.array().log().matrix();
  p[p.size() - 1] = std::log(hypers.noise_variance);
  return p;
}

GpHypers unpack_log_params(const Vector& params, KernelFamily family, double mean) {
  if (params.size() < 3) throw InputError("log parameter vector too short");
  const Eigen::Index nl = params.size() - 2;
  Vector ls = params.segment(1, nl).array().exp().matrix();
  return GpHypers{KernelSpec(family, std::exp(params[0]), std::move(ls)),
                  std::exp(params[params.size() - 1]), mean};
}

void log_param_bounds(const HyperBounds& b, Eigen::Index n_lengthscales, Vector& lower,
                      Vector& upper) {
  lower.resize(n_lengthscales + 2);
  upper.resize(n_lengthscales + 2);
  lower[0] = std::log(b.amplitude_lo);
  upper[0] = std::log(b.amplitude_hi);
  lower.segment(1, n_lengthscales).setConstant(std::log(b.lengthscale_lo));
  upper.segment(1, n_lengthscales).setConstant(std::log(b.lengthscale_hi));
  lower[n_lengthscales + 1] = std::log(b.noise_lo);
  upper[n_lengthscales + 1] = std::log(b.noise_hi);
  if (!(lower.array() <= upper.array()).all()) throw InputError("hyperparameter bounds inverted");
}

Matrix robust_cholesky(const Matrix& A, double base_jitter, double max_jitter, double* used_jitter,
                       const char* what) {
  const Eigen::Index n = A.rows();
  {
    // Jitter is only a fallback: well-conditioned matrices are factored as given.
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() == Eigen::Success && llt.rcond() > kExactRcond) {
      if (used_jitter != nullptr) *used_jitter = 0.0;
      return llt.matrixL();
    }
  }
  for (double jitter = base_jitter;; jitter *= 10.0) {
    Matrix shifted = A;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().allFinite()) {
      if (used_jitter != nullptr) *used_jitter = jitter;
      return llt.matrixL();
    }
    if (!(jitter > 0.0) || jitter * 10.0 > max_jitter * 1.0000001) break;
  }
  std::ostringstream msg;
  const double dmax = A.diagonal().maxCoeff();
  const double dmin = A.diagonal().minCoeff();
  msg << what << ": Cholesky failed for " << n << "x" << n << " matrix after jitter up to "
      << max_jitter << " (diagonal range [" << dmin << ", " << dmax << "])";
  throw NumericalError(msg.str());
}

ExactGp ExactGp::fit(const Dataset& data, const GpHypers& hypers) {
  return fit(data.inputs(), data.outputs(), hypers);
}

ExactGp ExactGp::fit(const Matrix& inputs, const Vector& outputs, const GpHypers& hypers) {
  if (inputs.rows() == 0) throw InputError("fit_exact: empty dataset");
  if (inputs.rows() != outputs.size()) throw InputError("fit_exact: row count mismatch");
  if (!(hypers.noise_variance >= 0.0)) throw InputError("fit_exact: noise variance must be >= 0");
  if (!outputs.allFinite() || !std::isfinite(hypers.mean)) throw InputError("fit_exact: non-finite outputs");

  ExactGp gp(hypers);
  gp.inputs_ = inputs;
  gp.scaled_cols_ = hypers.kernel.scaled_columns(inputs);
  const Eigen::Index n = inputs.rows();
  Matrix K = kernel_matrix_scaled(hypers.kernel, gp.scaled_cols_, gp.scaled_cols_);
  K.diagonal().array() += hypers.noise_variance;
  const double var = hypers.kernel.variance();
  gp.chol_ = robust_cholesky(K, kBaseJitter * var, kMaxJitter * var, &gp.jitter_, "fit_exact");

  const Vector resid = outputs.array() - hypers.mean;
  const auto L = gp.chol_.triangularView<Eigen::Lower>();
  const Vector half = L.solve(resid);
  gp.alpha_ = gp.chol_.transpose().triangularView<Eigen::Upper>().solve(half);
  const double logdet = 2.0 * gp.chol_.diagonal().array().log().sum();
  gp.lml_ = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) - 0.5 * logdet -
            0.5 * half.squaredNorm();
  return gp;
}

Prediction ExactGp::predict(const Matrix& queries) const {
  if (queries.cols() != dim()) throw InputError("predict_exact: dimension mismatch");
  const Matrix qcols = hypers_.kernel.scaled_columns(queries);
  const Matrix Kfs = kernel_matrix_scaled(hypers_.kernel, scaled_cols_, qcols);
  Prediction out;
  out.mean = (Kfs.transpose() * alpha_).array() + hypers_.mean;
  const Matrix v = chol_.triangularView<Eigen::Lower>().solve(Kfs);
  out.variance = (hypers_.kernel.variance() - v.colwise().squaredNorm().transpose().array())
                     .cwiseMax(0.0)
                     .matrix();
  return out;
}

PointPrediction ExactGp::predict_point(const Vector& query) const {
  if (query.size() != dim()) throw InputError("predict_exact: dimension mismatch");
  const Vector& ls = hypers_.kernel.lengthscales();
  const Vector q = hypers_.kernel.isotropic() ? Vector(query / ls[0]) : Vector(query.cwiseQuotient(ls));
  const Vector k = kernel_vector_scaled(hypers_.kernel, scaled_cols_, q);
  const Vector v = chol_.triangularView<Eigen::Lower>().solve(k);
  return {hypers_.mean + k.dot(alpha_), std::max(0.0, hypers_.kernel.variance() - v.squaredNorm())};
}

Vector ExactGp::log_marginal_likelihood_gradient() const {
  const Eigen::Index n = size();
  const auto& kernel = hypers_.kernel;
  const Eigen::Index nl = kernel.lengthscales().size();
  const auto L = chol_.triangularView<Eigen::Lower>();
  Matrix Kinv = L.solve(Matrix::Identity(n, n));
  Kinv = L.transpose().solve(Kinv);
  const Matrix W = alpha_ * alpha_.transpose() - Kinv;

  Vector grad = Vector::Zero(nl + 2);
  grad[0] = W.diagonal().sum() * kernel.variance();
  Vector diff(scaled_cols_.rows());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      diff.noalias() = scaled_cols_.col(i) - scaled_cols_.col(j);
      const double r = diff.norm();
      // W is symmetric: the (i, j) and (j, i) terms are folded together.
      const double w = W(i, j);
      grad[0] += 2.0 * w * kernel.from_distance(r);
      const double g = -w * kernel.dk_dr_over_r(r);
      if (nl == 1) {
        grad[1] += g * r * r;
      } else {
        grad.segment(1, nl) += g * diff.array().square().matrix();
      }
    }
  }
  grad[nl + 1] = 0.5 * hypers_.noise_variance * W.trace();
  return grad;
}

TrainResult multi_start_train(const Objective& negative_objective, const GpHypers& init,
                              const HyperBounds& bounds, const TrainOptions& options, const char* what) {
  if (options.restarts < 1) throw InputError(std::string(what) + ": restarts must be >= 1");
  const KernelFamily family = init.kernel.family();
  const Eigen::Index nl = init.kernel.lengthscales().size();
  Vector lower, upper;
  log_param_bounds(bounds, nl, lower, upper);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TrainResult best{init, -std::numeric_limits<double>::infinity(), 0};
  bool found = false;
  Vector start = pack_log_params(
      GpHypers{init.kernel, std::max(init.noise_variance, bounds.noise_lo), init.mean});
  for (int r = 0; r < options.restarts; ++r) {
    if (r > 0) {
      for (Eigen::Index i = 0; i < start.size(); ++i) {
        start[i] = lower[i] + unit(rng) * (upper[i] - lower[i]);
      }
    }
    const BoxMinimizeResult res = minimize_box(negative_objective, start, lower, upper, options.local);
    if (!std::isfinite(res.value)) {
      ++best.failed_restarts;
      continue;
    }
    if (!found || -res.value > best.objective) {
      best.hypers = unpack_log_params(res.x, family, init.mean);
      best.objective = -res.value;
      found = true;
    }
  }
  if (!found) {
    throw NumericalError(std::string(what) + ": all " + std::to_string(options.restarts) +
                         " restarts failed; keeping initial hyperparameters");
  }
  return best;
}

TrainResult train_hypers_exact(const Dataset& data, const GpHypers& init, const HyperBounds& bounds,
                               const TrainOptions& options) {
  if (data.empty()) throw InputError("train_hypers_exact: empty dataset");
  const KernelFamily family = init.kernel.family();
  const Objective negative_lml = [&](const Vector& p, Vector* grad) {
    try {
      const ExactGp gp = ExactGp::fit(data, unpack_log_params(p, family, init.mean));
      if (grad != nullptr) *grad = -gp.log_marginal_likelihood_gradient();
      return -gp.log_marginal_likelihood();
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  return multi_start_train(negative_lml, init, bounds, options, "train_hypers_exact");
}

}  // namespace s3bo
