#include "s3bo/gp_sparse.hpp"

#include "s3bo/errors.hpp"
#include "s3bo/lhs.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace s3bo {

namespace {

constexpr Eigen::Index kBlock = 2048;
constexpr double kLambdaFloor = 1e-12;
constexpr double kBaseJitter = 1e-10;
constexpr double kMaxJitter = 1e-6;

/// Accumulates B = I + V Lambda^{-1} V^T and beta = V Lambda^{-1} r over
/// column blocks of V, then closes the Woodbury / determinant-lemma forms.
struct WoodburyTerms {
  Matrix B;
  Vector beta;
  double log_lambda_sum = 0.0;
  double weighted_resid = 0.0;
  Matrix lb;
  Vector c;
  double lml = 0.0;

  explicit WoodburyTerms(Eigen::Index m) : B(Matrix::Identity(m, m)), beta(Vector::Zero(m)) {}

  void add(const Matrix& V, const Vector& lambda, const Vector& resid) {
    const Vector inv = lambda.cwiseInverse();
    const Matrix Vs = V * inv.cwiseSqrt().asDiagonal();
    B.selfadjointView<Eigen::Lower>().rankUpdate(Vs);
    beta.noalias() += V * resid.cwiseProduct(inv);
    log_lambda_sum += lambda.array().log().sum();
    weighted_resid += resid.cwiseAbs2().dot(inv);
  }

  void finish(Eigen::Index n) {
    B = Matrix(B.selfadjointView<Eigen::Lower>());
    lb = robust_cholesky(B, 0.0, 0.0, nullptr, "sparse Woodbury factor");
    c = lb.triangularView<Eigen::Lower>().solve(beta);
    const double logdet = log_lambda_sum + 2.0 * lb.diagonal().array().log().sum();
    const double quad = weighted_resid - c.squaredNorm();
    lml = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) - 0.5 * logdet - 0.5 * quad;
  }
};

struct SparsePass {
  Matrix inducing_cols;
  Matrix luu;
  Vector lambda;
  std::optional<WoodburyTerms> main;
  std::optional<WoodburyTerms> noise_form;
  double trace_gap = 0.0;
};

/// One blocked O(n m^2) sweep over the data. `main` uses the variant's
/// Lambda; `noise_form` uses Lambda = noise (needed for the ELBO).
SparsePass sparse_pass(const Matrix& X, const Vector& y, const GpHypers& hypers, const Matrix& U,
                       SparseVariant variant, bool want_main, bool want_noise_form, bool keep_lambda) {
  if (X.rows() == 0) throw InputError("fit_sparse: empty dataset");
  if (U.rows() == 0) throw InputError("fit_sparse: empty inducing set");
  if (X.rows() != y.size()) throw InputError("fit_sparse: row count mismatch");
  if (X.cols() != U.cols()) throw InputError("fit_sparse: inducing width mismatch");
  if (!(hypers.noise_variance >= 0.0)) throw InputError("fit_sparse: noise variance must be >= 0");
  if (!y.allFinite()) throw InputError("fit_sparse: non-finite outputs");

  const auto& kernel = hypers.kernel;
  const double var = kernel.variance();
  const double noise = std::max(hypers.noise_variance, kLambdaFloor);
  const Eigen::Index n = X.rows();
  const Eigen::Index m = U.rows();

  SparsePass pass;
  pass.inducing_cols = kernel.scaled_columns(U);
  const Matrix Kuu = kernel_matrix_scaled(kernel, pass.inducing_cols, pass.inducing_cols);
  pass.luu = robust_cholesky(Kuu, kBaseJitter * var, kMaxJitter * var, nullptr, "fit_sparse Kuu");
  const auto Luu = pass.luu.triangularView<Eigen::Lower>();

  const bool fic = variant == SparseVariant::FIC;
  if (want_main) pass.main.emplace(m);
  if (want_noise_form && (fic || !want_main)) pass.noise_form.emplace(m);
  if (keep_lambda) pass.lambda.resize(n);

  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index b = std::min(kBlock, n - start);
    const Matrix xcols = kernel.scaled_columns(X.middleRows(start, b));
    Matrix V = kernel_matrix_scaled(kernel, pass.inducing_cols, xcols);
    Luu.solveInPlace(V);
    const Vector qdiag = V.colwise().squaredNorm().transpose();
    const Vector gap = (var - qdiag.array()).cwiseMax(0.0).matrix();
    pass.trace_gap += gap.sum();
    const Vector resid = y.segment(start, b).array() - hypers.mean;
    const Vector noise_lambda = Vector::Constant(b, noise);
    const Vector lambda = fic ? Vector((gap.array() + hypers.noise_variance).cwiseMax(kLambdaFloor))
                              : noise_lambda;
    if (keep_lambda) pass.lambda.segment(start, b) = lambda;
    if (pass.main) pass.main->add(V, lambda, resid);
    if (pass.noise_form) pass.noise_form->add(V, noise_lambda, resid);
  }
  if (pass.main) pass.main->finish(n);
  if (pass.noise_form) pass.noise_form->finish(n);
  return pass;
}

double elbo_from(const WoodburyTerms& noise_form, double trace_gap, double noise) {
  return noise_form.lml - 0.5 * trace_gap / noise;
}

}  // namespace

SparseVariant parse_sparse_variant(std::string_view name) {
  if (name == "sor") return SparseVariant::SoR;
  if (name == "dtc") return SparseVariant::DTC;
  if (name == "fic") return SparseVariant::FIC;
  throw InputError("unknown sparse variant '" + std::string(name) + "'");
}

SparseObjective parse_sparse_objective(std::string_view name) {
  if (name == "lml") return SparseObjective::LML;
  if (name == "elbo") return SparseObjective::ELBO;
  throw InputError("unknown sparse objective '" + std::string(name) + "'");
}

std::string to_string(SparseVariant variant) {
  switch (variant) {
    case SparseVariant::SoR: return "sor";
    case SparseVariant::DTC: return "dtc";
    case SparseVariant::FIC: return "fic";
  }
  return "unknown";
}

std::string to_string(SparseObjective objective) {
  return objective == SparseObjective::LML ? "lml" : "elbo";
}

Matrix q_matrix(const KernelSpec& spec, const Matrix& A, const Matrix& U, const Matrix& B) {
  if (A.cols() != U.cols() || B.cols() != U.cols()) throw InputError("q_matrix: width mismatch");
  if (U.rows() == 0) throw InputError("q_matrix: empty inducing set");
  const Matrix ucols = spec.scaled_columns(U);
  const double var = spec.variance();
  const Matrix L = robust_cholesky(kernel_matrix_scaled(spec, ucols, ucols), kBaseJitter * var,
                                   kMaxJitter * var, nullptr, "q_matrix Kuu");
  const auto Lt = L.triangularView<Eigen::Lower>();
  const Matrix Va = Lt.solve(kernel_matrix_scaled(spec, ucols, spec.scaled_columns(A)));
  const Matrix Vb = Lt.solve(kernel_matrix_scaled(spec, ucols, spec.scaled_columns(B)));
  return Va.transpose() * Vb;
}

Matrix sample_inducing(const Box& bounds, Eigen::Index m, Eigen::Index n_data, std::uint64_t seed) {
  if (m < 1) throw InputError("sample_inducing: m must be >= 1");
  if (n_data < 1) throw InputError("sample_inducing: no data");
  return latin_hypercube(bounds, std::min(m, n_data), seed);
}

SparseGp SparseGp::fit(const Matrix& inputs, const Vector& outputs, const GpHypers& hypers,
                       const Matrix& inducing, SparseVariant variant, Options options) {
  const bool elbo_possible = options.compute_elbo && hypers.noise_variance > 0.0;
  SparsePass pass = sparse_pass(inputs, outputs, hypers, inducing, variant, true, elbo_possible, true);

  SparseGp gp(hypers, variant);
  gp.inducing_ = inducing;
  gp.inducing_cols_ = std::move(pass.inducing_cols);
  gp.luu_ = std::move(pass.luu);
  gp.lambda_ = std::move(pass.lambda);
  WoodburyTerms& main = *pass.main;
  gp.lb_ = main.lb;
  gp.lml_ = main.lml;
  // weights = Sigma Kuf Lambda^{-1} r = Luu^{-T} B^{-1} beta
  const Vector binv_beta = gp.lb_.transpose().triangularView<Eigen::Upper>().solve(main.c);
  gp.weights_ = gp.luu_.transpose().triangularView<Eigen::Upper>().solve(binv_beta);
  if (elbo_possible) {
    const WoodburyTerms& noise_form = pass.noise_form ? *pass.noise_form : main;
    gp.elbo_ = elbo_from(noise_form, pass.trace_gap, hypers.noise_variance);
    gp.has_elbo_ = true;
  }
  return gp;
}

double SparseGp::elbo() const {
  if (!has_elbo_) {
    throw InputError("elbo: undefined for zero noise variance (or not computed at fit time)");
  }
  return elbo_;
}

Prediction SparseGp::predict(const Matrix& queries) const {
  if (queries.cols() != dim()) throw InputError("predict_sparse: dimension mismatch");
  const Matrix Kus = kernel_matrix_scaled(hypers_.kernel, inducing_cols_, hypers_.kernel.scaled_columns(queries));
  Prediction out;
  out.mean = (Kus.transpose() * weights_).array() + hypers_.mean;
  const Matrix a = luu_.triangularView<Eigen::Lower>().solve(Kus);
  const Matrix c = lb_.triangularView<Eigen::Lower>().solve(a);
  const Vector explained = c.colwise().squaredNorm().transpose();
  if (variant_ == SparseVariant::SoR) {
    out.variance = explained.cwiseMax(0.0);
  } else {
    const Vector q = a.colwise().squaredNorm().transpose();
    out.variance = (hypers_.kernel.variance() - q.array() + explained.array()).cwiseMax(0.0).matrix();
  }
  return out;
}

PointPrediction SparseGp::predict_point(const Vector& query) const {
  if (query.size() != dim()) throw InputError("predict_sparse: dimension mismatch");
  const Vector& ls = hypers_.kernel.lengthscales();
  const Vector qs = hypers_.kernel.isotropic() ? Vector(query / ls[0]) : Vector(query.cwiseQuotient(ls));
  const Vector k = kernel_vector_scaled(hypers_.kernel, inducing_cols_, qs);
  const Vector a = luu_.triangularView<Eigen::Lower>().solve(k);
  const Vector c = lb_.triangularView<Eigen::Lower>().solve(a);
  PointPrediction out;
  out.mean = hypers_.mean + k.dot(weights_);
  out.variance = variant_ == SparseVariant::SoR
                     ? c.squaredNorm()
                     : hypers_.kernel.variance() - a.squaredNorm() + c.squaredNorm();
  out.variance = std::max(0.0, out.variance);
  return out;
}

double sparse_objective(const Matrix& inputs, const Vector& outputs, const GpHypers& hypers,
                        const Matrix& inducing, SparseVariant variant, SparseObjective objective) {
  if (objective == SparseObjective::LML) {
    const SparsePass pass = sparse_pass(inputs, outputs, hypers, inducing, variant, true, false, false);
    return pass.main->lml;
  }
  if (!(hypers.noise_variance > 0.0)) throw InputError("elbo: undefined for zero noise variance");
  const SparsePass pass = sparse_pass(inputs, outputs, hypers, inducing, variant, false, true, false);
  return elbo_from(*pass.noise_form, pass.trace_gap, hypers.noise_variance);
}

TrainResult train_sparse(const Dataset& data, const GpHypers& init, const HyperBounds& bounds,
                         const Matrix& inducing, SparseVariant variant, SparseObjective objective,
                         const TrainOptions& options) {
  if (data.empty()) throw InputError("train_sparse: empty dataset");
  const KernelFamily family = init.kernel.family();
  const Objective negative = with_central_differences([&](const Vector& p) {
    try {
      const double v = sparse_objective(data.inputs(), data.outputs(),
                                        unpack_log_params(p, family, init.mean), inducing, variant,
                                        objective);
      return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  });

  return multi_start_train(negative, init, bounds, options, "train_sparse");
}

}  // namespace s3bo
