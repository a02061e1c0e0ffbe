#include "s3bo/kernels.hpp"

#include "s3bo/errors.hpp"

#include <cmath>

namespace s3bo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt5 = 2.2360679774997896964;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InputError(std::string("non-finite values in ") + what);
}

}  // namespace

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "matern12") return KernelFamily::Matern12;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  if (name == "sqexp") return KernelFamily::SqExp;
  throw InputError("unknown kernel family '" + std::string(name) + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern12: return "matern12";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
    case KernelFamily::SqExp: return "sqexp";
  }
  return "unknown";
}

KernelSpec::KernelSpec(KernelFamily family, double amplitude, Vector lengthscales)
    : family_(family), amplitude_(amplitude), lengthscales_(std::move(lengthscales)) {
  if (!(amplitude_ > 0.0) || !std::isfinite(amplitude_)) {
    throw InputError("kernel amplitude must be positive and finite");
  }
  if (lengthscales_.size() == 0) throw InputError("kernel needs at least one lengthscale");
  for (Eigen::Index i = 0; i < lengthscales_.size(); ++i) {
    if (!(lengthscales_[i] > 0.0) || !std::isfinite(lengthscales_[i])) {
      throw InputError("kernel lengthscales must be positive and finite");
    }
  }
}

KernelSpec::KernelSpec(KernelFamily family, double amplitude, double lengthscale)
    : KernelSpec(family, amplitude, Vector::Constant(1, lengthscale)) {}

bool KernelSpec::accepts(Eigen::Index dim) const {
  return isotropic() || lengthscales_.size() == dim;
}

double KernelSpec::from_distance(double r) const {
  const double v = variance();
  switch (family_) {
    case KernelFamily::Matern12: return v * std::exp(-r);
    case KernelFamily::Matern32: return v * std::exp(-kSqrt3 * r) * (1.0 + kSqrt3 * r);
    case KernelFamily::Matern52:
      return v * std::exp(-kSqrt5 * r) * (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r);
    case KernelFamily::SqExp: return v * std::exp(-0.5 * r * r);
  }
  return 0.0;
}

double KernelSpec::dk_dr_over_r(double r) const {
  const double v = variance();
  switch (family_) {
    case KernelFamily::Matern12: return r > 0.0 ? -v * std::exp(-r) / r : 0.0;
    case KernelFamily::Matern32: return -3.0 * v * std::exp(-kSqrt3 * r);
    case KernelFamily::Matern52: return -5.0 / 3.0 * v * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    case KernelFamily::SqExp: return -v * std::exp(-0.5 * r * r);
  }
  return 0.0;
}

Matrix KernelSpec::scaled_columns(const Matrix& X) const {
  if (!accepts(X.cols())) throw InputError("input width does not match kernel lengthscales");
  if (!X.allFinite()) throw InputError("non-finite kernel inputs");
  if (isotropic()) return X.transpose() / lengthscales_[0];
  return lengthscales_.cwiseInverse().asDiagonal() * X.transpose();
}

Matrix kernel_matrix_scaled(const KernelSpec& spec, const Matrix& a_cols, const Matrix& b_cols) {
  if (a_cols.rows() != b_cols.rows()) throw InputError("kernel inputs have different widths");
  Matrix K(a_cols.cols(), b_cols.cols());
  for (Eigen::Index j = 0; j < b_cols.cols(); ++j) {
    for (Eigen::Index i = 0; i < a_cols.cols(); ++i) {
      K(i, j) = spec.from_distance((a_cols.col(i) - b_cols.col(j)).norm());
    }
  }
  return K;
}

Vector kernel_vector_scaled(const KernelSpec& spec, const Matrix& a_cols, const Vector& b_col) {
  if (a_cols.rows() != b_col.size()) throw InputError("kernel inputs have different widths");
  Vector k(a_cols.cols());
  for (Eigen::Index i = 0; i < a_cols.cols(); ++i) {
    k[i] = spec.from_distance((a_cols.col(i) - b_col).norm());
  }
  return k;
}

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2) {
  if (x.size() != x2.size() || !spec.accepts(x.size())) {
    throw InputError("kernel_eval: dimension mismatch");
  }
  require_finite(x, "kernel_eval x");
  require_finite(x2, "kernel_eval x'");
  const Vector diff = x - x2;
  const double r = spec.isotropic() ? diff.norm() / spec.lengthscales()[0]
                                    : diff.cwiseQuotient(spec.lengthscales()).norm();
  return spec.from_distance(r);
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X, const Matrix& X2) {
  if (X.cols() != X2.cols()) throw InputError("kernel_matrix: column counts differ");
  if (X.rows() == 0 || X2.rows() == 0) throw InputError("kernel_matrix: empty input");
  return kernel_matrix_scaled(spec, spec.scaled_columns(X), spec.scaled_columns(X2));
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X) {
  if (X.rows() == 0) throw InputError("kernel_matrix: empty input");
  const Matrix cols = spec.scaled_columns(X);
  const Eigen::Index n = cols.cols();
  Matrix K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = spec.variance();
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double k = spec.from_distance((cols.col(i) - cols.col(j)).norm());
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

Vector kernel_vector(const KernelSpec& spec, const Matrix& X, const Vector& x) {
  if (X.cols() != x.size()) throw InputError("kernel_vector: dimension mismatch");
  require_finite(x, "kernel_vector query");
  const Vector xs = spec.isotropic() ? Vector(x / spec.lengthscales()[0])
                                     : Vector(x.cwiseQuotient(spec.lengthscales()));
  return kernel_vector_scaled(spec, spec.scaled_columns(X), xs);
}

}  // namespace s3bo
