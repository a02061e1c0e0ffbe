#pragma once

#include "s3bo/types.hpp"

#include <string>
#include <string_view>

namespace s3bo {

enum class KernelFamily { Matern12, Matern32, Matern52, SqExp };

KernelFamily parse_kernel_family(std::string_view name);
std::string to_string(KernelFamily family);

/// Stationary kernel k(x, x') = amplitude^2 * g(r), with r the Euclidean norm
/// of the lengthscale-divided difference. A single lengthscale is isotropic;
/// otherwise there is one per input dimension (ARD).
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, double amplitude, Vector lengthscales);
  KernelSpec(KernelFamily family, double amplitude, double lengthscale);

  [[nodiscard]] KernelFamily family() const { return family_; }
  [[nodiscard]] double amplitude() const { return amplitude_; }
  [[nodiscard]] double variance() const { return amplitude_ * amplitude_; }
  [[nodiscard]] const Vector& lengthscales() const { return lengthscales_; }
  [[nodiscard]] bool isotropic() const { return lengthscales_.size() == 1; }

  /// Whether inputs of width `dim` are compatible with the lengthscales.
  [[nodiscard]] bool accepts(Eigen::Index dim) const;

  /// Covariance as a function of the scaled distance r.
  [[nodiscard]] double from_distance(double r) const;
  /// (dk/dr) / r, finite at r = 0 except for Matern12 where it returns 0
  /// (the matching squared difference is 0 there).
  [[nodiscard]] double dk_dr_over_r(double r) const;

  /// Inputs divided by their lengthscales, transposed to dim x n so that each
  /// point is a contiguous column.
  [[nodiscard]] Matrix scaled_columns(const Matrix& X) const;

 private:
  KernelFamily family_;
  double amplitude_;
  Vector lengthscales_;
};

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2);

/// K(i, j) = k(X.row(i), X2.row(j)).
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X, const Matrix& X2);

/// Symmetric K(X, X).
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X);

/// Kernel against one query point: k(X.row(i), x).
Vector kernel_vector(const KernelSpec& spec, const Matrix& X, const Vector& x);

/// Cross-covariance between point sets already passed through
/// KernelSpec::scaled_columns (one point per column).
Matrix kernel_matrix_scaled(const KernelSpec& spec, const Matrix& a_cols, const Matrix& b_cols);
Vector kernel_vector_scaled(const KernelSpec& spec, const Matrix& a_cols, const Vector& b_col);

}  // namespace s3bo
