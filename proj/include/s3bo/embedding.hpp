#pragma once

#include "s3bo/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace s3bo {

enum class EmbeddingKind { Gaussian, Identity };

EmbeddingKind parse_embedding_kind(std::string_view name);
std::string to_string(EmbeddingKind kind);

/// Map from the search box Z = [-sqrt(d), sqrt(d)]^d to the problem box X.
///
/// Gaussian: w = (1/d) A z with A ~ N(0,1)^{D x d}. Identity (D == d): w = z.
/// Each coordinate of w is then sent affinely from [-sqrt(d), sqrt(d)] to
/// [lb_i, ub_i] and clamped into the box, which is the Euclidean projection
/// onto an axis-aligned box.
class Embedding {
 public:
  static Embedding draw(Eigen::Index high_dim, Eigen::Index low_dim, const Vector& lower,
                        const Vector& upper, std::uint64_t seed);
  static Embedding identity(const Vector& lower, const Vector& upper);

  [[nodiscard]] EmbeddingKind kind() const { return kind_; }
  [[nodiscard]] Eigen::Index high_dim() const { return bounds_.dim(); }
  [[nodiscard]] Eigen::Index low_dim() const { return low_dim_; }
  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] const Box& bounds() const { return bounds_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  /// [-sqrt(d), sqrt(d)]^d
  [[nodiscard]] Box search_box() const;

  [[nodiscard]] Vector scaled_image(const Vector& z) const;
  /// Affine image of scaled_image(z) before projection onto the box.
  [[nodiscard]] Vector embed_unclamped(const Vector& z) const;
  [[nodiscard]] Vector to_x(const Vector& z) const;

 private:
  Embedding(EmbeddingKind kind, Matrix A, Box bounds, Eigen::Index low_dim, std::uint64_t seed);

  EmbeddingKind kind_;
  Matrix matrix_;
  Box bounds_;
  Eigen::Index low_dim_;
  std::uint64_t seed_;
};

enum class BoundTarget { SqrtD, Unit };

/// Monte Carlo estimate of the probability that one coordinate of
/// x = (1/d) A z (scaled) or x = A z (unscaled) lies in [-sqrt(d), sqrt(d)]
/// (or [-1, 1] for BoundTarget::Unit) with z ~ U[-sqrt(d), sqrt(d)]^d. Each
/// sample draws its own z and its own Gaussian row of A.
double mc_bound_probability(Eigen::Index d, std::int64_t n_samples, std::uint64_t seed, bool scaled,
                            BoundTarget target = BoundTarget::SqrtD);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Sample mean and variance of the same coordinate distribution.
SampleMoments mc_coordinate_moments(Eigen::Index d, std::int64_t n_samples, std::uint64_t seed, bool scaled);

/// Minimum-norm z with T^T (A z) = T^T x_top, where the columns of T span the
/// effective subspace. Throws NumericalError if T^T A is rank deficient.
Vector effective_subspace_witness(const Matrix& basis, const Embedding& embedding, const Vector& x_top);

}  // namespace s3bo
