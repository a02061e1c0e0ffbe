#include "s3bo/embedding.hpp"

#include "s3bo/errors.hpp"

#include <cmath>
#include <random>

namespace s3bo {

EmbeddingKind parse_embedding_kind(std::string_view name) {
  if (name == "gaussian") return EmbeddingKind::Gaussian;
  if (name == "identity") return EmbeddingKind::Identity;
  throw InputError("unknown embedding kind '" + std::string(name) + "'");
}

std::string to_string(EmbeddingKind kind) {
  return kind == EmbeddingKind::Gaussian ? "gaussian" : "identity";
}

Embedding::Embedding(EmbeddingKind kind, Matrix A, Box bounds, Eigen::Index low_dim, std::uint64_t seed)
    : kind_(kind), matrix_(std::move(A)), bounds_(std::move(bounds)), low_dim_(low_dim), seed_(seed) {}

Embedding Embedding::draw(Eigen::Index high_dim, Eigen::Index low_dim, const Vector& lower,
                          const Vector& upper, std::uint64_t seed) {
  if (low_dim < 1 || high_dim < low_dim) throw InputError("embedding requires D >= d >= 1");
  if (lower.size() != high_dim) throw InputError("embedding bounds must have length D");
  Box bounds(lower, upper);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(high_dim, low_dim);
  for (Eigen::Index j = 0; j < low_dim; ++j) {
    for (Eigen::Index i = 0; i < high_dim; ++i) A(i, j) = normal(rng);
  }
  return Embedding(EmbeddingKind::Gaussian, std::move(A), std::move(bounds), low_dim, seed);
}

Embedding Embedding::identity(const Vector& lower, const Vector& upper) {
  Box bounds(lower, upper);
  const Eigen::Index d = bounds.dim();
  return Embedding(EmbeddingKind::Identity, Matrix::Identity(d, d), std::move(bounds), d, 0);
}

Box Embedding::search_box() const {
  const double r = std::sqrt(static_cast<double>(low_dim_));
  return Box::cube(low_dim_, -r, r);
}

Vector Embedding::scaled_image(const Vector& z) const {
  if (z.size() != low_dim_) throw InputError("embed_to_x: z has wrong dimension");
  if (kind_ == EmbeddingKind::Identity) return z;
  return (matrix_ * z) / static_cast<double>(low_dim_);
}

Vector Embedding::embed_unclamped(const Vector& z) const {
  const double r = std::sqrt(static_cast<double>(low_dim_));
  const Vector w = scaled_image(z);
  return (bounds_.lower.array() + (w.array() + r) / (2.0 * r) * bounds_.width().array()).matrix();
}

Vector Embedding::to_x(const Vector& z) const { return bounds_.clamp(embed_unclamped(z)); }

namespace {

template <typename Visit>
void sample_coordinates(Eigen::Index d, std::int64_t n_samples, std::uint64_t seed, bool scaled, Visit visit) {
  if (d < 1) throw InputError("mc sampling: d must be >= 1");
  if (n_samples < 1) throw InputError("mc sampling: need at least one sample");
  const double r = std::sqrt(static_cast<double>(d));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-r, r);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = scaled ? 1.0 / static_cast<double>(d) : 1.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    double x = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) x += normal(rng) * uniform(rng);
    visit(scale * x);
  }
}

}  // namespace

double mc_bound_probability(Eigen::Index d, std::int64_t n_samples, std::uint64_t seed, bool scaled,
                            BoundTarget target) {
  const double limit = target == BoundTarget::SqrtD ? std::sqrt(static_cast<double>(d)) : 1.0;
  std::int64_t inside = 0;
  sample_coordinates(d, n_samples, seed, scaled, [&](double x) {
    if (std::abs(x) <= limit) ++inside;
  });
  return static_cast<double>(inside) / static_cast<double>(n_samples);
}

SampleMoments mc_coordinate_moments(Eigen::Index d, std::int64_t n_samples, std::uint64_t seed, bool scaled) {
  // Welford accumulation
  double mean = 0.0, m2 = 0.0;
  std::int64_t count = 0;
  sample_coordinates(d, n_samples, seed, scaled, [&](double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  });
  return {mean, count > 1 ? m2 / static_cast<double>(count - 1) : 0.0};
}

Vector effective_subspace_witness(const Matrix& basis, const Embedding& embedding, const Vector& x_top) {
  const Matrix& A = embedding.matrix();
  if (basis.rows() != A.rows() || x_top.size() != A.rows()) {
    throw InputError("witness: basis and x_top must have D rows");
  }
  if (basis.cols() < 1 || basis.cols() > A.cols()) throw InputError("witness: requires 1 <= d_e <= d");
  const Matrix M = basis.transpose() * A;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  if (cod.rank() < basis.cols()) throw NumericalError("witness: T^T A is rank deficient");
  return cod.solve(basis.transpose() * x_top);
}

}  // namespace s3bo
