#pragma once

// Brute-force references built from explicit dense matrices and LU inverses,
// deliberately sharing no code path with the library's Cholesky routines.

#include "s3bo/gp_sparse.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>

namespace s3bo::testing {

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                             double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Entrywise kernel loop using the textbook closed forms.
inline double oracle_kernel(KernelFamily family, double amplitude, const Vector& ell, const Vector& a,
                            const Vector& b) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / (ell.size() == 1 ? ell[0] : ell[i]);
    r2 += d * d;
  }
  const double r = std::sqrt(r2);
  double g = 0.0;
  switch (family) {
    case KernelFamily::Matern12: g = std::exp(-r); break;
    case KernelFamily::Matern32: g = (1 + std::sqrt(3.0) * r) * std::exp(-std::sqrt(3.0) * r); break;
    case KernelFamily::Matern52:
      g = (1 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) * std::exp(-std::sqrt(5.0) * r);
      break;
    case KernelFamily::SqExp: g = std::exp(-0.5 * r2); break;
  }
  return amplitude * amplitude * g;
}

inline Matrix oracle_gram(const GpHypers& h, const Matrix& A, const Matrix& B) {
  Matrix K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      K(i, j) = oracle_kernel(h.kernel.family(), h.kernel.amplitude(), h.kernel.lengthscales(),
                              A.row(i).transpose(), B.row(j).transpose());
  return K;
}

struct DenseResult {
  Vector mean;
  Vector variance;
  double lml = 0.0;
};

inline double dense_gaussian_logpdf(const Vector& r, const Matrix& C) {
  const Eigen::FullPivLU<Matrix> lu(C);
  const double n = static_cast<double>(r.size());
  return -0.5 * r.dot(lu.solve(r)) - 0.5 * std::log(std::abs(lu.determinant())) -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

/// Exact GP via an explicit inverse of K + noise*I.
inline DenseResult dense_exact(const GpHypers& h, const Matrix& X, const Vector& y, const Matrix& Xs) {
  const Eigen::Index n = X.rows();
  const Matrix C = oracle_gram(h, X, X) + h.noise_variance * Matrix::Identity(n, n);
  const Matrix Cinv = C.fullPivLu().inverse();
  const Matrix Kfs = oracle_gram(h, X, Xs);
  const Vector r = y.array() - h.mean;
  DenseResult out;
  out.mean = (Kfs.transpose() * Cinv * r).array() + h.mean;
  out.variance = (oracle_gram(h, Xs, Xs) - Kfs.transpose() * Cinv * Kfs).diagonal();
  out.lml = dense_gaussian_logpdf(r, C);
  return out;
}

/// Sparse GP via explicit Qff, Lambda and n x n solves.
inline DenseResult dense_sparse(const GpHypers& h, const Matrix& X, const Vector& y, const Matrix& U,
                                SparseVariant variant, const Matrix& Xs) {
  const Eigen::Index n = X.rows();
  const Matrix Kuu_inv = oracle_gram(h, U, U).fullPivLu().inverse();
  const Matrix Kfu = oracle_gram(h, X, U);
  const Matrix Ksu = oracle_gram(h, Xs, U);
  const Matrix Qff = Kfu * Kuu_inv * Kfu.transpose();
  const Matrix Qsf = Ksu * Kuu_inv * Kfu.transpose();
  const Matrix Qss = Ksu * Kuu_inv * Ksu.transpose();
  Vector lambda = Vector::Constant(n, h.noise_variance);
  if (variant == SparseVariant::FIC)
    lambda += (oracle_gram(h, X, X) - Qff).diagonal().cwiseMax(0.0);
  const Matrix C = Qff + Matrix(lambda.asDiagonal());
  const Matrix Cinv = C.fullPivLu().inverse();
  const Vector r = y.array() - h.mean;
  DenseResult out;
  out.mean = (Qsf * Cinv * r).array() + h.mean;
  const Matrix prior = variant == SparseVariant::SoR ? Qss : oracle_gram(h, Xs, Xs);
  out.variance = (prior - Qsf * Cinv * Qsf.transpose()).diagonal();
  out.lml = dense_gaussian_logpdf(r, C);
  return out;
}

/// log N(y | m, noise*I + Qff) - tr(Kff - Qff) / (2 noise).
inline double dense_elbo(const GpHypers& h, const Matrix& X, const Vector& y, const Matrix& U) {
  const Eigen::Index n = X.rows();
  const Matrix Kfu = oracle_gram(h, X, U);
  const Matrix Qff = Kfu * oracle_gram(h, U, U).fullPivLu().inverse() * Kfu.transpose();
  const Vector r = y.array() - h.mean;
  const double gap = (oracle_gram(h, X, X) - Qff).trace();
  return dense_gaussian_logpdf(r, Qff + h.noise_variance * Matrix::Identity(n, n)) -
         gap / (2.0 * h.noise_variance);
}

inline GpHypers random_hypers(std::mt19937_64& rng, Eigen::Index d, KernelFamily family,
                              double noise) {
  std::uniform_real_distribution<double> amp(0.5, 2.0), ell(0.3, 1.2), mean(-1.0, 1.0);
  Vector ls(d);
  for (Eigen::Index i = 0; i < d; ++i) ls[i] = ell(rng);
  return GpHypers{KernelSpec(family, amp(rng), ls), noise, mean(rng)};
}

}  // namespace s3bo::testing
