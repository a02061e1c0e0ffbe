#include "test_support.hpp"

#include "s3bo/embedding.hpp"
#include "s3bo/errors.hpp"

#include <doctest.h>

using namespace s3bo;
using namespace s3bo::testing;

namespace {

Embedding draw(Eigen::Index D, Eigen::Index d, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  return Embedding::draw(D, d, Vector::Constant(D, lo), Vector::Constant(D, hi), seed);
}

}  // namespace

TEST_SUITE("embedding") {
  TEST_CASE("1x1 draws are standard normal on average") {
    double sum = 0.0;
    const int n = 1'000'000;
    for (int s = 0; s < n; ++s) sum += draw(1, 1, static_cast<std::uint64_t>(s)).matrix()(0, 0);
    CHECK(std::abs(sum / n) <= 0.01);
  }

  TEST_CASE("draws are reproducible from the seed") {
    CHECK(draw(50, 3, 9).matrix() == draw(50, 3, 9).matrix());
    CHECK(draw(50, 3, 9).matrix() != draw(50, 3, 10).matrix());
  }

  TEST_CASE("shape and column variances") {
    const Embedding e = draw(100, 4, 1);
    CHECK(e.matrix().rows() == 100);
    CHECK(e.matrix().cols() == 4);
    const Matrix big = draw(10000, 4, 2).matrix();
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double mean = big.col(j).mean();
      const double var = (big.col(j).array() - mean).square().sum() / 9999.0;
      CHECK(var >= 0.9);
      CHECK(var <= 1.1);
    }
  }

  TEST_CASE("z = 0 maps to the box midpoint exactly") {
    Vector lo(3), hi(3);
    lo << -1.0, 0.0, 2.0;
    hi << 1.0, 1.0, 7.5;
    const Embedding e = Embedding::draw(3, 2, lo, hi, 4);
    CHECK(e.to_x(Vector::Zero(2)) == Vector(0.5 * (lo + hi)));
  }

  TEST_CASE("coordinates beyond sqrt(d) land on the upper face") {
    const Embedding e = draw(200, 2, 5, 0.0, 1.0);
    const Box Z = e.search_box();
    for (int k = 0; k < 4; ++k) {
      Vector z(2);
      z << (k & 1 ? 1 : -1) * Z.upper[0], (k & 2 ? 1 : -1) * Z.upper[1];
      const Vector w = e.scaled_image(z), x = e.to_x(z);
      for (Eigen::Index i = 0; i < 200; ++i) {
        if (w[i] > std::sqrt(2.0)) CHECK(x[i] == 1.0);
        if (w[i] < -std::sqrt(2.0)) CHECK(x[i] == 0.0);
        CHECK(x[i] >= 0.0);
        CHECK(x[i] <= 1.0);
      }
    }
  }

  TEST_CASE("embedding matches a hand-rolled multiply-then-affine oracle") {
    Vector lo(3), hi(3);
    lo << -1.0, 0.0, -5.0;
    hi << 1.0, 2.0, 5.0;
    const Embedding e = Embedding::draw(3, 2, lo, hi, 77);
    Vector z(2);
    z << 0.3, -0.8;
    const Matrix& A = e.matrix();
    const double s = std::sqrt(2.0);
    for (int i = 0; i < 3; ++i) {
      const double w = (A(i, 0) * z[0] + A(i, 1) * z[1]) / 2.0;
      double x = lo[i] + (w + s) / (2 * s) * (hi[i] - lo[i]);
      x = std::min(std::max(x, lo[i]), hi[i]);
      CHECK(std::abs(e.to_x(z)[i] - x) <= 1e-12);
    }
  }

  TEST_CASE("identity embedding maps the search box onto the problem box") {
    const Embedding e = Embedding::identity(Vector::Zero(4), Vector::Ones(4));
    const Box Z = e.search_box();
    CHECK((e.to_x(Z.lower).array() == 0.0).all());
    CHECK((e.to_x(Z.upper).array() == 1.0).all());
    CHECK((e.to_x(Vector::Zero(4)).array() == 0.5).all());
  }

  TEST_CASE("pre-clamp image is affine in z") {
    const Embedding e = draw(30, 3, 8);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
      const Vector z1 = uniform_matrix(3, 1, rng, -3, 3), z2 = uniform_matrix(3, 1, rng, -3, 3);
      const double a = uniform_matrix(1, 1, rng)(0, 0);
      const Vector lhs = e.embed_unclamped(a * z1 + (1 - a) * z2);
      const Vector rhs = a * e.embed_unclamped(z1) + (1 - a) * e.embed_unclamped(z2);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("bound probability at d = 1 and the clamped fraction") {
    const double p = mc_bound_probability(1, 1'000'000, 3, true);
    CHECK(std::abs(p - 0.906) <= 0.01);
    // Fraction of clamped coordinates of an actual 1-D embedding.
    const Embedding e = draw(2000, 1, 4);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    long clamped = 0, total = 0;
    for (int s = 0; s < 500; ++s) {
      Vector z(1);
      z << u(rng);
      const Vector w = e.scaled_image(z);
      clamped += (w.array().abs() > 1.0).count();
      total += w.size();
    }
    CHECK(std::abs(static_cast<double>(clamped) / static_cast<double>(total) - 0.094) <= 0.02);
  }

  TEST_CASE("unscaled probabilities collapse as d grows") {
    double prev = 1.0;
    for (Eigen::Index d : {10, 100, 1000}) {
      const double p = mc_bound_probability(d, 20000, 6, false);
      CHECK(p < prev);
      prev = p;
    }
    CHECK(prev < 0.06);
  }

  TEST_CASE("d = 1 coordinate moments") {
    const SampleMoments m = mc_coordinate_moments(1, 1'000'000, 7, true);
    CHECK(std::abs(m.mean) <= 0.01);
    CHECK(std::abs(m.variance - 1.0 / 3.0) <= 0.01);
  }

  TEST_CASE("witness solves the projected equation") {
    const Embedding e = draw(20, 2, 10);
    Matrix T = Matrix::Zero(20, 1);
    T(0, 0) = 1.0;
    CHECK(effective_subspace_witness(T, e, Vector::Zero(20)).norm() == 0.0);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
      const Vector x_top = uniform_matrix(20, 1, rng, -1, 1);
      const Vector z = effective_subspace_witness(T, e, x_top);
      CHECK(std::abs((e.matrix() * z)[0] - x_top[0]) <= 1e-8);
    }
  }

  TEST_CASE("witness rejects a basis orthogonal to the embedding") {
    const Embedding e = draw(5, 1, 11);
    Matrix T = Matrix::Zero(5, 1);
    const Vector a = e.matrix().col(0);
    T(0, 0) = a[1];
    T(1, 0) = -a[0];  // T^T a = 0
    CHECK_THROWS_AS(effective_subspace_witness(T, e, Vector::Ones(5)), NumericalError);
  }

  TEST_CASE("JL projection preserves pairwise distances in at least half the trials") {
    const Eigen::Index n = 50, D = 200;
    const double eps = 0.4;
    const auto d = static_cast<Eigen::Index>(
        std::ceil(9.0 * std::log(static_cast<double>(n)) / (eps * eps - eps * eps * eps)));
    int good = 0;
    for (int trial = 0; trial < 20; ++trial) {
      std::mt19937_64 rng(500 + trial);
      const Matrix X = uniform_matrix(n, D, rng, -1, 1);
      // d x D Gaussian matrix from the library generator.
      const Matrix A = Embedding::draw(d, D, Vector::Constant(d, -1), Vector::Constant(d, 1),
                                       static_cast<std::uint64_t>(trial))
                           .matrix();
      const Matrix Z = (X * A.transpose()) / std::sqrt(static_cast<double>(d));
      bool all = true;
      for (Eigen::Index i = 0; i < n && all; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
          const double orig = (X.row(i) - X.row(j)).squaredNorm();
          const double proj = (Z.row(i) - Z.row(j)).squaredNorm();
          if (proj < (1 - eps) * orig || proj > (1 + eps) * orig) {
            all = false;
            break;
          }
        }
      good += all;
    }
    CHECK(good >= 10);
  }

  TEST_CASE("invalid shapes are rejected") {
    CHECK_THROWS_AS(draw(3, 4, 1), InputError);
    CHECK_THROWS_AS(draw(3, 0, 1), InputError);
    CHECK_THROWS_AS(Embedding::draw(2, 1, Vector::Ones(2), Vector::Zero(2), 1), InputError);
  }
}
