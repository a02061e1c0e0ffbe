#include "test_support.hpp"

#include "s3bo/benchmarks.hpp"
#include "s3bo/errors.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <chrono>

using namespace s3bo;
using namespace s3bo::testing;

namespace {

// Oracle minimum from 1e4 Latin hypercube starts refined with L-BFGS-B.
const double kHartmannMin = -3.134494141222399;

Vector basis_vector(Eigen::Index D, Eigen::Index i, double v = 1.0) {
  Vector x = Vector::Zero(D);
  x[i] = v;
  return x;
}

}  // namespace

TEST_SUITE("benchmarks") {
  TEST_CASE("ZDT1 optimum at plus or minus the first axis") {
    const Benchmark b(BenchmarkName::Zdt1Mod, 10);
    CHECK(b.value(basis_vector(10, 0)) == 0.0);
    CHECK(b.value(basis_vector(10, 0, -1.0)) == 0.0);
    CHECK(b.value(Vector::Zero(10)) == 1.0);
  }

  TEST_CASE("sphere values") {
    const Benchmark b(BenchmarkName::Sphere, 100);
    CHECK(b.value(Vector::Zero(100)) == 0.0);
    CHECK(b.value(Vector::Ones(100)) == 10000.0);
  }

  TEST_CASE("ZDT2 at half the first axis") {
    const Benchmark b(BenchmarkName::Zdt2Mod, 6);
    CHECK(b.value(basis_vector(6, 0, 0.5)) == doctest::Approx(0.75).epsilon(1e-15));
  }

  TEST_CASE("ZDT g terms follow their own printed forms unless normalized") {
    Vector x = Vector::Zero(5);
    x.tail(4).setConstant(0.1);  // tail sum 0.4
    const double g1 = 1 + 9 * 0.1 * 0.1;
    const double g2 = 1 + 3.6 * 3.6;
    const double g3 = 1 + 9 * 0.16;
    CHECK(Benchmark(BenchmarkName::Zdt1Mod, 5).value(x) == doctest::Approx(g1));
    CHECK(Benchmark(BenchmarkName::Zdt2Mod, 5).value(x) == doctest::Approx(g2));
    CHECK(Benchmark(BenchmarkName::Zdt3Mod, 5).value(x) == doctest::Approx(g3));
    CHECK(Benchmark(BenchmarkName::Zdt2Mod, 5, std::nullopt, true).value(x) == doctest::Approx(g1));
    CHECK(Benchmark(BenchmarkName::Zdt3Mod, 5, std::nullopt, true).value(x) == doctest::Approx(g1));
  }

  TEST_CASE("Hartmann4 reaches the oracle minimum at the oracle point") {
    const Benchmark b(BenchmarkName::Hartmann4, 4);
    Vector x(4);
    x << 0.18739527, 0.19415153, 0.55791778, 0.26477962;
    CHECK(std::abs(b.value(x) - kHartmannMin) < 1e-6);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 2000; ++t)
      CHECK(b.value(uniform_matrix(4, 1, rng)) >= kHartmannMin - 1e-9);
  }

  TEST_CASE("effective directions") {
    const Matrix z = Benchmark(BenchmarkName::Zdt1Mod, 30).effective_directions();
    CHECK(z.rows() == 2);
    CHECK(std::abs(z.row(0).dot(z.row(1))) < 1e-15);
    CHECK(z.row(1).norm() == doctest::Approx(1.0));
    const Matrix s = Benchmark(BenchmarkName::Sphere, 16).effective_directions();
    CHECK(s.rows() == 1);
    CHECK((s.array() == 0.25).all());
    const Matrix w = Benchmark::random_weights(3, 12, 4);
    CHECK(Benchmark(BenchmarkName::SphereGeneral, 12, std::nullopt, false, w).effective_directions() == w);
    CHECK_THROWS_AS(Benchmark(BenchmarkName::Hartmann4, 4).effective_directions(), InputError);
  }

  TEST_CASE("perturbations orthogonal to the effective subspace leave f unchanged") {
    const Eigen::Index D = 25;
    std::vector<Benchmark> benches;
    for (BenchmarkName n : {BenchmarkName::Zdt1Mod, BenchmarkName::Zdt2Mod, BenchmarkName::Zdt3Mod,
                            BenchmarkName::Sphere})
      benches.emplace_back(n, D);
    benches.emplace_back(BenchmarkName::SphereGeneral, D, std::nullopt, false,
                         Benchmark::random_weights(3, D, 8));
    std::mt19937_64 rng(2);
    for (const Benchmark& b : benches) {
      const Matrix T = b.effective_directions().transpose();
      const Eigen::HouseholderQR<Matrix> qr(T);
      const Matrix Q = qr.householderQ() * Matrix::Identity(D, T.cols());
      for (int t = 0; t < 100; ++t) {
        const Vector x = uniform_matrix(D, 1, rng, -0.2, 0.2);
        Vector p = uniform_matrix(D, 1, rng, -0.2, 0.2);
        p -= Q * (Q.transpose() * p);
        CHECK(std::abs(b.value(x + p) - b.value(x)) <= 1e-9);
      }
    }
  }

  TEST_CASE("sphere variants are nonnegative") {
    std::mt19937_64 rng(3);
    const Benchmark s(BenchmarkName::Sphere, 8),
        g(BenchmarkName::SphereGeneral, 8, std::nullopt, false, Benchmark::random_weights(2, 8, 1));
    for (int t = 0; t < 1000; ++t) {
      const Vector x = uniform_matrix(8, 1, rng);
      CHECK(s.value(x) >= 0.0);
      CHECK(g.value(x) >= 0.0);
    }
  }

  TEST_CASE("delays average the midpoint of their range") {
    const Benchmark b(BenchmarkName::Sphere, 2, DelayRange{0.010, 0.050});
    std::mt19937_64 rng(4);
    double sum = 0.0;
    for (int t = 0; t < 1000; ++t) sum += b.sample_delay(rng);
    CHECK(sum / 1000 >= 0.028);
    CHECK(sum / 1000 <= 0.032);
    // The sleep itself: 10 calls must take at least 10 x the lower bound.
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < 10; ++t) (void)b.evaluate(Vector::Zero(2), rng);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= 0.1);
  }

  TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(Benchmark(BenchmarkName::Sphere, 3).value(Vector::Zero(4)), InputError);
    CHECK_THROWS_AS(Benchmark(BenchmarkName::Hartmann4, 5), InputError);
    CHECK_THROWS_AS(Benchmark(BenchmarkName::Sphere, 3, DelayRange{0.2, 0.1}), InputError);
    CHECK_THROWS_AS(parse_benchmark_name("rosenbrock"), InputError);
    CHECK(Benchmark(BenchmarkName::Zdt1Mod, 4).default_bounds().lower == Vector::Constant(4, -1.0));
    CHECK(Benchmark(BenchmarkName::Hartmann4, 4).default_bounds().upper == Vector::Ones(4));
  }
}
