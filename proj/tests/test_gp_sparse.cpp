#include "test_support.hpp"

#include "s3bo/errors.hpp"
#include "s3bo/gp_sparse.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>

using namespace s3bo;
using namespace s3bo::testing;

namespace {

const SparseVariant kVariants[] = {SparseVariant::SoR, SparseVariant::DTC, SparseVariant::FIC};

void sphere3(Eigen::Index n, std::mt19937_64& rng, Matrix& X, Vector& y) {
  X = uniform_matrix(n, 3, rng, -1, 1);
  y = X.rowwise().sum().array().square().matrix();
}

double rmse(const Vector& a, const Vector& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace

TEST_SUITE("gp_sparse") {
  TEST_CASE("q_matrix reduces to K when the inducing set is the input set") {
    std::mt19937_64 rng(1);
    const GpHypers h = random_hypers(rng, 2, KernelFamily::Matern52, 0.0);
    const Matrix A = uniform_matrix(6, 2, rng);
    const Matrix Q = q_matrix(h.kernel, A, A, A);
    CHECK((Q - kernel_matrix(h.kernel, A)).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("q_matrix with one inducing point is k(a,u)^2 / k(u,u)") {
    const KernelSpec k(KernelFamily::SqExp, 1.5, 0.7);
    Matrix a(1, 1), u(1, 1);
    a << 0.2;
    u << 0.9;
    const double kau = kernel_eval(k, a.row(0).transpose(), u.row(0).transpose());
    CHECK(q_matrix(k, a, u, a)(0, 0) == doctest::Approx(kau * kau / 2.25).epsilon(1e-9));
  }

  TEST_CASE("q_matrix matches the dense oracle") {
    std::mt19937_64 rng(2);
    const GpHypers h = random_hypers(rng, 3, KernelFamily::Matern32, 0.0);
    const Matrix A = uniform_matrix(4, 3, rng), B = uniform_matrix(3, 3, rng),
                 U = uniform_matrix(2, 3, rng);
    const Matrix ref = oracle_gram(h, A, U) * oracle_gram(h, U, U).fullPivLu().inverse() *
                       oracle_gram(h, U, B);
    CHECK((q_matrix(h.kernel, A, U, B) - ref).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("FIC with inducing = training reproduces the exact GP") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      const GpHypers h = random_hypers(rng, 2, KernelFamily::Matern52, 1e-2);
      const Matrix X = uniform_matrix(15, 2, rng), Xs = uniform_matrix(10, 2, rng);
      const Vector y = uniform_matrix(15, 1, rng, -1, 1);
      const ExactGp ex = ExactGp::fit(X, y, h);
      const SparseGp sp = SparseGp::fit(X, y, h, X, SparseVariant::FIC);
      const Prediction pe = ex.predict(Xs), ps = sp.predict(Xs);
      CHECK((pe.mean - ps.mean).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((pe.variance - ps.variance).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(std::abs(ex.log_marginal_likelihood() - sp.log_marginal_likelihood()) < 1e-6);
    }
  }

  TEST_CASE("predictions and LML match the dense constructions") {
    std::mt19937_64 rng(4);
    struct Case {
      Eigen::Index n, m, d;
    };
    for (Case c : {Case{8, 4, 2}, Case{10, 3, 1}, Case{6, 3, 3}, Case{30, 10, 2}}) {
      for (SparseVariant v : kVariants) {
        const GpHypers h = random_hypers(rng, c.d, KernelFamily::Matern52, 0.05);
        const Matrix X = uniform_matrix(c.n, c.d, rng), U = uniform_matrix(c.m, c.d, rng),
                     Xs = uniform_matrix(7, c.d, rng);
        const Vector y = uniform_matrix(c.n, 1, rng, -1, 1);
        const SparseGp gp = SparseGp::fit(X, y, h, U, v);
        const DenseResult ref = dense_sparse(h, X, y, U, v, Xs);
        const Prediction p = gp.predict(Xs);
        for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
          CHECK(rel_diff(p.mean[i], ref.mean[i]) < 1e-8);
          CHECK(rel_diff(p.variance[i], ref.variance[i]) < 1e-8);
          const auto pp = gp.predict_point(Xs.row(i).transpose());
          CHECK(std::abs(pp.mean - p.mean[i]) < 1e-12);
          CHECK(std::abs(pp.variance - p.variance[i]) < 1e-12);
        }
        CHECK(rel_diff(gp.log_marginal_likelihood(), ref.lml) < 1e-8);
      }
    }
  }

  TEST_CASE("Woodbury solve equals the dense inverse") {
    std::mt19937_64 rng(5);
    for (SparseVariant v : kVariants) {
      const GpHypers h = random_hypers(rng, 2, KernelFamily::SqExp, 0.1);
      const Matrix X = uniform_matrix(12, 2, rng), U = uniform_matrix(4, 2, rng);
      const Vector y = uniform_matrix(12, 1, rng, -1, 1);
      const SparseGp gp = SparseGp::fit(X, y, h, U, v);
      const Vector r = y.array() - h.mean;
      // (Qff + Lambda)^{-1} r = Lambda^{-1} (r - Kfu w) by the Woodbury identity.
      const Vector smw = (r - oracle_gram(h, X, U) * gp.weights()).cwiseQuotient(gp.lambda());
      const Matrix Kfu = oracle_gram(h, X, U);
      const Matrix C = Kfu * oracle_gram(h, U, U).fullPivLu().inverse() * Kfu.transpose() +
                       Matrix(gp.lambda().asDiagonal());
      CHECK((smw - C.fullPivLu().inverse() * r).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }

  TEST_CASE("DTC variance dominates SoR variance") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
      const GpHypers h = random_hypers(rng, 2, KernelFamily::Matern32, 0.01);
      const Matrix X = uniform_matrix(6, 2, rng), U = uniform_matrix(3, 2, rng),
                   Xs = uniform_matrix(50, 2, rng, -1, 2);
      const Vector y = uniform_matrix(6, 1, rng);
      const Vector sor = SparseGp::fit(X, y, h, U, SparseVariant::SoR).predict(Xs).variance;
      const Vector dtc = SparseGp::fit(X, y, h, U, SparseVariant::DTC).predict(Xs).variance;
      CHECK((dtc.array() >= sor.array() - 1e-12).all());
    }
  }

  TEST_CASE("FIC recovers the prior far from everything") {
    std::mt19937_64 rng(7);
    const GpHypers h{KernelSpec(KernelFamily::SqExp, 1.2, 0.3), 1e-4, 0.4};
    const Matrix X = uniform_matrix(20, 2, rng), U = uniform_matrix(5, 2, rng);
    const SparseGp gp = SparseGp::fit(X, uniform_matrix(20, 1, rng), h, U, SparseVariant::FIC);
    const auto p = gp.predict_point(Vector::Constant(2, 40.0));
    CHECK(std::abs(p.variance - 1.44) < 1e-6);
    CHECK(std::abs(p.mean - 0.4) < 1e-6);
  }

  TEST_CASE("FIC Lambda is at least the noise and equals it on inducing inputs") {
    std::mt19937_64 rng(8);
    const GpHypers h = random_hypers(rng, 2, KernelFamily::Matern52, 0.02);
    Matrix X = uniform_matrix(10, 2, rng);
    const Matrix U = X.topRows(4);
    const SparseGp gp = SparseGp::fit(X, uniform_matrix(10, 1, rng), h, U, SparseVariant::FIC);
    CHECK((gp.lambda().array() >= 0.02).all());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(gp.lambda()[i] - 0.02) < 1e-8);
    for (SparseVariant v : {SparseVariant::SoR, SparseVariant::DTC}) {
      const SparseGp g2 = SparseGp::fit(X, uniform_matrix(10, 1, rng), h, U, v);
      CHECK((g2.lambda().array() == 0.02).all());
    }
  }

  TEST_CASE("ELBO equals the DTC likelihood when inducing = training") {
    std::mt19937_64 rng(9);
    const GpHypers h = random_hypers(rng, 2, KernelFamily::Matern32, 0.05);
    const Matrix X = uniform_matrix(10, 2, rng);
    const Vector y = uniform_matrix(10, 1, rng);
    const SparseGp gp = SparseGp::fit(X, y, h, X, SparseVariant::DTC);
    CHECK(std::abs(gp.elbo() - gp.log_marginal_likelihood()) < 1e-6);
  }

  TEST_CASE("ELBO lower-bounds the exact likelihood and matches the dense form") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
      const GpHypers h = random_hypers(rng, 2, KernelFamily::Matern52, 0.05);
      const Matrix X = uniform_matrix(10, 2, rng), U = uniform_matrix(3, 2, rng);
      const Vector y = uniform_matrix(10, 1, rng, -1, 1);
      const double elbo = SparseGp::fit(X, y, h, U, SparseVariant::FIC).elbo();
      CHECK(elbo < ExactGp::fit(X, y, h).log_marginal_likelihood());
      CHECK(rel_diff(elbo, dense_elbo(h, X, y, U)) < 1e-8);
    }
  }

  TEST_CASE("ELBO needs a positive noise variance") {
    const GpHypers h{KernelSpec(KernelFamily::SqExp, 1.0, 0.5), 0.0, 0.0};
    const Matrix X = Matrix::Identity(3, 2);
    const SparseGp gp = SparseGp::fit(X, Vector::Ones(3), h, X.topRows(2), SparseVariant::FIC);
    CHECK_THROWS_AS((void)gp.elbo(), InputError);
  }

  TEST_CASE("more inducing points predict the sphere better") {
    int pass = 0;
    for (int seed = 0; seed < 5; ++seed) {
      std::mt19937_64 rng(200 + seed);
      Matrix X, Xs;
      Vector y, ys;
      sphere3(200, rng, X, y);
      sphere3(100, rng, Xs, ys);
      const GpHypers h{KernelSpec(KernelFamily::SqExp, 3.0, 1.0), 1e-6, sample_mean(y)};
      const Box box(Vector::Constant(3, -1), Vector::Constant(3, 1));
      const auto fit = [&](Eigen::Index m) {
        const Matrix U = sample_inducing(box, m, 200, static_cast<std::uint64_t>(seed));
        return rmse(SparseGp::fit(X, y, h, U, SparseVariant::FIC).predict(Xs).mean, ys);
      };
      if (fit(50) < fit(5)) ++pass;
    }
    CHECK(pass >= 4);
  }

  TEST_CASE("inducing sampling is stratified, truncated and deterministic") {
    const Box unit(Vector::Zero(1), Vector::Ones(1));
    Matrix U = sample_inducing(unit, 4, 100, 42);
    std::vector<double> v(U.data(), U.data() + 4);
    std::sort(v.begin(), v.end());
    for (int i = 0; i < 4; ++i) {
      CHECK(v[static_cast<std::size_t>(i)] >= 0.25 * i);
      CHECK(v[static_cast<std::size_t>(i)] <= 0.25 * (i + 1));
    }
    CHECK(sample_inducing(unit, 10, 6, 1).rows() == 6);
    CHECK(sample_inducing(unit, 10, 6, 1) == sample_inducing(unit, 10, 6, 1));
  }

  TEST_CASE("ELBO training with inducing = training matches exact training") {
    std::mt19937_64 rng(11);
    const Matrix X = uniform_matrix(30, 2, rng);
    // Observation noise keeps the optimum away from the interpolating, singular regime.
    std::normal_distribution<double> noise(0.0, 0.1);
    Vector y = (3 * X.col(0)).array().sin().matrix() + X.col(1).cwiseAbs2();
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise(rng);
    const Dataset data(X, y);
    const HyperBounds b = HyperBounds::from_data(y, 1.0);
    const GpHypers init{KernelSpec(KernelFamily::Matern52, 1.0, Vector::Constant(2, 0.5)), 1e-2,
                        sample_mean(y)};
    TrainOptions opt;
    opt.seed = 3;
    const TrainResult ex = train_hypers_exact(data, init, b, opt);
    const TrainResult sp = train_sparse(data, init, b, X, SparseVariant::DTC, SparseObjective::ELBO, opt);
    CHECK(std::abs(ex.objective - sp.objective) < 1e-4 * std::max(1.0, std::abs(ex.objective)));
  }

  TEST_CASE("LML and ELBO training give comparable predictions") {
    std::mt19937_64 rng(12);
    Matrix X, Xs;
    Vector y, ys;
    sphere3(100, rng, X, y);
    sphere3(200, rng, Xs, ys);
    const Box box(Vector::Constant(3, -1), Vector::Constant(3, 1));
    const Matrix U = sample_inducing(box, 20, 100, 5);
    const Dataset data(X, y);
    const HyperBounds b = HyperBounds::from_data(y, 2.0);
    const GpHypers init{KernelSpec(KernelFamily::SqExp, 1.0, Vector::Constant(3, 1.0)), 1e-3,
                        sample_mean(y)};
    double err[2];
    int i = 0;
    for (SparseObjective o : {SparseObjective::LML, SparseObjective::ELBO}) {
      const TrainResult r = train_sparse(data, init, b, U, SparseVariant::FIC, o, TrainOptions{});
      CHECK(std::isfinite(r.objective));
      err[i++] = rmse(SparseGp::fit(data, r.hypers, U, SparseVariant::FIC).predict(Xs).mean, ys);
    }
    CHECK(err[0] <= 2 * err[1]);
    CHECK(err[1] <= 2 * err[0]);
  }

  TEST_CASE("a single sparse restart from its own optimum does not get worse") {
    std::mt19937_64 rng(13);
    Matrix X;
    Vector y;
    sphere3(60, rng, X, y);
    const Box box(Vector::Constant(3, -1), Vector::Constant(3, 1));
    const Matrix U = sample_inducing(box, 10, 60, 2);
    const Dataset data(X, y);
    const HyperBounds b = HyperBounds::from_data(y, 2.0);
    const GpHypers init{KernelSpec(KernelFamily::SqExp, 1.0, Vector::Constant(3, 1.0)), 1e-3,
                        sample_mean(y)};
    TrainOptions opt;
    opt.restarts = 2;
    const TrainResult first = train_sparse(data, init, b, U, SparseVariant::FIC, SparseObjective::ELBO, opt);
    opt.restarts = 1;
    const TrainResult again =
        train_sparse(data, first.hypers, b, U, SparseVariant::FIC, SparseObjective::ELBO, opt);
    CHECK(again.objective >= first.objective - 1e-9);
  }

  TEST_CASE("doubling n roughly doubles the fit time") {
    std::mt19937_64 rng(14);
    Matrix X;
    Vector y;
    sphere3(16000, rng, X, y);
    const GpHypers h{KernelSpec(KernelFamily::SqExp, 1.0, 1.0), 1e-4, 0.0};
    const Box box(Vector::Constant(3, -1), Vector::Constant(3, 1));
    const Matrix U = sample_inducing(box, 50, 16000, 1);
    auto median_ms = [&](Eigen::Index n) {
      std::vector<double> t;
      for (int k = 0; k < 5; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)SparseGp::fit(X.topRows(n), y.head(n), h, U, SparseVariant::FIC, {false});
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
      std::sort(t.begin(), t.end());
      return t[2];
    };
    const double ratio = median_ms(16000) / median_ms(8000);
    // Smoke check only: shared CI machines make timing assertions unreliable.
    WARN(ratio <= 3.0);
    MESSAGE("fit time ratio for 2n vs n: " << ratio);
  }
}
