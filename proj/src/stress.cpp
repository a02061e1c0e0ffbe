#include "s3bo/stress.hpp"

#include "s3bo/errors.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <random>

namespace s3bo {

namespace {

constexpr Eigen::Index kDim = 3;

void sphere_sample(Eigen::Index n, std::uint64_t seed, Matrix& X, Vector& y) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  X.resize(n, kDim);
  for (Eigen::Index j = 0; j < kDim; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = u(rng);
  y = X.rowwise().sum().array().square().matrix();
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

std::vector<StressRow> stress_gp(const StressOptions& options) {
  if (options.n_list.empty() || options.m_list.empty()) throw InputError("stress: empty grid");
  if (options.repeats < 1) throw InputError("stress: repeats must be >= 1");
  const Box box(Vector::Constant(kDim, -1.0), Vector::Constant(kDim, 1.0));

  Matrix Xtest;
  Vector ytest;
  sphere_sample(options.test_points, derive_seed(options.seed, 0x7e57), Xtest, ytest);

  std::vector<StressRow> rows;
  for (Eigen::Index n : options.n_list) {
    if (n < 1) throw InputError("stress: n must be >= 1");
    Matrix X;
    Vector y;
    sphere_sample(n, derive_seed(options.seed, static_cast<std::uint64_t>(n)), X, y);

    const Eigen::Index ns = std::min(n, options.train_subsample);
    const Dataset sub(X.topRows(ns), y.head(ns));
    const GpHypers init{KernelSpec(options.family, std::max(sample_std(sub.outputs()), 1e-3),
                                   Vector::Constant(kDim, 0.5)),
                        1e-6, sample_mean(sub.outputs())};
    TrainOptions topt;
    topt.seed = derive_seed(options.seed, 0x68797065);
    const GpHypers hypers =
        train_hypers_exact(sub, init, HyperBounds::from_data(sub.outputs(), 2.0), topt).hypers;

    for (Eigen::Index m : options.m_list) {
      const Matrix inducing = sample_inducing(
          box, m, n, derive_seed(options.seed, static_cast<std::uint64_t>(n * 7919 + m)));
      std::vector<double> fit_times, predict_times;
      Prediction pred;
      for (int r = 0; r < options.repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        const SparseGp gp = SparseGp::fit(X, y, hypers, inducing, options.variant, {false});
        fit_times.push_back(ms_since(t0));
        t0 = std::chrono::steady_clock::now();
        pred = gp.predict(Xtest);
        predict_times.push_back(ms_since(t0));
      }
      const double rmse = std::sqrt((pred.mean - ytest).squaredNorm() / static_cast<double>(ytest.size()));
      rows.push_back({n, inducing.rows(), median(fit_times), median(predict_times), rmse});
    }
  }
  return rows;
}

void write_stress_csv(std::ostream& out, const std::vector<StressRow>& rows) {
  out.precision(10);
  out << "n,m,fit_ms,predict_ms,rmse\n";
  for (const StressRow& r : rows)
    out << r.n << ',' << r.m << ',' << r.fit_ms << ',' << r.predict_ms << ',' << r.rmse << '\n';
}

}  // namespace s3bo
