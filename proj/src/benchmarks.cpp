#include "s3bo/benchmarks.hpp"

#include "s3bo/errors.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

namespace s3bo {

namespace {

constexpr double kHartmannAlpha[4] = {1.0, 1.2, 3.0, 3.2};
constexpr double kHartmannA[4][4] = {
    {10.0, 3.0, 17.0, 3.5}, {0.05, 10.0, 17.0, 0.1}, {3.0, 3.5, 1.7, 10.0}, {17.0, 8.0, 0.05, 10.0}};
constexpr double kHartmannP[4][4] = {{0.1312, 0.1696, 0.5569, 0.0124},
                                     {0.2329, 0.4135, 0.8307, 0.3736},
                                     {0.2348, 0.1451, 0.3522, 0.2883},
                                     {0.4047, 0.8828, 0.8732, 0.5743}};

double hartmann4(const Vector& x) {
  double outer = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double diff = x[j] - kHartmannP[i][j];
      inner += kHartmannA[i][j] * diff * diff;
    }
    outer += kHartmannAlpha[i] * std::exp(-inner);
  }
  return (1.1 - outer) / 0.839;
}

}  // namespace

BenchmarkName parse_benchmark_name(std::string_view name) {
  if (name == "zdt1") return BenchmarkName::Zdt1Mod;
  if (name == "zdt2") return BenchmarkName::Zdt2Mod;
  if (name == "zdt3") return BenchmarkName::Zdt3Mod;
  if (name == "sphere") return BenchmarkName::Sphere;
  if (name == "sphere_general") return BenchmarkName::SphereGeneral;
  if (name == "hartmann4") return BenchmarkName::Hartmann4;
  throw InputError("unknown benchmark '" + std::string(name) + "'");
}

std::string to_string(BenchmarkName name) {
  switch (name) {
    case BenchmarkName::Zdt1Mod: return "zdt1";
    case BenchmarkName::Zdt2Mod: return "zdt2";
    case BenchmarkName::Zdt3Mod: return "zdt3";
    case BenchmarkName::Sphere: return "sphere";
    case BenchmarkName::SphereGeneral: return "sphere_general";
    case BenchmarkName::Hartmann4: return "hartmann4";
  }
  return "unknown";
}

Benchmark::Benchmark(BenchmarkName name, Eigen::Index dim, std::optional<DelayRange> delay,
                     bool normalize_g, Matrix weights)
    : name_(name), dim_(dim), delay_(delay), normalize_g_(normalize_g), weights_(std::move(weights)) {
  switch (name_) {
    case BenchmarkName::Hartmann4:
      if (dim_ != 4) throw InputError("hartmann4 is 4-dimensional");
      break;
    case BenchmarkName::Zdt1Mod:
    case BenchmarkName::Zdt2Mod:
    case BenchmarkName::Zdt3Mod:
      if (dim_ < 2) throw InputError("ZDT benchmarks need D >= 2");
      break;
    case BenchmarkName::SphereGeneral:
      if (weights_.rows() < 1 || weights_.cols() != dim_) {
        throw InputError("sphere_general needs a d_e x D weight matrix");
      }
      break;
    case BenchmarkName::Sphere:
      if (dim_ < 1) throw InputError("sphere needs D >= 1");
      break;
  }
  if (delay_ && !(delay_->lower_s >= 0.0 && delay_->lower_s <= delay_->upper_s)) {
    throw InputError("delay range must satisfy 0 <= lower <= upper");
  }
}

Matrix Benchmark::random_weights(Eigen::Index effective_dim, Eigen::Index dim, std::uint64_t seed) {
  if (effective_dim < 1 || dim < 1) throw InputError("random_weights: dimensions must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix W(effective_dim, dim);
  for (Eigen::Index i = 0; i < effective_dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) W(i, j) = normal(rng);
  }
  return W;
}

Box Benchmark::default_bounds() const {
  switch (name_) {
    case BenchmarkName::Zdt1Mod:
    case BenchmarkName::Zdt2Mod:
    case BenchmarkName::Zdt3Mod: return Box::cube(dim_, -1.0, 1.0);
    default: return Box::cube(dim_, 0.0, 1.0);
  }
}

double Benchmark::zdt_g(const Vector& x) const {
  const double tail = x.tail(dim_ - 1).sum();
  if (normalize_g_ || name_ == BenchmarkName::Zdt1Mod) {
    const double s = tail / static_cast<double>(dim_ - 1);
    return 1.0 + 9.0 * s * s;
  }
  if (name_ == BenchmarkName::Zdt2Mod) return 1.0 + (9.0 * tail) * (9.0 * tail);
  return 1.0 + 9.0 * tail * tail;
}

double Benchmark::value(const Vector& x) const {
  if (x.size() != dim_) throw InputError("benchmark: input has wrong length");
  switch (name_) {
    case BenchmarkName::Zdt1Mod: {
      const double g = zdt_g(x);
      return g * (1.0 - std::sqrt(x[0] * x[0] / g));
    }
    case BenchmarkName::Zdt2Mod: {
      const double g = zdt_g(x);
      const double ratio = x[0] / g;
      return g * (1.0 - ratio * ratio);
    }
    case BenchmarkName::Zdt3Mod: {
      const double g = zdt_g(x);
      const double x1sq = x[0] * x[0];
      return g * (1.0 - std::sqrt(x1sq / g) - x1sq / g * std::sin(10.0 * std::numbers::pi * x1sq));
    }
    case BenchmarkName::Sphere: {
      const double s = x.sum();
      return s * s;
    }
    case BenchmarkName::SphereGeneral: {
      double prod = 1.0;
      for (Eigen::Index j = 0; j < weights_.rows(); ++j) {
        const double s = weights_.row(j).dot(x);
        prod *= s * s;
      }
      return prod;
    }
    case BenchmarkName::Hartmann4: return hartmann4(x);
  }
  return 0.0;
}

double Benchmark::sample_delay(std::mt19937_64& rng) const {
  if (!delay_) return 0.0;
  std::uniform_real_distribution<double> dist(delay_->lower_s, delay_->upper_s);
  return delay_->lower_s == delay_->upper_s ? delay_->lower_s : dist(rng);
}

double Benchmark::evaluate(const Vector& x, std::mt19937_64& rng) const {
  const double y = value(x);
  if (delay_) {
    std::this_thread::sleep_for(std::chrono::duration<double>(sample_delay(rng)));
  }
  return y;
}

Matrix Benchmark::effective_directions() const {
  switch (name_) {
    case BenchmarkName::Zdt1Mod:
    case BenchmarkName::Zdt2Mod:
    case BenchmarkName::Zdt3Mod: {
      Matrix dirs = Matrix::Zero(2, dim_);
      dirs(0, 0) = 1.0;
      dirs.row(1).tail(dim_ - 1).setConstant(1.0 / std::sqrt(static_cast<double>(dim_ - 1)));
      return dirs;
    }
    case BenchmarkName::Sphere:
      return Matrix::Constant(1, dim_, 1.0 / std::sqrt(static_cast<double>(dim_)));
    case BenchmarkName::SphereGeneral: return weights_;
    case BenchmarkName::Hartmann4:
      throw InputError("hartmann4 declares no low effective dimension");
  }
  return Matrix();
}

}  // namespace s3bo
