#pragma once

#include "s3bo/types.hpp"

#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace s3bo {

enum class BenchmarkName { Zdt1Mod, Zdt2Mod, Zdt3Mod, Sphere, SphereGeneral, Hartmann4 };

BenchmarkName parse_benchmark_name(std::string_view name);
std::string to_string(BenchmarkName name);

/// Simulated evaluation cost, uniform in [lower_s, upper_s] seconds.
struct DelayRange {
  double lower_s = 0.0;
  double upper_s = 0.0;
};

/// Closed-form test objectives (all minimized).
///
/// The modified ZDT functions keep their printed g terms:
///   ZDT1: g = 1 + 9 (sum_{i>=2} x_i / (D-1))^2
///   ZDT2: g = 1 + (9 sum_{i>=2} x_i)^2
///   ZDT3: g = 1 + 9 (sum_{i>=2} x_i)^2
/// With normalize_g all three use the ZDT1 form.
class Benchmark {
 public:
  Benchmark(BenchmarkName name, Eigen::Index dim, std::optional<DelayRange> delay = std::nullopt,
            bool normalize_g = false, Matrix weights = Matrix());

  /// Standard-normal effective directions for SphereGeneral, one per row.
  static Matrix random_weights(Eigen::Index effective_dim, Eigen::Index dim, std::uint64_t seed);

  [[nodiscard]] BenchmarkName name() const { return name_; }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] const std::optional<DelayRange>& delay() const { return delay_; }
  /// ZDT: [-1,1]^D, Sphere and SphereGeneral: [0,1]^D, Hartmann4: [0,1]^4.
  [[nodiscard]] Box default_bounds() const;

  /// Objective value without any simulated delay.
  [[nodiscard]] double value(const Vector& x) const;
  /// Sleeps for a sampled delay (when configured) and returns value(x).
  double evaluate(const Vector& x, std::mt19937_64& rng) const;
  [[nodiscard]] double sample_delay(std::mt19937_64& rng) const;

  /// Declared effective directions, one per row. ZDT: e1 and the normalized
  /// (0,1,...,1); Sphere: (1,...,1)/sqrt(D); SphereGeneral: the weights.
  /// Throws InputError for Hartmann4.
  [[nodiscard]] Matrix effective_directions() const;

 private:
  [[nodiscard]] double zdt_g(const Vector& x) const;

  BenchmarkName name_;
  Eigen::Index dim_;
  std::optional<DelayRange> delay_;
  bool normalize_g_;
  Matrix weights_;
};

}  // namespace s3bo
