#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace s3bo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class RunMode { Minimize, Maximize };

/// Axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);
  static Box cube(Eigen::Index dim, double lo, double hi);

  [[nodiscard]] Eigen::Index dim() const { return lower.size(); }
  [[nodiscard]] Vector width() const { return upper - lower; }
  [[nodiscard]] Vector center() const { return 0.5 * (lower + upper); }
  [[nodiscard]] bool contains(const Vector& x) const;
  [[nodiscard]] Vector clamp(const Vector& x) const;
};

/// Deterministic seed derivation (splitmix64 mixing) for independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace s3bo
