#pragma once

#include "s3bo/types.hpp"

namespace s3bo {

struct Prediction {
  Vector mean;
  Vector variance;
};

struct PointPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Read-only posterior over the embedded search space.
class Surrogate {
 public:
  virtual ~Surrogate() = default;

  [[nodiscard]] virtual Eigen::Index dim() const = 0;
  /// Posterior mean and variance per query row.
  [[nodiscard]] virtual Prediction predict(const Matrix& queries) const = 0;
  [[nodiscard]] virtual PointPrediction predict_point(const Vector& query) const = 0;
};

}  // namespace s3bo
