#pragma once

#include "s3bo/types.hpp"

namespace s3bo {

/// Observed embedded inputs (one per row) with scalar outputs and the running
/// incumbent, which is the minimum or maximum of the outputs per run mode.
class Dataset {
 public:
  explicit Dataset(Eigen::Index dim, RunMode mode = RunMode::Minimize);
  Dataset(Matrix inputs, Vector outputs, RunMode mode = RunMode::Minimize);

  void append(const Vector& z, double y);

  [[nodiscard]] Eigen::Index size() const { return outputs_.size(); }
  [[nodiscard]] bool empty() const { return outputs_.size() == 0; }
  [[nodiscard]] Eigen::Index dim() const { return inputs_.cols(); }
  [[nodiscard]] RunMode mode() const { return mode_; }
  [[nodiscard]] const Matrix& inputs() const { return inputs_; }
  [[nodiscard]] const Vector& outputs() const { return outputs_; }

  /// Index of the incumbent; -1 when empty.
  [[nodiscard]] Eigen::Index best_index() const { return best_index_; }
  [[nodiscard]] double best_value() const;
  /// Whether `a` is strictly better than `b` under the run mode.
  [[nodiscard]] bool better(double a, double b) const;

 private:
  Matrix inputs_;
  Vector outputs_;
  RunMode mode_;
  Eigen::Index best_index_ = -1;
};

}  // namespace s3bo
