#include "s3bo/dataset.hpp"

#include "s3bo/errors.hpp"

#include <cmath>

namespace s3bo {

Dataset::Dataset(Eigen::Index dim, RunMode mode) : inputs_(0, dim), outputs_(0), mode_(mode) {
  if (dim < 1) throw InputError("dataset dimension must be >= 1");
}

Dataset::Dataset(Matrix inputs, Vector outputs, RunMode mode)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), mode_(mode) {
  if (inputs_.rows() != outputs_.size()) throw InputError("dataset: row count mismatch");
  if (inputs_.cols() < 1) throw InputError("dataset dimension must be >= 1");
  if (!inputs_.allFinite() || !outputs_.allFinite()) throw InputError("dataset: non-finite data");
  for (Eigen::Index i = 0; i < outputs_.size(); ++i) {
    if (best_index_ < 0 || better(outputs_[i], outputs_[best_index_])) best_index_ = i;
  }
}

void Dataset::append(const Vector& z, double y) {
  if (z.size() != dim()) throw InputError("dataset append: dimension mismatch");
  if (!z.allFinite() || !std::isfinite(y)) throw InputError("dataset append: non-finite data");
  const Eigen::Index n = size();
  inputs_.conservativeResize(n + 1, Eigen::NoChange);
  inputs_.row(n) = z.transpose();
  outputs_.conservativeResize(n + 1);
  outputs_[n] = y;
  if (best_index_ < 0 || better(y, outputs_[best_index_])) best_index_ = n;
}

double Dataset::best_value() const {
  if (best_index_ < 0) throw InputError("dataset is empty");
  return outputs_[best_index_];
}

bool Dataset::better(double a, double b) const {
  return mode_ == RunMode::Minimize ? a < b : a > b;
}

}  // namespace s3bo
