#include "s3bo/types.hpp"

#include "s3bo/errors.hpp"

namespace s3bo {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InputError("box bounds must be nonempty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
      throw InputError("box bounds must be finite with lower < upper");
    }
  }
}

Box Box::cube(Eigen::Index dim, double lo, double hi) {
  return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool Box::contains(const Vector& x) const {
  if (x.size() != dim()) return false;
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Vector Box::clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace s3bo
