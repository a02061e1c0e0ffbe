#include "s3bo/lhs.hpp"

#include "s3bo/errors.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace s3bo {

Matrix latin_hypercube(const Box& box, Eigen::Index count, std::uint64_t seed) {
  if (count < 1) throw InputError("latin_hypercube: count must be >= 1");
  const Eigen::Index dim = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Index> strata(static_cast<std::size_t>(count));
  Matrix points(count, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    std::iota(strata.begin(), strata.end(), Eigen::Index{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    const double lo = box.lower[j];
    const double width = box.upper[j] - lo;
    for (Eigen::Index i = 0; i < count; ++i) {
      const double u = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + unit(rng)) /
                       static_cast<double>(count);
      points(i, j) = std::min(lo + u * width, box.upper[j]);
    }
  }
  return points;
}

}  // namespace s3bo
