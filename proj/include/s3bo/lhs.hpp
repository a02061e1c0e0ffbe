#pragma once

#include "s3bo/types.hpp"

namespace s3bo {

/// Latin hypercube design of `count` points in `box`: along every coordinate
/// each of the `count` equal-width strata holds exactly one point.
Matrix latin_hypercube(const Box& box, Eigen::Index count, std::uint64_t seed);

}  // namespace s3bo
