#pragma once

#include "s3bo/types.hpp"

#include <functional>

namespace s3bo {

/// Objective for box-constrained minimization. When `grad` is non-null the
/// callee fills it. Returning a non-finite value marks the point infeasible.
using Objective = std::function<double(const Vector& x, Vector* grad)>;

struct BoxMinimizeOptions {
  int max_iterations = 100;
  double f_tolerance = 1e-10;
  double g_tolerance = 1e-7;
};

struct BoxMinimizeResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Projected quasi-Newton (BFGS) descent with Armijo backtracking inside
/// [lower, upper]. Never returns a point worse than the (clamped) start.
BoxMinimizeResult minimize_box(const Objective& f, const Vector& x0, const Vector& lower,
                               const Vector& upper, const BoxMinimizeOptions& options = {});

/// Wraps a value-only function with central-difference gradients of step h.
Objective with_central_differences(std::function<double(const Vector&)> f, double h = 1e-5);

}  // namespace s3bo
