#include "s3bo/optimize.hpp"

#include "s3bo/errors.hpp"

#include <cmath>

namespace s3bo {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMaxStep = 2.0;
constexpr int kMaxBacktracks = 40;

Vector projected_gradient(const Vector& x, const Vector& g, const Vector& lo, const Vector& hi) {
  Vector pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) pg[i] = 0.0;
  }
  return pg;
}

}  // namespace

BoxMinimizeResult minimize_box(const Objective& f, const Vector& x0, const Vector& lower,
                               const Vector& upper, const BoxMinimizeOptions& options) {
  const Eigen::Index p = x0.size();
  if (lower.size() != p || upper.size() != p) throw InputError("minimize_box: bound size mismatch");

  BoxMinimizeResult result;
  result.x = x0.cwiseMax(lower).cwiseMin(upper);
  Vector g(p);
  result.value = f(result.x, &g);
  result.evaluations = 1;
  if (!std::isfinite(result.value) || !g.allFinite()) return result;

  Matrix H = Matrix::Identity(p, p);
  bool h_is_identity = true;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Vector pg = projected_gradient(result.x, g, lower, upper);
    if (pg.lpNorm<Eigen::Infinity>() < options.g_tolerance) break;

    Vector dir = -(H * pg);
    for (Eigen::Index i = 0; i < p; ++i) {
      if (pg[i] == 0.0) dir[i] = 0.0;
    }
    if (dir.dot(pg) >= 0.0) {
      H.setIdentity();
      h_is_identity = true;
      dir = -pg;
    }
    double t = 1.0;
    const double dmax = dir.lpNorm<Eigen::Infinity>();
    if (dmax > kMaxStep) t = kMaxStep / dmax;

    bool accepted = false;
    Vector xn;
    double fn = 0.0;
    for (int k = 0; k < kMaxBacktracks; ++k, t *= 0.5) {
      xn = (result.x + t * dir).cwiseMax(lower).cwiseMin(upper);
      if ((xn - result.x).lpNorm<Eigen::Infinity>() == 0.0) break;
      fn = f(xn, nullptr);
      ++result.evaluations;
      if (std::isfinite(fn) && fn <= result.value + kArmijo * g.dot(xn - result.x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (h_is_identity) break;
      H.setIdentity();
      h_is_identity = true;
      continue;
    }

    Vector gn(p);
    const double check = f(xn, &gn);
    ++result.evaluations;
    if (!std::isfinite(check) || !gn.allFinite()) break;

    const Vector s = xn - result.x;
    const Vector y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix I = Matrix::Identity(p, p);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
      h_is_identity = false;
    }
    const double decrease = result.value - fn;
    result.x = xn;
    result.value = fn;
    g = gn;
    if (decrease < options.f_tolerance * (1.0 + std::abs(fn))) break;
  }
  return result;
}

Objective with_central_differences(std::function<double(const Vector&)> f, double h) {
  return [f = std::move(f), h](const Vector& x, Vector* grad) {
    const double value = f(x);
    if (grad != nullptr) {
      grad->resize(x.size());
      Vector probe = x;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        (*grad)[i] = (up - down) / (2.0 * h);
      }
    }
    return value;
  };
}

}  // namespace s3bo
