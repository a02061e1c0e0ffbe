#include "s3bo/acquisition.hpp"

#include "s3bo/errors.hpp"
#include "s3bo/lhs.hpp"

#include <cmath>
#include <numbers>

namespace s3bo {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kInitialStep = 0.125;
constexpr double kMinStep = 1e-4;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

AcquisitionKind parse_acquisition_kind(std::string_view name) {
  if (name == "pi") return AcquisitionKind::PI;
  if (name == "ei") return AcquisitionKind::EI;
  if (name == "ucb") return AcquisitionKind::UCB;
  if (name == "variance") return AcquisitionKind::PosteriorVariance;
  throw InputError("unknown acquisition '" + std::string(name) + "'");
}

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::PI: return "pi";
    case AcquisitionKind::EI: return "ei";
    case AcquisitionKind::UCB: return "ucb";
    case AcquisitionKind::PosteriorVariance: return "variance";
  }
  return "unknown";
}

void AcquisitionSpec::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("acquisition delta must lie in (0, 1)");
}

double normalized_improvement(double mu, double sigma, double f_best, RunMode mode) {
  if (!(sigma > 0.0)) throw InputError("normalized_improvement: sigma must be positive");
  const double diff = mode == RunMode::Maximize ? mu - f_best : f_best - mu;
  return diff / sigma;
}

double ucb_kappa(Eigen::Index n, Eigen::Index d, double delta) {
  if (n < 1 || d < 1) throw InputError("ucb_kappa: n and d must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("ucb_kappa: delta must lie in (0, 1)");
  const double exponent = static_cast<double>(d) / 2.0 + 2.0;
  const double gamma_n = 2.0 * (exponent * std::log(static_cast<double>(n)) +
                                std::log(std::numbers::pi * std::numbers::pi / (3.0 * delta)));
  return std::sqrt(gamma_n);
}

double acquisition_eval(const AcquisitionSpec& spec, double mu, double sigma, double f_best,
                        Eigen::Index n, Eigen::Index d) {
  if (std::isnan(mu) || std::isnan(sigma) || std::isnan(f_best)) {
    throw InputError("acquisition_eval: NaN input");
  }
  if (sigma < 0.0) throw InputError("acquisition_eval: negative sigma");
  switch (spec.kind) {
    case AcquisitionKind::PosteriorVariance: return sigma * sigma;
    case AcquisitionKind::UCB: {
      const double oriented = spec.mode == RunMode::Maximize ? mu : -mu;
      return oriented + ucb_kappa(n, d, spec.delta) * sigma;
    }
    case AcquisitionKind::PI: {
      if (sigma == 0.0) return 0.0;
      return normal_cdf(normalized_improvement(mu, sigma, f_best, spec.mode));
    }
    case AcquisitionKind::EI: {
      if (sigma == 0.0) return 0.0;
      const double g = normalized_improvement(mu, sigma, f_best, spec.mode);
      return std::max(0.0, sigma * (g * normal_cdf(g) + normal_pdf(g)));
    }
  }
  return 0.0;
}

AcquisitionOptimum maximize_in_box(const std::function<double(const Vector&)>& score, const Box& bounds,
                                   int budget, std::uint64_t seed) {
  if (budget < 1) throw InputError("maximize_acquisition: budget must be >= 1");
  const Matrix seeds = latin_hypercube(bounds, budget, seed);
  const Vector width = bounds.width();
  const Eigen::Index d = bounds.dim();

  AcquisitionOptimum best;
  bool have_best = false;
  for (Eigen::Index s = 0; s < seeds.rows(); ++s) {
    Vector z = seeds.row(s).transpose();
    double value = score(z);
    double step = kInitialStep;
    for (int sweep = 0; sweep < kMaxSweeps && step >= kMinStep; ++sweep) {
      bool moved = false;
      for (Eigen::Index j = 0; j < d; ++j) {
        for (const double sign : {1.0, -1.0}) {
          const double original = z[j];
          const double trial = std::clamp(original + sign * step * width[j], bounds.lower[j], bounds.upper[j]);
          if (trial == original) continue;
          z[j] = trial;
          const double v = score(z);
          if (v > value) {
            value = v;
            moved = true;
            break;
          }
          z[j] = original;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (!have_best || value > best.value) {
      best.z = z;
      best.value = value;
      have_best = true;
    }
  }
  return best;
}

AcquisitionOptimum maximize_acquisition(const Surrogate& model, const AcquisitionSpec& spec,
                                        const Box& bounds, double f_best, Eigen::Index n, int budget,
                                        std::uint64_t seed) {
  spec.validate();
  if (model.dim() != bounds.dim()) throw InputError("maximize_acquisition: bounds/model dimension mismatch");
  const Eigen::Index d = bounds.dim();
  const auto score = [&](const Vector& z) {
    const PointPrediction p = model.predict_point(z);
    return acquisition_eval(spec, p.mean, std::sqrt(p.variance), f_best, std::max<Eigen::Index>(n, 1), d);
  };
  return maximize_in_box(score, bounds, budget, seed);
}

}  // namespace s3bo
