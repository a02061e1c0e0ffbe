#pragma once

#include "s3bo/surrogate.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace s3bo {

enum class AcquisitionKind { PI, EI, UCB, PosteriorVariance };

AcquisitionKind parse_acquisition_kind(std::string_view name);
std::string to_string(AcquisitionKind kind);

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::EI;
  double delta = 0.1;  ///< UCB confidence parameter, in (0, 1)
  RunMode mode = RunMode::Minimize;

  void validate() const;
};

/// (mu - f_best) / sigma when maximizing and (f_best - mu) / sigma when
/// minimizing, so that larger always means more promising. sigma must be > 0.
double normalized_improvement(double mu, double sigma, double f_best, RunMode mode);

/// kappa = sqrt(2 log(n^(d/2+2) pi^2 / (3 delta))) with d the search
/// dimension.
double ucb_kappa(Eigen::Index n, Eigen::Index d, double delta);

/// PI = Phi(gamma), EI = sigma (gamma Phi(gamma) + phi(gamma)),
/// UCB = mu + kappa sigma, PosteriorVariance = sigma^2, all in the
/// "larger is better" orientation of the run mode. PI and EI are 0 at sigma = 0.
double acquisition_eval(const AcquisitionSpec& spec, double mu, double sigma, double f_best,
                        Eigen::Index n, Eigen::Index d);

struct AcquisitionOptimum {
  Vector z;
  double value = 0.0;
};

/// Multi-start bounded coordinate pattern search: `budget` Latin hypercube
/// seeds, each refined until the step drops below 1e-4 of the box width or
/// 100 sweeps. Ties keep the lowest seed index.
AcquisitionOptimum maximize_in_box(const std::function<double(const Vector&)>& score, const Box& bounds,
                                   int budget, std::uint64_t seed);

/// argmax of the acquisition over `bounds`; n is the number of observations
/// behind the model (used by UCB).
AcquisitionOptimum maximize_acquisition(const Surrogate& model, const AcquisitionSpec& spec,
                                        const Box& bounds, double f_best, Eigen::Index n, int budget,
                                        std::uint64_t seed);

}  // namespace s3bo
