#pragma once

#include "s3bo/gp_sparse.hpp"
#include "s3bo/scheduler.hpp"

#include <optional>

namespace s3bo {

struct FitterOptions {
  KernelFamily family = KernelFamily::Matern32;
  std::optional<double> init_amplitude;
  std::optional<double> init_lengthscale;
  int exact_below_n = 256;
  SparseVariant variant = SparseVariant::FIC;
  int num_inducing = 300;
  SparseObjective objective = SparseObjective::ELBO;
  int restarts = 5;
  /// Full multi-start every k-th training; in between only the warm start is refined.
  int full_train_every = 10;
  bool freeze_inducing = false;
  std::uint64_t seed = 0;
};

/// Surrogate factory for the campaign: exact GP below the switch size, a
/// sparse GP with Latin hypercube inducing inputs (resampled per training)
/// above it. ARD hyperparameters are warm-started across trainings.
class GpFitter final : public SurrogateFitter {
 public:
  GpFitter(Box box, FitterOptions options);

  void train(const Dataset& observed) override;
  std::unique_ptr<Surrogate> fit(const Dataset& data) override;
  [[nodiscard]] FitStats last_stats() const override { return stats_; }

  [[nodiscard]] const std::optional<GpHypers>& hypers() const { return hypers_; }
  [[nodiscard]] int trainings() const { return trainings_; }

 private:
  [[nodiscard]] GpHypers initial_guess(const Dataset& observed) const;
  [[nodiscard]] bool sparse_for(Eigen::Index n) const {
    return n >= static_cast<Eigen::Index>(options_.exact_below_n);
  }
  std::unique_ptr<Surrogate> fit_with(const Dataset& data, const GpHypers& hypers) const;

  Box box_;
  FitterOptions options_;
  std::optional<GpHypers> hypers_;
  Matrix inducing_;
  int trainings_ = 0;
  FitStats stats_{};
};

}  // namespace s3bo
