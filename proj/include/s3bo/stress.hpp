#pragma once

#include "s3bo/gp_sparse.hpp"

#include <iosfwd>
#include <vector>

namespace s3bo {

/// Sparse-GP scaling run on the 3-D sphere (sum x)^2 over [-1, 1]^3.
struct StressOptions {
  std::vector<Eigen::Index> n_list{100, 1000, 10000, 100000};
  std::vector<Eigen::Index> m_list{10, 50, 100};
  std::uint64_t seed = 0;
  Eigen::Index test_points = 1000;
  /// Hyperparameters come from an exact GP trained on this many points.
  Eigen::Index train_subsample = 500;
  SparseVariant variant = SparseVariant::FIC;
  KernelFamily family = KernelFamily::SqExp;
  /// Timings are the median over this many repeated fits.
  int repeats = 5;
};

struct StressRow {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double fit_ms = 0.0;
  double predict_ms = 0.0;
  double rmse = 0.0;
};

std::vector<StressRow> stress_gp(const StressOptions& options);
void write_stress_csv(std::ostream& out, const std::vector<StressRow>& rows);

}  // namespace s3bo
