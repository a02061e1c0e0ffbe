#pragma once

#include "s3bo/acquisition.hpp"
#include "s3bo/benchmarks.hpp"
#include "s3bo/embedding.hpp"
#include "s3bo/gp_sparse.hpp"

#include <optional>
#include <string>

namespace s3bo {

/// Everything a campaign needs. Loaded from flat `key = value` text; blank
/// lines and `#` comments are ignored, unknown keys raise ConfigError.
struct RunConfig {
  KernelFamily kernel_family = KernelFamily::Matern32;
  std::optional<double> kernel_amplitude;    // initial value; data-derived otherwise
  std::optional<double> kernel_lengthscale;  // initial value; a quarter of the box otherwise

  int gp_exact_below_n = 256;
  SparseVariant gp_variant = SparseVariant::FIC;
  int gp_num_inducing = 300;
  SparseObjective gp_objective = SparseObjective::ELBO;
  int gp_restarts = 5;
  int gp_full_train_every = 10;
  bool gp_freeze_inducing = false;

  AcquisitionKind acq_kind = AcquisitionKind::EI;
  double acq_delta = 0.1;
  int acq_budget = 20;

  int embed_dim_low = 0;  // 0 means "equal to bench.dim" (identity only)
  std::optional<std::uint64_t> embed_seed;
  EmbeddingKind embed_kind = EmbeddingKind::Gaussian;

  int sched_workers = 1;
  int sched_budget = 50;
  double sched_wallclock_s = 0.0;

  BenchmarkName bench_name = BenchmarkName::Sphere;
  int bench_dim = 10;
  double bench_delay_lb_s = 0.0;
  double bench_delay_ub_s = 0.0;
  bool bench_normalize_g = false;
  std::optional<double> bench_lb;
  std::optional<double> bench_ub;
  int bench_effective_dim = 1;
  std::uint64_t bench_weights_seed = 0;

  std::uint64_t run_seed = 0;
  RunMode run_mode = RunMode::Minimize;
  int run_initial_design = 0;  // 0 means max(2, d + 1)
  std::string run_out_dir = "s3bo_out";
  int run_checkpoint_every = 10;

  /// Applies one key; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Cross-key checks, run after all keys are set.
  void validate() const;

  [[nodiscard]] int low_dim() const;
  [[nodiscard]] int initial_design_size() const;
  [[nodiscard]] std::uint64_t embedding_seed() const;

  /// Sorted key=value dump of every setting.
  [[nodiscard]] std::string canonical() const;
  /// FNV-1a of canonical() without the keys that may change on resume
  /// (budget, wall clock, output directory, checkpoint interval).
  [[nodiscard]] std::uint64_t resume_hash() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace s3bo
