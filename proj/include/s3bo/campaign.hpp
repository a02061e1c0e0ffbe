#pragma once

#include "s3bo/config.hpp"
#include "s3bo/scheduler.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace s3bo {

struct CampaignOptions {
  /// Continue from <out_dir>/checkpoint.json by replaying its results.
  bool resume = false;
  /// Write trace.jsonl, summary.txt and checkpoints under run_out_dir.
  bool write_files = true;
  /// Use the single-threaded reference loop instead of the worker pool.
  bool sequential = false;
};

struct CampaignSummary {
  double best_y = 0.0;
  Vector best_z;
  Vector best_x;
  int evaluations = 0;
  int failed = 0;
  int replayed = 0;
  double wall_s = 0.0;
  PoolOutcome outcome = PoolOutcome::Finished;
  std::string diagnostic;
  std::uint64_t config_hash = 0;
};

struct CampaignResult {
  std::vector<JobRecord> trace;
  CampaignSummary summary;
};

Benchmark make_benchmark(const RunConfig& config);
Embedding make_embedding(const RunConfig& config, const Benchmark& benchmark);

/// Full optimization loop: embedding, Latin hypercube initial design, then
/// asynchronous model-guided evaluation until the budget or wall clock runs out.
CampaignResult run_campaign(const RunConfig& config, const CampaignOptions& options = {});

void write_summary(std::ostream& out, const CampaignSummary& summary);

}  // namespace s3bo
