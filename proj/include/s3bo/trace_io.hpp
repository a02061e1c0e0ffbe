#pragma once

#include "s3bo/scheduler.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace s3bo {

/// One parsed trace line. Timing fields (wall_ms, submit_ms, complete_ms,
/// refit_ms) are the only nondeterministic ones.
struct TraceEntry {
  int eval_index = 0;  ///< 1-based count of completions so far; 0 for failures
  double wall_ms = 0.0;
  int job_id = -1;
  int worker_id = -1;
  TaskKind task = TaskKind::Initial;
  JobStatus status = JobStatus::Complete;
  double submit_ms = 0.0;
  double complete_ms = 0.0;
  Vector z;
  std::optional<double> y;
  std::optional<double> best_so_far;
  double refit_ms = 0.0;
  Eigen::Index inducing_m = 0;
};

TraceEntry to_entry(const JobRecord& rec, int eval_index);
std::string format_trace_line(const TraceEntry& entry);
/// Throws InputError on malformed lines.
TraceEntry parse_trace_line(const std::string& line);
/// Same line with all timing fields zeroed, for determinism comparisons.
std::string canonical_trace_line(const std::string& line);

struct TraceFile {
  std::vector<TraceEntry> entries;
  int skipped = 0;
};

/// Reads a JSONL trace, skipping (and counting) malformed lines.
TraceFile read_trace(const std::string& path, std::ostream* warnings = nullptr);

}  // namespace s3bo
