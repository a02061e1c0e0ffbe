#pragma once

#include "s3bo/trace_io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace s3bo {

struct ConvergencePoint {
  int eval_index = 0;
  double wall_ms = 0.0;
  double best_so_far = 0.0;
};

/// best_so_far after each completion, in completion order.
std::vector<ConvergencePoint> convergence_curve(const TraceFile& trace);

struct QuantileRow {
  int eval_index = 0;
  int runs = 0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Elementwise quartiles across runs, aligned by evaluation index. Runs shorter
/// than a given index simply do not contribute to it.
std::vector<QuantileRow> across_run_quartiles(const std::vector<std::vector<ConvergencePoint>>& runs);

void write_convergence_csv(std::ostream& out, const std::vector<std::string>& run_names,
                           const std::vector<std::vector<ConvergencePoint>>& runs);
void write_quartiles_csv(std::ostream& out, const std::vector<QuantileRow>& rows);

struct ScheduleBar {
  int worker = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;
  TaskKind task = TaskKind::Initial;
  int job_id = -1;
};

std::vector<ScheduleBar> schedule_bars(const TraceFile& trace);
void write_schedule_csv(std::ostream& out, const std::vector<ScheduleBar>& bars);

struct WorkerUtilization {
  int worker = 0;
  int jobs = 0;
  double busy_ms = 0.0;
  /// Gaps between consecutive jobs, from the first start to the last end.
  double idle_ms = 0.0;
};

std::vector<WorkerUtilization> worker_utilization(const std::vector<ScheduleBar>& bars);

}  // namespace s3bo
