#include "s3bo/report.hpp"

#include "s3bo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace s3bo {

std::vector<ConvergencePoint> convergence_curve(const TraceFile& trace) {
  std::vector<ConvergencePoint> out;
  for (const TraceEntry& e : trace.entries) {
    if (e.status != JobStatus::Complete || !e.best_so_far) continue;
    out.push_back({e.eval_index, e.wall_ms, *e.best_so_far});
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<QuantileRow> across_run_quartiles(const std::vector<std::vector<ConvergencePoint>>& runs) {
  std::map<int, std::vector<double>> by_index;
  for (const auto& run : runs)
    for (const ConvergencePoint& p : run) by_index[p.eval_index].push_back(p.best_so_far);
  std::vector<QuantileRow> out;
  out.reserve(by_index.size());
  for (const auto& [idx, vals] : by_index)
    out.push_back({idx, static_cast<int>(vals.size()), quantile(vals, 0.25), quantile(vals, 0.5),
                   quantile(vals, 0.75)});
  return out;
}

void write_convergence_csv(std::ostream& out, const std::vector<std::string>& run_names,
                           const std::vector<std::vector<ConvergencePoint>>& runs) {
  out.precision(17);
  out << "run,eval_index,wall_ms,best_so_far\n";
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (const ConvergencePoint& p : runs[r])
      out << run_names.at(r) << ',' << p.eval_index << ',' << p.wall_ms << ',' << p.best_so_far
          << '\n';
}

void write_quartiles_csv(std::ostream& out, const std::vector<QuantileRow>& rows) {
  out.precision(17);
  out << "eval_index,runs,q25,median,q75\n";
  for (const QuantileRow& r : rows)
    out << r.eval_index << ',' << r.runs << ',' << r.q25 << ',' << r.median << ',' << r.q75 << '\n';
}

std::vector<ScheduleBar> schedule_bars(const TraceFile& trace) {
  std::vector<ScheduleBar> bars;
  for (const TraceEntry& e : trace.entries)
    bars.push_back({e.worker_id, e.submit_ms, e.complete_ms, e.task, e.job_id});
  std::sort(bars.begin(), bars.end(), [](const ScheduleBar& a, const ScheduleBar& b) {
    return a.worker != b.worker ? a.worker < b.worker : a.start_ms < b.start_ms;
  });
  return bars;
}

void write_schedule_csv(std::ostream& out, const std::vector<ScheduleBar>& bars) {
  out.precision(12);
  out << "worker,start_ms,end_ms,task,job_id\n";
  for (const ScheduleBar& b : bars)
    out << b.worker << ',' << b.start_ms << ',' << b.end_ms << ',' << to_string(b.task) << ','
        << b.job_id << '\n';
}

std::vector<WorkerUtilization> worker_utilization(const std::vector<ScheduleBar>& bars) {
  std::map<int, std::vector<ScheduleBar>> by_worker;
  for (const ScheduleBar& b : bars) by_worker[b.worker].push_back(b);
  std::vector<WorkerUtilization> out;
  for (auto& [w, list] : by_worker) {
    std::sort(list.begin(), list.end(),
              [](const ScheduleBar& a, const ScheduleBar& b) { return a.start_ms < b.start_ms; });
    WorkerUtilization u;
    u.worker = w;
    u.jobs = static_cast<int>(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      u.busy_ms += list[i].end_ms - list[i].start_ms;
      if (i > 0) u.idle_ms += std::max(0.0, list[i].start_ms - list[i - 1].end_ms);
    }
    out.push_back(u);
  }
  return out;
}

}  // namespace s3bo
