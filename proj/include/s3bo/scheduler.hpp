#pragma once

#include "s3bo/acquisition.hpp"
#include "s3bo/dataset.hpp"
#include "s3bo/surrogate.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace s3bo {

enum class JobStatus { Pending, Hallucinated, Complete, Failed };
enum class TaskKind { Initial, Exploit, Explore };

std::string to_string(JobStatus status);
std::string to_string(TaskKind task);
TaskKind parse_task_kind(std::string_view name);

/// One evaluation's lifecycle. Pending -> Hallucinated -> Complete | Failed;
/// initial-design jobs may complete straight from Pending when no model
/// existed while they ran.
struct JobRecord {
  int job_id = -1;
  Vector z;
  Vector x;
  JobStatus status = JobStatus::Pending;
  TaskKind task = TaskKind::Initial;
  int worker_id = -1;
  double submit_ms = 0.0;
  double complete_ms = 0.0;
  std::optional<double> y;
  double surrogate_y = 0.0;
  double best_so_far = 0.0;
  double refit_ms = 0.0;
  Eigen::Index inducing_m = 0;
};

/// Controller-owned bookkeeping: true observations plus one surrogate row per
/// in-flight job that has been hallucinated.
class SchedulerState {
 public:
  SchedulerState(Eigen::Index dim, int batch_size, RunMode mode);

  /// Registers a new Pending job. Throws ProtocolError when B jobs are active.
  int submit(const Vector& z, const Vector& x, TaskKind task);
  /// Sets (or refreshes) the surrogate value of an active job.
  void hallucinate(int job_id, double surrogate_y);
  /// Replaces the job's surrogate row by the true observation.
  void complete(int job_id, double y);
  /// Drops the job's surrogate row; the slot becomes free.
  void fail(int job_id);

  [[nodiscard]] const Dataset& observed() const { return observed_; }
  /// Observations followed by surrogate rows in job-id order.
  [[nodiscard]] Dataset hallucinated_view() const;
  [[nodiscard]] const std::vector<int>& active() const { return active_; }
  [[nodiscard]] int surrogate_rows() const;
  [[nodiscard]] int batch_size() const { return batch_size_; }
  [[nodiscard]] int completed() const { return completed_; }
  [[nodiscard]] int failed() const { return failed_; }
  [[nodiscard]] const JobRecord& job(int job_id) const;
  JobRecord& job_mut(int job_id);
  [[nodiscard]] const std::vector<JobRecord>& jobs() const { return jobs_; }
  [[nodiscard]] bool stale() const { return stale_; }
  void mark_fresh() { stale_ = false; }

 private:
  JobRecord& active_job(int job_id, const char* what);
  void deactivate(int job_id);

  std::vector<JobRecord> jobs_;
  std::vector<int> active_;
  Dataset observed_;
  int batch_size_;
  int completed_ = 0;
  int failed_ = 0;
  bool stale_ = true;
};

struct FitStats {
  double fit_ms = 0.0;
  Eigen::Index inducing_m = 0;
};

/// Builds posterior models for the controller.
class SurrogateFitter {
 public:
  virtual ~SurrogateFitter() = default;
  /// Re-estimates hyperparameters from the true observations.
  virtual void train(const Dataset& observed) = 0;
  /// Conditions a model on `data` with the current hyperparameters.
  virtual std::unique_ptr<Surrogate> fit(const Dataset& data) = 0;
  [[nodiscard]] virtual FitStats last_stats() const = 0;
};

struct ControllerOptions {
  int batch_size = 1;
  AcquisitionSpec acquisition{};
  int acquisition_budget = 20;
  std::uint64_t seed = 0;
  /// Verify the surrogate-row invariant after every refresh.
  bool audit = true;
};

struct Assignment {
  int job_id = -1;
  Vector z;
  TaskKind task = TaskKind::Exploit;
};

/// Single owner of the scheduler state and the models. After each batch of
/// completions the next assignment retrains and refits; the first slot of a
/// refresh exploits the acquisition, later slots explore posterior variance
/// on a model that already hallucinates the earlier picks.
class Controller {
 public:
  Controller(Box search_box, ControllerOptions options, SurrogateFitter& fitter,
             std::function<Vector(const Vector&)> lift, RunMode mode);

  [[nodiscard]] SchedulerState& state() { return state_; }
  [[nodiscard]] const SchedulerState& state() const { return state_; }
  [[nodiscard]] const Box& search_box() const { return box_; }

  int submit_initial(const Vector& z);
  /// Requires at least one observation and a free slot.
  Assignment next_assignment();
  void on_complete(int job_id, double y);
  void on_failed(int job_id);
  [[nodiscard]] int refresh_count() const { return refreshes_; }

 private:
  void refresh();
  void refit_view();

  Box box_;
  ControllerOptions options_;
  SurrogateFitter& fitter_;
  std::function<Vector(const Vector&)> lift_;
  SchedulerState state_;
  std::unique_ptr<Surrogate> view_model_;
  FitStats view_stats_{};
  bool exploit_given_ = false;
  int refreshes_ = 0;
};

/// Objective callback used by workers: (x, job id) -> y. Throwing marks the
/// job Failed. Must be safe to call concurrently.
using Evaluator = std::function<double(const Vector& x, int job_id)>;

struct PoolOptions {
  int workers = 1;
  int budget = 0;
  double wallclock_s = 0.0;  ///< 0 disables the limit
};

enum class PoolOutcome { Finished, WallClock, TooManyFailures };

struct PoolResult {
  std::vector<JobRecord> trace;  ///< terminal jobs in completion order
  PoolOutcome outcome = PoolOutcome::Finished;
  std::string diagnostic;
};

/// Called for every terminal job as soon as the controller has processed it.
using TraceSink = std::function<void(const JobRecord&)>;

/// Asynchronous evaluation with `workers` threads until `budget` jobs have
/// completed. The initial design is dispatched first; afterwards every idle
/// worker gets a controller assignment immediately.
PoolResult run_pool(Controller& controller, const Matrix& initial_design, const Evaluator& evaluate,
                    const PoolOptions& options, const TraceSink& sink = {});

/// Single-threaded reference loop with the same decisions as run_pool with
/// one worker.
PoolResult run_sequential(Controller& controller, const Matrix& initial_design,
                          const Evaluator& evaluate, int budget, const TraceSink& sink = {});

}  // namespace s3bo
