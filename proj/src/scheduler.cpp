#include "s3bo/scheduler.hpp"

#include "s3bo/errors.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <limits>
#include <mutex>
#include <thread>

namespace s3bo {

std::string to_string(JobStatus status) {
  switch (status) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Hallucinated: return "hallucinated";
    case JobStatus::Complete: return "complete";
    case JobStatus::Failed: return "failed";
  }
  return "unknown";
}

std::string to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Initial: return "initial";
    case TaskKind::Exploit: return "exploit";
    case TaskKind::Explore: return "explore";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "initial") return TaskKind::Initial;
  if (name == "exploit") return TaskKind::Exploit;
  if (name == "explore") return TaskKind::Explore;
  throw InputError("unknown task kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

SchedulerState::SchedulerState(Eigen::Index dim, int batch_size, RunMode mode)
    : observed_(dim, mode), batch_size_(batch_size) {
  if (batch_size < 1) throw InputError("batch size must be >= 1");
}

int SchedulerState::submit(const Vector& z, const Vector& x, TaskKind task) {
  if (static_cast<int>(active_.size()) >= batch_size_)
    throw ProtocolError("submit: all " + std::to_string(batch_size_) + " slots are busy");
  if (z.size() != observed_.dim()) throw InputError("submit: z has wrong dimension");
  JobRecord rec;
  rec.job_id = static_cast<int>(jobs_.size());
  rec.z = z;
  rec.x = x;
  rec.task = task;
  jobs_.push_back(std::move(rec));
  active_.push_back(jobs_.back().job_id);
  return jobs_.back().job_id;
}

JobRecord& SchedulerState::active_job(int job_id, const char* what) {
  if (job_id < 0 || job_id >= static_cast<int>(jobs_.size()))
    throw ProtocolError(std::string(what) + ": unknown job id " + std::to_string(job_id));
  JobRecord& rec = jobs_[static_cast<std::size_t>(job_id)];
  if (rec.status == JobStatus::Complete || rec.status == JobStatus::Failed)
    throw ProtocolError(std::string(what) + ": job " + std::to_string(job_id) + " already " +
                        to_string(rec.status));
  return rec;
}

void SchedulerState::deactivate(int job_id) {
  active_.erase(std::find(active_.begin(), active_.end(), job_id));
  stale_ = true;
}

void SchedulerState::hallucinate(int job_id, double surrogate_y) {
  JobRecord& rec = active_job(job_id, "hallucinate");
  if (!std::isfinite(surrogate_y)) throw NumericalError("hallucinate: non-finite surrogate value");
  rec.surrogate_y = surrogate_y;
  rec.status = JobStatus::Hallucinated;
}

void SchedulerState::complete(int job_id, double y) {
  JobRecord& rec = active_job(job_id, "complete");
  if (rec.status == JobStatus::Pending && rec.task != TaskKind::Initial)
    throw ProtocolError("complete: job " + std::to_string(job_id) + " was never hallucinated");
  if (!std::isfinite(y)) throw InputError("complete: non-finite objective value");
  rec.status = JobStatus::Complete;
  rec.y = y;
  observed_.append(rec.z, y);
  rec.best_so_far = observed_.best_value();
  ++completed_;
  deactivate(job_id);
}

void SchedulerState::fail(int job_id) {
  JobRecord& rec = active_job(job_id, "fail");
  rec.status = JobStatus::Failed;
  rec.best_so_far =
      observed_.empty() ? std::numeric_limits<double>::quiet_NaN() : observed_.best_value();
  ++failed_;
  deactivate(job_id);
}

Dataset SchedulerState::hallucinated_view() const {
  Dataset view = observed_;
  for (int id : active_) {
    const JobRecord& rec = jobs_[static_cast<std::size_t>(id)];
    if (rec.status == JobStatus::Hallucinated) view.append(rec.z, rec.surrogate_y);
  }
  return view;
}

int SchedulerState::surrogate_rows() const {
  return static_cast<int>(std::count_if(active_.begin(), active_.end(), [&](int id) {
    return jobs_[static_cast<std::size_t>(id)].status == JobStatus::Hallucinated;
  }));
}

const JobRecord& SchedulerState::job(int job_id) const {
  if (job_id < 0 || job_id >= static_cast<int>(jobs_.size()))
    throw ProtocolError("unknown job id " + std::to_string(job_id));
  return jobs_[static_cast<std::size_t>(job_id)];
}

JobRecord& SchedulerState::job_mut(int job_id) {
  if (job_id < 0 || job_id >= static_cast<int>(jobs_.size()))
    throw ProtocolError("unknown job id " + std::to_string(job_id));
  return jobs_[static_cast<std::size_t>(job_id)];
}

// ---------------------------------------------------------------------------

Controller::Controller(Box search_box, ControllerOptions options, SurrogateFitter& fitter,
                       std::function<Vector(const Vector&)> lift, RunMode mode)
    : box_(std::move(search_box)),
      options_(options),
      fitter_(fitter),
      lift_(std::move(lift)),
      state_(box_.dim(), options.batch_size, mode) {
  options_.acquisition.mode = mode;
  options_.acquisition.validate();
  if (options_.acquisition_budget < 1) throw InputError("acquisition budget must be >= 1");
}

int Controller::submit_initial(const Vector& z) {
  return state_.submit(z, lift_(z), TaskKind::Initial);
}

void Controller::refit_view() {
  view_model_ = fitter_.fit(state_.hallucinated_view());
  view_stats_ = fitter_.last_stats();
}

void Controller::refresh() {
  const Dataset& observed = state_.observed();
  fitter_.train(observed);
  double refit_ms = 0.0;
  // Pending jobs get the posterior mean of the model on true data only.
  if (!state_.active().empty()) {
    auto base = fitter_.fit(observed);
    refit_ms += fitter_.last_stats().fit_ms;
    for (int id : state_.active())
      state_.hallucinate(id, base->predict_point(state_.job(id).z).mean);
  }
  refit_view();
  view_stats_.fit_ms += refit_ms;
  if (options_.audit) {
    const Eigen::Index expected =
        observed.size() + static_cast<Eigen::Index>(state_.active().size());
    if (state_.surrogate_rows() != static_cast<int>(state_.active().size()) ||
        state_.hallucinated_view().size() != expected)
      throw ProtocolError("audit: surrogate rows do not match in-flight jobs");
  }
  state_.mark_fresh();
  exploit_given_ = false;
  ++refreshes_;
}

Assignment Controller::next_assignment() {
  if (state_.observed().empty())
    throw ProtocolError("next_assignment: no observations to model");
  if (static_cast<int>(state_.active().size()) >= state_.batch_size())
    throw ProtocolError("next_assignment: no idle slot");
  if (state_.stale() || !view_model_) refresh();

  const int next_id = static_cast<int>(state_.jobs().size());
  const std::uint64_t seed = derive_seed(options_.seed, static_cast<std::uint64_t>(next_id));
  Assignment out;
  out.task = exploit_given_ ? TaskKind::Explore : TaskKind::Exploit;
  if (out.task == TaskKind::Exploit) {
    const Dataset view = state_.hallucinated_view();
    out.z = maximize_acquisition(*view_model_, options_.acquisition, box_,
                                 state_.observed().best_value(), view.size(),
                                 options_.acquisition_budget, seed)
                .z;
    exploit_given_ = true;
  } else {
    const Surrogate& model = *view_model_;
    out.z = maximize_in_box(
                [&model](const Vector& z) { return model.predict_point(z).variance; }, box_,
                options_.acquisition_budget, seed)
                .z;
  }
  out.z = box_.clamp(out.z);
  out.job_id = state_.submit(out.z, lift_(out.z), out.task);
  JobRecord& rec = state_.job_mut(out.job_id);
  rec.refit_ms = view_stats_.fit_ms;
  rec.inducing_m = view_stats_.inducing_m;
  state_.hallucinate(out.job_id, view_model_->predict_point(out.z).mean);
  // The next slot in this cycle must see the new surrogate row.
  refit_view();
  state_.mark_fresh();
  return out;
}

void Controller::on_complete(int job_id, double y) { state_.complete(job_id, y); }

void Controller::on_failed(int job_id) { state_.fail(job_id); }

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr int kMinTerminalForAbort = 4;

bool too_many_failures(const SchedulerState& state) {
  const int terminal = state.completed() + state.failed();
  return terminal >= kMinTerminalForAbort && 2 * state.failed() >= terminal;
}

std::string failure_diagnostic(const SchedulerState& state) {
  return "aborting: " + std::to_string(state.failed()) + " of " +
         std::to_string(state.completed() + state.failed()) + " evaluations failed";
}

// Dispatch policy shared by the pool and the sequential loop.
struct Dispatcher {
  Controller& controller;
  const Matrix& initial;
  Eigen::Index next_initial = 0;
  int budget;

  [[nodiscard]] bool may_submit() const {
    const SchedulerState& s = controller.state();
    return s.completed() + static_cast<int>(s.active().size()) < budget &&
           static_cast<int>(s.active().size()) < s.batch_size();
  }

  // Returns -1 when nothing can be submitted right now.
  int submit() {
    if (!may_submit()) return -1;
    if (next_initial < initial.rows()) {
      const Vector z = initial.row(next_initial++).transpose();
      return controller.submit_initial(z);
    }
    if (controller.state().observed().empty()) return -1;
    return controller.next_assignment().job_id;
  }
};

}  // namespace

PoolResult run_pool(Controller& controller, const Matrix& initial_design, const Evaluator& evaluate,
                    const PoolOptions& options, const TraceSink& sink) {
  if (options.workers < 1) throw InputError("workers must be >= 1");
  if (options.budget < 0) throw InputError("budget must be >= 0");
  if (options.workers > controller.state().batch_size())
    throw InputError("workers exceed the controller batch size");
  PoolResult result;
  if (options.budget == 0) return result;

  struct Done {
    int job_id;
    int worker;
    bool ok;
    double y;
    double complete_ms;
  };
  struct Slot {
    int job_id = -1;
    Vector x;
  };

  const auto start = Clock::now();
  std::mutex mu;
  std::condition_variable controller_cv;
  std::condition_variable worker_cv;
  std::vector<Slot> slots(static_cast<std::size_t>(options.workers));
  std::deque<Done> done;
  bool stop = false;

  auto worker_main = [&](int w) {
    for (;;) {
      Slot job;
      {
        std::unique_lock lock(mu);
        worker_cv.wait(lock, [&] { return stop || slots[static_cast<std::size_t>(w)].job_id >= 0; });
        if (slots[static_cast<std::size_t>(w)].job_id < 0) return;
        job = slots[static_cast<std::size_t>(w)];
      }
      bool ok = true;
      double y = 0.0;
      try {
        y = evaluate(job.x, job.job_id);
        ok = std::isfinite(y);
      } catch (...) {
        ok = false;
      }
      {
        std::lock_guard lock(mu);
        // Stamped under the lock so arrival order equals timestamp order.
        done.push_back({job.job_id, w, ok, y, elapsed_ms(start)});
        slots[static_cast<std::size_t>(w)].job_id = -1;
      }
      controller_cv.notify_one();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(options.workers));
  for (int w = 0; w < options.workers; ++w) threads.emplace_back(worker_main, w);

  Dispatcher dispatch{controller, initial_design, 0, options.budget};
  SchedulerState& state = controller.state();
  std::vector<bool> busy(static_cast<std::size_t>(options.workers), false);
  bool accepting = true;
  const bool has_limit = options.wallclock_s > 0.0;
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(options.wallclock_s));

  auto shutdown = [&] {
    {
      std::lock_guard lock(mu);
      stop = true;
    }
    worker_cv.notify_all();
    for (auto& t : threads) t.join();
  };

  try {
    for (;;) {
      if (accepting && has_limit && Clock::now() >= deadline) {
        accepting = false;
        result.outcome = PoolOutcome::WallClock;
      }
      // Fill every idle worker before waiting on anyone.
      for (int w = 0; accepting && w < options.workers; ++w) {
        if (busy[static_cast<std::size_t>(w)]) continue;
        const int id = dispatch.submit();
        if (id < 0) break;
        JobRecord& rec = state.job_mut(id);
        rec.worker_id = w;
        rec.submit_ms = elapsed_ms(start);
        busy[static_cast<std::size_t>(w)] = true;
        {
          std::lock_guard lock(mu);
          slots[static_cast<std::size_t>(w)] = Slot{id, rec.x};
        }
        worker_cv.notify_all();
      }
      if (state.active().empty()) {
        if (accepting && state.completed() < options.budget && state.observed().empty() &&
            dispatch.next_initial >= initial_design.rows()) {
          result.outcome = PoolOutcome::TooManyFailures;
          result.diagnostic = "aborting: no successful evaluation in the initial design";
        }
        break;
      }

      std::deque<Done> batch;
      {
        std::unique_lock lock(mu);
        auto ready = [&] { return !done.empty(); };
        if (accepting && has_limit)
          controller_cv.wait_until(lock, deadline, ready);
        else
          controller_cv.wait(lock, ready);
        batch.swap(done);
      }
      for (const Done& d : batch) {
        busy[static_cast<std::size_t>(d.worker)] = false;
        if (d.ok)
          controller.on_complete(d.job_id, d.y);
        else
          controller.on_failed(d.job_id);
        JobRecord& rec = state.job_mut(d.job_id);
        rec.complete_ms = d.complete_ms;
        result.trace.push_back(rec);
        if (sink) sink(rec);
      }
      if (accepting && too_many_failures(state)) {
        accepting = false;
        result.outcome = PoolOutcome::TooManyFailures;
        result.diagnostic = failure_diagnostic(state);
      }
    }
  } catch (...) {
    shutdown();
    throw;
  }
  shutdown();
  return result;
}

PoolResult run_sequential(Controller& controller, const Matrix& initial_design,
                          const Evaluator& evaluate, int budget, const TraceSink& sink) {
  if (budget < 0) throw InputError("budget must be >= 0");
  PoolResult result;
  const auto start = Clock::now();
  Dispatcher dispatch{controller, initial_design, 0, budget};
  SchedulerState& state = controller.state();
  while (state.completed() < budget) {
    const int id = dispatch.submit();
    if (id < 0) {
      result.outcome = PoolOutcome::TooManyFailures;
      result.diagnostic = "aborting: no successful evaluation in the initial design";
      break;
    }
    JobRecord& rec = state.job_mut(id);
    rec.worker_id = 0;
    rec.submit_ms = elapsed_ms(start);
    bool ok = true;
    double y = 0.0;
    try {
      y = evaluate(rec.x, id);
      ok = std::isfinite(y);
    } catch (...) {
      ok = false;
    }
    const double t = elapsed_ms(start);
    if (ok)
      controller.on_complete(id, y);
    else
      controller.on_failed(id);
    JobRecord& done = state.job_mut(id);
    done.complete_ms = t;
    result.trace.push_back(done);
    if (sink) sink(done);
    if (too_many_failures(state)) {
      result.outcome = PoolOutcome::TooManyFailures;
      result.diagnostic = failure_diagnostic(state);
      break;
    }
  }
  return result;
}

}  // namespace s3bo
