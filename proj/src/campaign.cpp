#include "s3bo/campaign.hpp"

#include "s3bo/errors.hpp"
#include "s3bo/fitter.hpp"
#include "s3bo/lhs.hpp"
#include "s3bo/trace_io.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace s3bo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream tags for derive_seed, one per consumer of randomness.
constexpr std::uint64_t kDesignStream = 0x1a5;
constexpr std::uint64_t kControllerStream = 0xac9;
constexpr std::uint64_t kFitterStream = 0x6f17;
constexpr std::uint64_t kDelayStream = 0xde1a7;

struct ReplayEntry {
  Vector z;
  std::optional<double> y;
};

std::string join(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void write_checkpoint(const fs::path& path, const RunConfig& config,
                      const std::vector<JobRecord>& done, int refreshes) {
  json j;
  j["version"] = 1;
  j["config_hash"] = config.resume_hash();
  j["run_seed"] = config.run_seed;
  j["embed_seed"] = config.embedding_seed();
  j["refreshes"] = refreshes;
  json records = json::array();
  for (const JobRecord& r : done)
    records.push_back({{"job_id", r.job_id},
                       {"z", to_std(r.z)},
                       {"y", r.y ? json(*r.y) : json(nullptr)}});
  j["records"] = std::move(records);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump() << "\n";
  }
  fs::rename(tmp, path);
}

std::map<int, ReplayEntry> read_checkpoint(const fs::path& path, const RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("resume: no checkpoint at '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("resume: unreadable checkpoint: " + std::string(e.what()));
  }
  if (j.value("config_hash", std::uint64_t{0}) != config.resume_hash())
    throw ConfigError("resume: checkpoint was written with a different configuration");
  std::map<int, ReplayEntry> out;
  for (const json& r : j.at("records")) {
    const auto z = r.at("z").get<std::vector<double>>();
    ReplayEntry e{Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size())), {}};
    if (!r.at("y").is_null()) e.y = r.at("y").get<double>();
    out.emplace(r.at("job_id").get<int>(), std::move(e));
  }
  return out;
}

struct ReplayFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

Benchmark make_benchmark(const RunConfig& c) {
  std::optional<DelayRange> delay;
  if (c.bench_delay_ub_s > 0.0) delay = DelayRange{c.bench_delay_lb_s, c.bench_delay_ub_s};
  Matrix weights;
  if (c.bench_name == BenchmarkName::SphereGeneral)
    weights = Benchmark::random_weights(c.bench_effective_dim, c.bench_dim, c.bench_weights_seed);
  try {
    return Benchmark(c.bench_name, c.bench_dim, delay, c.bench_normalize_g, weights);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

Embedding make_embedding(const RunConfig& c, const Benchmark& bench) {
  Box bounds = bench.default_bounds();
  if (c.bench_lb)
    bounds = Box(Vector::Constant(c.bench_dim, *c.bench_lb), Vector::Constant(c.bench_dim, *c.bench_ub));
  if (c.embed_kind == EmbeddingKind::Identity) return Embedding::identity(bounds.lower, bounds.upper);
  return Embedding::draw(c.bench_dim, c.low_dim(), bounds.lower, bounds.upper, c.embedding_seed());
}

void write_summary(std::ostream& out, const CampaignSummary& s) {
  out.precision(17);
  out << "best_y = " << s.best_y << "\n";
  out << "best_z = " << join(s.best_z) << "\n";
  out << "best_x = " << join(s.best_x) << "\n";
  out << "evaluations = " << s.evaluations << "\n";
  out << "failed = " << s.failed << "\n";
  out << "replayed = " << s.replayed << "\n";
  out << "wall_s = " << s.wall_s << "\n";
  const char* outcome = s.outcome == PoolOutcome::Finished   ? "finished"
                        : s.outcome == PoolOutcome::WallClock ? "wallclock"
                                                              : "objective_failures";
  out << "outcome = " << outcome << "\n";
  if (!s.diagnostic.empty()) out << "diagnostic = " << s.diagnostic << "\n";
  out << "config_hash = " << s.config_hash << "\n";
}

CampaignResult run_campaign(const RunConfig& config, const CampaignOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Benchmark bench = make_benchmark(config);
  const Embedding embedding = make_embedding(config, bench);
  const Box search = embedding.search_box();

  const fs::path dir(config.run_out_dir);
  std::map<int, ReplayEntry> replay;
  if (options.resume) replay = read_checkpoint(dir / "checkpoint.json", config);

  FitterOptions fopt;
  fopt.family = config.kernel_family;
  fopt.init_amplitude = config.kernel_amplitude;
  fopt.init_lengthscale = config.kernel_lengthscale;
  fopt.exact_below_n = config.gp_exact_below_n;
  fopt.variant = config.gp_variant;
  fopt.num_inducing = config.gp_num_inducing;
  fopt.objective = config.gp_objective;
  fopt.restarts = config.gp_restarts;
  fopt.full_train_every = config.gp_full_train_every;
  fopt.freeze_inducing = config.gp_freeze_inducing;
  fopt.seed = derive_seed(config.run_seed, kFitterStream);
  GpFitter fitter(search, fopt);

  ControllerOptions copt;
  copt.batch_size = config.sched_workers;
  copt.acquisition = AcquisitionSpec{config.acq_kind, config.acq_delta, config.run_mode};
  copt.acquisition_budget = config.acq_budget;
  copt.seed = derive_seed(config.run_seed, kControllerStream);
  Controller controller(search, copt, fitter, [&embedding](const Vector& z) { return embedding.to_x(z); },
                        config.run_mode);

  const Matrix design = latin_hypercube(
      search, std::min(config.initial_design_size(), config.sched_budget),
      derive_seed(config.run_seed, kDesignStream));

  std::atomic<int> replayed{0};
  const std::uint64_t delay_seed = derive_seed(config.run_seed, kDelayStream);
  Evaluator evaluate = [&](const Vector& x, int job_id) {
    if (auto it = replay.find(job_id); it != replay.end()) {
      const ReplayEntry& r = it->second;
      // Workers never touch controller state, so compare in x space.
      if (r.z.size() == search.dim() && embedding.to_x(r.z) == x) {
        ++replayed;
        if (!r.y) throw ReplayFailure("replayed failure");
        return *r.y;
      }
    }
    std::mt19937_64 rng(derive_seed(delay_seed, static_cast<std::uint64_t>(job_id)));
    return bench.evaluate(x, rng);
  };

  std::ofstream trace_out;
  if (options.write_files) {
    fs::create_directories(dir);
    trace_out.open(dir / "trace.jsonl", std::ios::trunc);
    if (!trace_out) throw ConfigError("cannot write to output directory '" + dir.string() + "'");
  }

  std::vector<JobRecord> done;
  TraceSink sink = [&](const JobRecord& rec) {
    done.push_back(rec);
    if (!options.write_files) return;
    const int index = rec.status == JobStatus::Complete ? controller.state().completed() : 0;
    trace_out << format_trace_line(to_entry(rec, index)) << "\n";
    trace_out.flush();
    if (config.run_checkpoint_every > 0 && rec.status == JobStatus::Complete &&
        controller.state().completed() % config.run_checkpoint_every == 0)
      write_checkpoint(dir / "checkpoint.json", config, done, controller.refresh_count());
  };

  CampaignResult result;
  CampaignSummary& s = result.summary;
  s.config_hash = config.resume_hash();
  auto finish = [&] {
    const Dataset& obs = controller.state().observed();
    if (!obs.empty()) {
      s.best_y = obs.best_value();
      s.best_z = obs.inputs().row(obs.best_index()).transpose();
      s.best_x = embedding.to_x(s.best_z);
    }
    s.evaluations = controller.state().completed();
    s.failed = controller.state().failed();
    s.replayed = replayed.load();
    s.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.write_files) {
      std::ofstream out(dir / "summary.txt", std::ios::trunc);
      write_summary(out, s);
      if (config.run_checkpoint_every > 0)
        write_checkpoint(dir / "checkpoint.json", config, done, controller.refresh_count());
    }
  };

  try {
    PoolResult pool;
    if (options.sequential) {
      pool = run_sequential(controller, design, evaluate, config.sched_budget, sink);
    } else {
      PoolOptions popt;
      popt.workers = config.sched_workers;
      popt.budget = config.sched_budget;
      popt.wallclock_s = config.sched_wallclock_s;
      pool = run_pool(controller, design, evaluate, popt, sink);
    }
    s.outcome = pool.outcome;
    s.diagnostic = pool.diagnostic;
  } catch (const NumericalError& e) {
    s.outcome = PoolOutcome::Finished;
    s.diagnostic = std::string("numerical abort: ") + e.what();
    finish();
    throw;
  }
  finish();
  result.trace = std::move(done);
  return result;
}

}  // namespace s3bo
