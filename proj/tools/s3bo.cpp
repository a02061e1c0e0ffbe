#include "s3bo/campaign.hpp"
#include "s3bo/embedding.hpp"
#include "s3bo/errors.hpp"
#include "s3bo/report.hpp"
#include "s3bo/stress.hpp"
#include "s3bo/trace_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace s3bo;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalAbort = 3;
constexpr int kObjectiveAbort = 4;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("not a number: '" + item + "'");
    }
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

Vector read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read point file '" + path + "'");
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InputError("not a number in point file: '" + tok + "'");
    }
  }
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector summary_best_x(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read summary '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("best_x = ", 0) != 0) continue;
    std::stringstream ss(line.substr(9));
    std::vector<double> v;
    double d;
    while (ss >> d) v.push_back(d);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  throw InputError("summary '" + path + "' has no best_x line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalable sparse-GP Bayesian optimization with random embeddings"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an optimization campaign");
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_override;
  std::vector<std::string> overrides;
  bool resume = false, sequential = false;
  run->add_option("--config", config_path, "key = value config file")->required();
  run->add_option("--seed", seed_override, "override run.seed");
  run->add_option("--out", out_override, "override run.out_dir");
  run->add_option("--set", overrides, "extra key=value settings applied after the file");
  run->add_flag("--resume", resume, "continue from <out>/checkpoint.json");
  run->add_flag("--sequential", sequential, "use the single-threaded reference loop");

  // stress-gp
  auto* stress = app.add_subcommand("stress-gp", "Sparse GP scaling on the 3-D sphere");
  std::string n_list = "100,1000,10000,100000", m_list = "10,50,100", stress_out;
  StressOptions sopt;
  std::string variant = "fic";
  bool extended = false;
  stress->add_option("--n-list", n_list, "comma-separated training sizes");
  stress->add_option("--m-list", m_list, "comma-separated inducing counts");
  stress->add_option("--seed", sopt.seed);
  stress->add_option("--repeats", sopt.repeats, "timing repeats per cell");
  stress->add_option("--variant", variant, "sor, dtc or fic");
  stress->add_flag("--extended", extended, "add the n=1e6, m=300 cell");
  stress->add_option("--out", stress_out, "CSV path (stdout when omitted)");

  // embed-prob
  auto* embed = app.add_subcommand("embed-prob", "Monte-Carlo bound probability of the embedding");
  int dim_low = 10;
  double samples = 1e6;
  std::uint64_t embed_seed = 0;
  bool unscaled = false, unit = false, moments = false;
  embed->add_option("--d", dim_low, "embedded dimension")->check(CLI::PositiveNumber);
  embed->add_option("--samples", samples, "number of samples");
  embed->add_option("--seed", embed_seed);
  embed->add_flag("--unscaled", unscaled, "drop the 1/d factor");
  embed->add_flag("--unit", unit, "target [-1, 1] instead of [-sqrt(d), sqrt(d)]");
  embed->add_flag("--moments", moments, "also print coordinate mean and variance");

  // report
  auto* report = app.add_subcommand("report", "Convergence and schedule tables from traces");
  std::vector<std::string> traces;
  std::string report_out = "report";
  report->add_option("--traces", traces, "trace JSONL files, one per run")->required();
  report->add_option("--out", report_out, "output directory");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a benchmark at a point");
  std::string eval_config, eval_bench, eval_x, eval_summary;
  bool eval_normalize = false;
  auto* bench_opt = eval->add_option("--bench", eval_bench, "benchmark name; D is the point length");
  eval->add_option("--config", eval_config, "config file naming the benchmark")->excludes(bench_opt);
  auto* xopt = eval->add_option("--x", eval_x, "file holding a whitespace-separated point");
  eval->add_option("--summary", eval_summary, "use best_x from a run summary")->excludes(xopt);
  eval->add_flag("--normalize-g", eval_normalize, "ZDT1-style g for all ZDT variants");

  // schedule-plot
  auto* sched = app.add_subcommand("schedule-plot", "Worker schedule bars from a trace");
  std::string sched_trace, sched_out;
  bool utilization = false;
  sched->add_option("--trace", sched_trace)->required();
  sched->add_option("--out", sched_out, "CSV path (stdout when omitted)");
  sched->add_flag("--utilization", utilization, "print per-worker idle fraction to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      RunConfig cfg = load_config(config_path);
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (seed_override) cfg.run_seed = *seed_override;
      if (!out_override.empty()) cfg.run_out_dir = out_override;
      cfg.validate();
      CampaignOptions copt;
      copt.resume = resume;
      copt.sequential = sequential;
      const CampaignResult r = run_campaign(cfg, copt);
      write_summary(std::cout, r.summary);
      if (r.summary.outcome == PoolOutcome::TooManyFailures) {
        std::cerr << "error: " << r.summary.diagnostic << "\n";
        return kObjectiveAbort;
      }
    } else if (*stress) {
      sopt.n_list.clear();
      sopt.m_list.clear();
      for (double v : parse_list(n_list)) sopt.n_list.push_back(static_cast<Eigen::Index>(v));
      for (double v : parse_list(m_list)) sopt.m_list.push_back(static_cast<Eigen::Index>(v));
      sopt.variant = parse_sparse_variant(variant);
      auto rows = stress_gp(sopt);
      if (extended) {
        StressOptions big = sopt;
        big.n_list = {1'000'000};
        big.m_list = {300};
        big.repeats = 1;
        for (const StressRow& r : stress_gp(big)) rows.push_back(r);
      }
      if (stress_out.empty()) {
        write_stress_csv(std::cout, rows);
      } else {
        auto out = open_out(stress_out);
        write_stress_csv(out, rows);
      }
    } else if (*embed) {
      const auto n = static_cast<std::int64_t>(samples);
      const double p = mc_bound_probability(dim_low, n, embed_seed, !unscaled,
                                             unit ? BoundTarget::Unit : BoundTarget::SqrtD);
      std::cout.precision(10);
      std::cout << "d = " << dim_low << "\nsamples = " << n << "\nprobability = " << p << "\n";
      if (moments) {
        const SampleMoments m = mc_coordinate_moments(dim_low, n, embed_seed, !unscaled);
        std::cout << "mean = " << m.mean << "\nvariance = " << m.variance << "\n";
      }
    } else if (*report) {
      std::vector<std::string> names;
      std::vector<std::vector<ConvergencePoint>> curves;
      std::vector<ScheduleBar> all_bars;
      int skipped = 0;
      for (const std::string& path : traces) {
        const TraceFile tf = read_trace(path, &std::cerr);
        skipped += tf.skipped;
        names.push_back(fs::path(path).parent_path().filename().string() + "/" +
                        fs::path(path).filename().string());
        curves.push_back(convergence_curve(tf));
      }
      const fs::path dir(report_out);
      fs::create_directories(dir);
      auto conv = open_out(dir / "convergence.csv");
      write_convergence_csv(conv, names, curves);
      auto quart = open_out(dir / "convergence_quartiles.csv");
      write_quartiles_csv(quart, across_run_quartiles(curves));
      auto schedule = open_out(dir / "schedule.csv");
      schedule << "run,";
      std::ostringstream body;
      for (std::size_t i = 0; i < traces.size(); ++i) {
        std::ostringstream one;
        write_schedule_csv(one, schedule_bars(read_trace(traces[i])));
        std::istringstream lines(one.str());
        std::string line;
        std::getline(lines, line);
        if (i == 0) schedule << line << "\n";
        while (std::getline(lines, line)) body << names[i] << "," << line << "\n";
      }
      if (traces.empty()) schedule << "worker,start_ms,end_ms,task,job_id\n";
      schedule << body.str();
      std::cout << "runs = " << traces.size() << "\nskipped_lines = " << skipped << "\n";
    } else if (*eval) {
      Vector x;
      if (!eval_summary.empty()) {
        x = summary_best_x(eval_summary);
      } else if (!eval_x.empty()) {
        x = read_vector(eval_x);
      } else {
        throw InputError("eval needs --x or --summary");
      }
      std::optional<Benchmark> bench;
      if (!eval_config.empty()) {
        bench.emplace(make_benchmark(load_config(eval_config)));
      } else if (!eval_bench.empty()) {
        bench.emplace(parse_benchmark_name(eval_bench), x.size(), std::nullopt, eval_normalize);
      } else {
        throw InputError("eval needs --bench or --config");
      }
      if (x.size() != bench->dim()) throw InputError("point dimension does not match the benchmark");
      std::cout.precision(17);
      std::cout << bench->value(x) << "\n";
    } else if (*sched) {
      const TraceFile tf = read_trace(sched_trace, &std::cerr);
      const auto bars = schedule_bars(tf);
      if (sched_out.empty()) {
        write_schedule_csv(std::cout, bars);
      } else {
        auto out = open_out(sched_out);
        write_schedule_csv(out, bars);
      }
      if (utilization)
        for (const WorkerUtilization& u : worker_utilization(bars))
          std::cerr << "worker " << u.worker << ": jobs=" << u.jobs << " busy_ms=" << u.busy_ms
                    << " idle_ms=" << u.idle_ms << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
