#include "s3bo/config.hpp"

#include "s3bo/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace s3bo {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expect) {
  throw ConfigError("config key '" + key + "': expected " + expect + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) bad_value(key, value, "a finite number");
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value, "a finite number");
  }
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    bad_value(key, value, "a nonnegative integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

int positive(const std::string& key, const std::string& value, int min = 1) {
  const auto v = to_int(key, value);
  if (v < min || v > 1'000'000'000) bad_value(key, value, min == 0 ? "a count >= 0" : "a count >= 1");
  return static_cast<int>(v);
}

template <class F>
auto parse_enum(const std::string& key, const std::string& value, F parse) {
  try {
    return parse(value);
  } catch (const InputError& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "auto";
  if constexpr (std::is_floating_point_v<T>)
    return fmt(*v);
  else
    return std::to_string(*v);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "kernel.family") {
    kernel_family = parse_enum(key, value, parse_kernel_family);
  } else if (key == "kernel.amplitude") {
    kernel_amplitude = to_double(key, value);
  } else if (key == "kernel.lengthscale") {
    kernel_lengthscale = to_double(key, value);
  } else if (key == "gp.exact_below_n") {
    gp_exact_below_n = positive(key, value, 0);
  } else if (key == "gp.variant") {
    gp_variant = parse_enum(key, value, parse_sparse_variant);
  } else if (key == "gp.num_inducing") {
    gp_num_inducing = positive(key, value);
  } else if (key == "gp.objective") {
    gp_objective = parse_enum(key, value, parse_sparse_objective);
  } else if (key == "gp.restarts") {
    gp_restarts = positive(key, value);
  } else if (key == "gp.full_train_every") {
    gp_full_train_every = positive(key, value);
  } else if (key == "gp.freeze_inducing") {
    gp_freeze_inducing = to_bool(key, value);
  } else if (key == "acq.kind") {
    acq_kind = parse_enum(key, value, parse_acquisition_kind);
  } else if (key == "acq.delta") {
    acq_delta = to_double(key, value);
  } else if (key == "acq.budget") {
    acq_budget = positive(key, value);
  } else if (key == "embed.dim_low") {
    embed_dim_low = positive(key, value);
  } else if (key == "embed.seed") {
    embed_seed = to_u64(key, value);
  } else if (key == "embed.kind") {
    embed_kind = parse_enum(key, value, parse_embedding_kind);
  } else if (key == "sched.workers") {
    sched_workers = positive(key, value);
  } else if (key == "sched.budget") {
    sched_budget = positive(key, value, 0);
  } else if (key == "sched.wallclock_s") {
    sched_wallclock_s = to_double(key, value);
  } else if (key == "bench.name") {
    bench_name = parse_enum(key, value, parse_benchmark_name);
  } else if (key == "bench.dim") {
    bench_dim = positive(key, value);
  } else if (key == "bench.delay_lb_s") {
    bench_delay_lb_s = to_double(key, value);
  } else if (key == "bench.delay_ub_s") {
    bench_delay_ub_s = to_double(key, value);
  } else if (key == "bench.normalize_g") {
    bench_normalize_g = to_bool(key, value);
  } else if (key == "bench.lb") {
    bench_lb = to_double(key, value);
  } else if (key == "bench.ub") {
    bench_ub = to_double(key, value);
  } else if (key == "bench.effective_dim") {
    bench_effective_dim = positive(key, value);
  } else if (key == "bench.weights_seed") {
    bench_weights_seed = to_u64(key, value);
  } else if (key == "run.seed") {
    run_seed = to_u64(key, value);
  } else if (key == "run.mode") {
    if (value == "minimize")
      run_mode = RunMode::Minimize;
    else if (value == "maximize")
      run_mode = RunMode::Maximize;
    else
      bad_value(key, value, "minimize or maximize");
  } else if (key == "run.initial_design") {
    run_initial_design = positive(key, value);
  } else if (key == "run.out_dir") {
    if (value.empty()) bad_value(key, value, "a directory");
    run_out_dir = value;
  } else if (key == "run.checkpoint_every") {
    run_checkpoint_every = positive(key, value, 0);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (kernel_amplitude && !(*kernel_amplitude > 0)) fail("kernel.amplitude must be > 0");
  if (kernel_lengthscale && !(*kernel_lengthscale > 0)) fail("kernel.lengthscale must be > 0");
  if (!(acq_delta > 0 && acq_delta < 1)) fail("acq.delta must lie in (0, 1)");
  if (sched_wallclock_s < 0) fail("sched.wallclock_s must be >= 0");
  if (bench_delay_lb_s < 0 || bench_delay_ub_s < bench_delay_lb_s)
    fail("bench delays must satisfy 0 <= delay_lb_s <= delay_ub_s");
  if (bench_lb.has_value() != bench_ub.has_value()) fail("bench.lb and bench.ub must be set together");
  if (bench_lb && !(*bench_lb < *bench_ub)) fail("bench.lb must be < bench.ub");
  if (embed_kind == EmbeddingKind::Identity) {
    if (embed_dim_low != 0 && embed_dim_low != bench_dim)
      fail("embed.kind=identity requires embed.dim_low == bench.dim");
  } else if (embed_dim_low == 0) {
    fail("embed.dim_low is required for embed.kind=gaussian");
  } else if (embed_dim_low > bench_dim) {
    fail("embed.dim_low must not exceed bench.dim");
  }
  if (bench_name == BenchmarkName::Hartmann4 && bench_dim != 4) fail("hartmann4 needs bench.dim = 4");
  if (bench_name == BenchmarkName::SphereGeneral && bench_effective_dim > bench_dim)
    fail("bench.effective_dim must not exceed bench.dim");
  if ((bench_name == BenchmarkName::Zdt1Mod || bench_name == BenchmarkName::Zdt2Mod ||
       bench_name == BenchmarkName::Zdt3Mod) &&
      bench_dim < 2)
    fail("ZDT benchmarks need bench.dim >= 2");
}

int RunConfig::low_dim() const { return embed_dim_low == 0 ? bench_dim : embed_dim_low; }

int RunConfig::initial_design_size() const {
  return run_initial_design > 0 ? run_initial_design : std::max(2, low_dim() + 1);
}

std::uint64_t RunConfig::embedding_seed() const {
  return embed_seed ? *embed_seed : derive_seed(run_seed, 0x656d626564ULL);
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["kernel.family"] = to_string(kernel_family);
  kv["kernel.amplitude"] = opt(kernel_amplitude);
  kv["kernel.lengthscale"] = opt(kernel_lengthscale);
  kv["gp.exact_below_n"] = std::to_string(gp_exact_below_n);
  kv["gp.variant"] = to_string(gp_variant);
  kv["gp.num_inducing"] = std::to_string(gp_num_inducing);
  kv["gp.objective"] = to_string(gp_objective);
  kv["gp.restarts"] = std::to_string(gp_restarts);
  kv["gp.full_train_every"] = std::to_string(gp_full_train_every);
  kv["gp.freeze_inducing"] = gp_freeze_inducing ? "true" : "false";
  kv["acq.kind"] = to_string(acq_kind);
  kv["acq.delta"] = fmt(acq_delta);
  kv["acq.budget"] = std::to_string(acq_budget);
  kv["embed.dim_low"] = std::to_string(low_dim());
  kv["embed.seed"] = std::to_string(embedding_seed());
  kv["embed.kind"] = to_string(embed_kind);
  kv["sched.workers"] = std::to_string(sched_workers);
  kv["sched.budget"] = std::to_string(sched_budget);
  kv["sched.wallclock_s"] = fmt(sched_wallclock_s);
  kv["bench.name"] = to_string(bench_name);
  kv["bench.dim"] = std::to_string(bench_dim);
  kv["bench.delay_lb_s"] = fmt(bench_delay_lb_s);
  kv["bench.delay_ub_s"] = fmt(bench_delay_ub_s);
  kv["bench.normalize_g"] = bench_normalize_g ? "true" : "false";
  kv["bench.lb"] = opt(bench_lb);
  kv["bench.ub"] = opt(bench_ub);
  kv["bench.effective_dim"] = std::to_string(bench_effective_dim);
  kv["bench.weights_seed"] = std::to_string(bench_weights_seed);
  kv["run.seed"] = std::to_string(run_seed);
  kv["run.mode"] = run_mode == RunMode::Minimize ? "minimize" : "maximize";
  kv["run.initial_design"] = std::to_string(initial_design_size());
  kv["run.out_dir"] = run_out_dir;
  kv["run.checkpoint_every"] = std::to_string(run_checkpoint_every);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t RunConfig::resume_hash() const {
  std::istringstream in(canonical());
  std::string line;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  while (std::getline(in, line)) {
    if (line.rfind("sched.budget", 0) == 0 || line.rfind("sched.wallclock_s", 0) == 0 ||
        line.rfind("run.out_dir", 0) == 0 || line.rfind("run.checkpoint_every", 0) == 0)
      continue;
    for (unsigned char c : line + "\n") {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace s3bo
