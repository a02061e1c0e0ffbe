#include "s3bo/trace_io.hpp"

#include "s3bo/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>

namespace s3bo {

using nlohmann::json;

TraceEntry to_entry(const JobRecord& rec, int eval_index) {
  TraceEntry e;
  e.eval_index = eval_index;
  e.wall_ms = rec.complete_ms;
  e.job_id = rec.job_id;
  e.worker_id = rec.worker_id;
  e.task = rec.task;
  e.status = rec.status;
  e.submit_ms = rec.submit_ms;
  e.complete_ms = rec.complete_ms;
  e.z = rec.z;
  e.y = rec.y;
  if (std::isfinite(rec.best_so_far)) e.best_so_far = rec.best_so_far;
  e.refit_ms = rec.refit_ms;
  e.inducing_m = rec.inducing_m;
  return e;
}

std::string format_trace_line(const TraceEntry& e) {
  json j;
  j["eval_index"] = e.eval_index;
  j["wall_ms"] = e.wall_ms;
  j["job_id"] = e.job_id;
  j["worker_id"] = e.worker_id;
  j["task"] = to_string(e.task);
  j["status"] = to_string(e.status);
  j["submit_ms"] = e.submit_ms;
  j["complete_ms"] = e.complete_ms;
  j["z"] = std::vector<double>(e.z.data(), e.z.data() + e.z.size());
  j["y"] = e.y ? json(*e.y) : json(nullptr);
  j["best_so_far"] = e.best_so_far ? json(*e.best_so_far) : json(nullptr);
  j["refit_ms"] = e.refit_ms;
  j["inducing_m"] = e.inducing_m;
  return j.dump();
}

namespace {

JobStatus parse_status(const std::string& s) {
  for (JobStatus st : {JobStatus::Pending, JobStatus::Hallucinated, JobStatus::Complete,
                       JobStatus::Failed})
    if (to_string(st) == s) return st;
  throw InputError("unknown status '" + s + "'");
}

std::optional<double> opt_number(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

TraceEntry parse_trace_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    TraceEntry e;
    e.eval_index = j.at("eval_index").get<int>();
    e.wall_ms = j.at("wall_ms").get<double>();
    e.job_id = j.at("job_id").get<int>();
    e.worker_id = j.at("worker_id").get<int>();
    e.task = parse_task_kind(j.at("task").get<std::string>());
    e.status = parse_status(j.at("status").get<std::string>());
    e.submit_ms = j.at("submit_ms").get<double>();
    e.complete_ms = j.at("complete_ms").get<double>();
    const auto z = j.at("z").get<std::vector<double>>();
    e.z = Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size()));
    e.y = opt_number(j, "y");
    e.best_so_far = opt_number(j, "best_so_far");
    e.refit_ms = j.at("refit_ms").get<double>();
    e.inducing_m = j.at("inducing_m").get<Eigen::Index>();
    if (e.status == JobStatus::Complete && !e.y) throw InputError("complete record without y");
    return e;
  } catch (const json::exception& ex) {
    throw InputError(std::string("malformed trace line: ") + ex.what());
  }
}

std::string canonical_trace_line(const std::string& line) {
  TraceEntry e = parse_trace_line(line);
  e.wall_ms = e.submit_ms = e.complete_ms = e.refit_ms = 0.0;
  return format_trace_line(e);
}

TraceFile read_trace(const std::string& path, std::ostream* warnings) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read trace file '" + path + "'");
  TraceFile out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.entries.push_back(parse_trace_line(line));
    } catch (const InputError& e) {
      ++out.skipped;
      if (warnings) *warnings << "warning: " << path << ":" << line_no << ": " << e.what() << "\n";
    }
  }
  return out;
}

}  // namespace s3bo
