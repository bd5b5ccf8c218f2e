// Copyright 2026 The goldvi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "goldvi/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

namespace goldvi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool is_known_key(const std::string& key) {
  for (const auto& k : config_keys()) {
    if (key == k.name) return true;
  }
  return false;
}

double to_real(const std::string& key, const std::string& v) {
  double d = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, d);
  if (v.empty() || ec != std::errc() || ptr != end) {
    throw InvalidInputError("invalid number for " + key + ": '" + v + "'");
  }
  return d;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  const auto res = std::from_chars(first, last, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != last) {
    throw InvalidInputError("invalid integer for " + key + ": '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw InvalidInputError("invalid boolean for " + key + ": '" + v + "'");
}

Method method_or_throw(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) {
    throw InvalidInputError("unknown method '" + name +
                            "'; valid methods: " + method_names_joined());
  }
  return *m;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto* last = v.data() + v.size();
  const auto res = std::from_chars(v.data(), last, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != last) {
    throw InvalidInputError("invalid integer for " + key + ": '" + v + "'");
  }
  return out;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"problem", "problem family", false},
      {"problem-file", "problem snapshot JSON (from gen)", false},
      {"n", "dimension / number of firms, states or columns", false},
      {"m", "samples, actions or rows", false},
      {"branching", "Garnet branching factor", false},
      {"discount", "MDP discount factor", false},
      {"scenario", "Nash-Cournot scenario (i or ii)", false},
      {"seed", "problem seed", false},
      {"method", "solver", false},
      {"methods", "comma-separated solvers (compare)", false},
      {"max-evals", "operator evaluation budget", false},
      {"tol", "residual tolerance", false},
      {"phi", "anchor ratio of agraal and alg1", false},
      {"alpha", "small anchor ratio of alg2", false},
      {"phi-bar", "large anchor ratio of alg2", false},
      {"lambda0", "initial stepsize", false},
      {"lambda-bar", "stepsize cap", false},
      {"stepsize", "fixed stepsize of pgd/eg/prjref/graal", false},
      {"alg1-rule", "alg1 switching rule (near-min or stall)", false},
      {"out", "output path ('-' for stdout; directory for compare)", false},
      {"cert-tol", "certificate tolerance", false},
      {"probes", "certificate probe count", false},
      {"record-wall-time", "fill the wall_nanos column", true},
  };
  return keys;
}

std::string env_name(const std::string& key) {
  std::string out = "GOLDVI_";
  for (char c : key) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInputError("config line " + std::to_string(lineno) +
                              ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!is_known_key(key)) {
      throw InvalidInputError("config line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

KeyValues environment_overrides() {
  KeyValues kv;
  for (const auto& k : config_keys()) {
    if (const char* v = std::getenv(env_name(k.name).c_str())) kv[k.name] = v;
  }
  return kv;
}

RunConfig config_from_values(const KeyValues& values) {
  RunConfig c;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("problem")) {
    const auto f = parse_family(*v);
    if (!f) {
      throw InvalidInputError("unknown problem '" + *v +
                              "'; valid problems: " + family_names_joined());
    }
    c.family = *f;
  }
  if (const auto* v = get("problem-file")) c.problem_file = *v;
  if (const auto* v = get("n")) c.params.n = to_int("n", *v);
  if (const auto* v = get("m")) c.params.m = to_int("m", *v);
  if (const auto* v = get("branching")) c.params.branching = to_int("branching", *v);
  if (c.params.n < 0 || c.params.m < 0 || c.params.branching < 0) {
    throw InvalidInputError("sizes must be nonnegative");
  }
  if (const auto* v = get("discount")) c.params.discount = to_real("discount", *v);
  if (const auto* v = get("scenario")) {
    if (*v == "i" || *v == "1") {
      c.params.scenario = NashScenario::kI;
    } else if (*v == "ii" || *v == "2") {
      c.params.scenario = NashScenario::kII;
    } else {
      throw InvalidInputError("scenario must be i or ii");
    }
  }
  if (const auto* v = get("seed")) c.params.seed = to_unsigned("seed", *v);
  if (const auto* v = get("method")) c.method = method_or_throw(*v);
  if (const auto* v = get("methods")) {
    for (const auto& name : split(*v, ',')) {
      c.methods.push_back(method_or_throw(trim(name)));
    }
  }
  if (const auto* v = get("max-evals")) c.max_evals = to_unsigned("max-evals", *v);
  if (const auto* v = get("tol")) c.tolerance = to_real("tol", *v);
  if (!(c.tolerance > 0)) throw InvalidInputError("tol must be > 0");
  if (const auto* v = get("phi")) c.options.phi = to_real("phi", *v);
  if (const auto* v = get("alpha")) c.options.alpha = to_real("alpha", *v);
  if (const auto* v = get("phi-bar")) c.options.phi_bar = to_real("phi-bar", *v);
  if (const auto* v = get("lambda0")) c.options.lambda0 = to_real("lambda0", *v);
  if (const auto* v = get("lambda-bar")) c.options.lambda_bar = to_real("lambda-bar", *v);
  if (const auto* v = get("stepsize")) {
    c.options.fixed_stepsize = to_real("stepsize", *v);
    if (!(*c.options.fixed_stepsize > 0)) {
      throw InvalidInputError("stepsize must be > 0");
    }
  }
  if (const auto* v = get("alg1-rule")) {
    if (*v == "near-min") {
      c.options.alg1_rule = Alg1Rule::kNearMin;
    } else if (*v == "stall") {
      c.options.alg1_rule = Alg1Rule::kStall;
    } else {
      throw InvalidInputError("alg1-rule must be near-min or stall");
    }
  }
  if (const auto* v = get("out")) c.out = *v;
  if (const auto* v = get("cert-tol")) {
    c.certificate_tolerance = to_real("cert-tol", *v);
    if (!(c.certificate_tolerance >= 0)) {
      throw InvalidInputError("cert-tol must be >= 0");
    }
  }
  if (const auto* v = get("probes")) {
    const auto p = to_int("probes", *v);
    if (p < 1) throw InvalidInputError("probes must be >= 1");
    c.probes = static_cast<int>(p);
  }
  if (const auto* v = get("record-wall-time")) {
    c.record_wall_time = to_bool("record-wall-time", *v);
  }
  return c;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_row(std::ostream& out, const TracePoint<double>& r) {
  out << r.iteration << ',' << r.op_evals << ',' << r.prox_evals << ','
      << format_real(r.residual) << ',' << format_real(r.lambda) << ','
      << format_real(r.phi) << ',' << r.flg << ',' << r.wall_nanos << '\n';
}

TracePoint<double> parse_row(const std::vector<std::string>& f, std::size_t at,
                             int lineno) {
  if (f.size() != at + 8) {
    throw InvalidInputError("trace line " + std::to_string(lineno) +
                            ": wrong field count");
  }
  TracePoint<double> r;
  r.iteration = to_int("iter", f[at]);
  r.op_evals = to_unsigned("op_evals", f[at + 1]);
  r.prox_evals = to_unsigned("prox_evals", f[at + 2]);
  r.residual = to_real("residual", f[at + 3]);
  r.lambda = to_real("lambda", f[at + 4]);
  r.phi = to_real("phi", f[at + 5]);
  r.flg = static_cast<int>(to_int("flg", f[at + 6]));
  r.wall_nanos = to_int("wall_nanos", f[at + 7]);
  return r;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TracePoint<double>>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) write_row(out, r);
}

std::vector<TracePoint<double>> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw InvalidInputError("trace: missing or unexpected header");
  }
  std::vector<TracePoint<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    rows.push_back(parse_row(split(line, ','), 0, lineno));
  }
  return rows;
}

void write_merged_csv(std::ostream& out, const std::vector<NamedTrace>& traces) {
  out << "method," << kTraceHeader << '\n';
  for (const auto& [name, trace] : traces) {
    for (const auto& r : trace) {
      out << name << ',';
      write_row(out, r);
    }
  }
}

std::vector<NamedTrace> read_merged_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != std::string("method,") + kTraceHeader) {
    throw InvalidInputError("merged trace: missing or unexpected header");
  }
  std::vector<NamedTrace> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.empty()) continue;
    if (out.empty() || out.back().first != fields[0]) {
      out.emplace_back(fields[0], std::vector<TracePoint<double>>{});
    }
    out.back().second.push_back(parse_row(fields, 1, lineno));
  }
  return out;
}

// ---------------------------------------------------------------------------

BenchmarkInstance load_instance(const RunConfig& config) {
  if (!config.problem_file.empty()) {
    std::ifstream in(config.problem_file);
    if (!in) throw InvalidInputError("cannot read " + config.problem_file);
    Json j;
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw InvalidInputError("invalid snapshot " + config.problem_file + ": " +
                              e.what());
    }
    return instance_from_snapshot(j);
  }
  return make_instance(config.family, config.params);
}

SolveConfig<double> solve_config(const RunConfig& config) {
  SolveConfig<double> s;
  s.max_operator_evals = config.max_evals;
  s.tolerance = config.tolerance;
  s.seed = config.params.seed;
  s.options = config.options;
  s.record_wall_time = config.record_wall_time;
  return s;
}

int exit_status(RunStatus status) {
  return status == RunStatus::kConverged ? kExitConverged : kExitBudget;
}

Json run_metadata(const BenchmarkInstance& inst, const RunConfig& config,
                  const RunRecord<double>& record) {
  return Json{
      {"problem", std::string(family_name(inst.family))},
      {"problem_hash", hash_hex(inst.hash())},
      {"seed", inst.problem.seed},
      {"method", std::string(method_name(record.method))},
      {"status", record.status == RunStatus::kConverged ? "converged"
                                                         : "budget_exhausted"},
      {"iterations", record.accepted_iterations},
      {"rejected_steps", record.rejected_steps},
      {"operator_evals", record.counter.operator_evals},
      {"prox_evals", record.counter.prox_evals},
      {"final_residual",
       record.trace.empty() ? Json(nullptr) : Json(record.trace.back().residual)},
      {"tolerance", config.tolerance},
      {"max_evals", config.max_evals},
  };
}

CertifyResult certify(const BenchmarkInstance& inst, const RunConfig& config) {
  if (config.method != Method::kAlg1 && config.method != Method::kAlg2) {
    throw InvalidInputError("certify requires method alg1 or alg2");
  }
  Rng rng(config.params.seed ^ 0x9e3779b97f4a7c15ULL);
  const double spread = 1 + inst.x0.lpNorm<Eigen::Infinity>();
  auto probes = make_probe_set(inst.problem, inst.x0, spread, config.probes, rng,
                               inst.reference);
  CertificateAuditor<double> auditor(inst.problem, std::move(probes),
                                     config.certificate_tolerance);
  SolveConfig<double> sc = solve_config(config);
  sc.on_window = [&auditor](const DescentWindow<double>& w) { auditor.observe(w); };
  CertifyResult result;
  result.record = solve(inst.problem, inst.x0, config.method, sc);
  result.report = auditor.report();
  result.passed = auditor.passed();
  return result;
}

Json certificate_json(const BenchmarkInstance& inst, const RunConfig& config,
                      const CertifyResult& result) {
  const auto& r = result.report;
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
  };
  return Json{
      {"run", run_metadata(inst, config, result.record)},
      {"monotone", inst.problem.monotone},
      {"passed", result.passed},
      {"tolerance", config.certificate_tolerance},
      {"probes", config.probes},
      {"iterations", r.iterations},
      {"violations", r.violations},
      {"min_scaled_slack", finite_or_null(r.min_scaled_slack)},
      {"min_slack", finite_or_null(r.min_slack)},
      {"worst_iteration", r.worst_iteration},
      {"cumulative_slack", r.cumulative_slack},
      {"D_estimate", r.D_estimate},
      {"M_estimate", finite_or_null(r.M_estimate)},
      {"summed_bound_slack", r.summed_bound_slack},
  };
}

// ---------------------------------------------------------------------------

namespace {

// Opens `path` for writing ("-" selects `out`).
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
      stream_ = &out;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidInputError("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  void close(const std::string& path) {
    if (file_) {
      file_->close();
      if (!*file_) throw InvalidInputError("failed writing " + path);
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInputError("cannot write " + path);
  f << j.dump(2) << '\n';
}

int cmd_run(const RunConfig& config, std::ostream& out) {
  const BenchmarkInstance inst = load_instance(config);
  const RunRecord<double> record =
      solve(inst.problem, inst.x0, config.method, solve_config(config));
  Sink sink(config.out, out);
  write_trace_csv(sink.stream(), record.trace);
  sink.close(config.out);
  if (!config.out.empty() && config.out != "-") {
    write_json_file(config.out + ".meta.json", run_metadata(inst, config, record));
  }
  return exit_status(record.status);
}

int cmd_compare(const RunConfig& config, std::ostream& err) {
  if (config.methods.size() < 2) {
    throw InvalidInputError("compare needs at least two methods (--methods a,b)");
  }
  if (config.out.empty() || config.out == "-") {
    throw InvalidInputError("compare needs an output directory (--out DIR)");
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec || !fs::is_directory(config.out)) {
    throw InvalidInputError("cannot create directory " + config.out);
  }
  const BenchmarkInstance inst = load_instance(config);
  std::vector<NamedTrace> merged;
  Json summary = Json::array();
  bool all_converged = true;
  for (Method m : config.methods) {
    const std::string name(method_name(m));
    RunRecord<double> record;
    try {
      record = solve(inst.problem, inst.x0, m, solve_config(config));
    } catch (const NumericError& e) {
      err << "goldvi: " << name << ": " << e.what() << '\n';
      all_converged = false;
      summary.push_back(Json{{"method", name}, {"status", "diverged"},
                             {"problem_hash", hash_hex(inst.hash())},
                             {"error", e.what()}});
      continue;
    }
    const std::string path = (fs::path(config.out) / (name + ".csv")).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInputError("cannot write " + path);
    write_trace_csv(f, record.trace);
    f.close();
    const Json meta = run_metadata(inst, config, record);
    write_json_file(path + ".meta.json", meta);
    summary.push_back(meta);
    all_converged = all_converged && record.status == RunStatus::kConverged;
    merged.emplace_back(name, std::move(record.trace));
  }
  const std::string merged_path = (fs::path(config.out) / "merged.csv").string();
  std::ofstream f(merged_path, std::ios::binary);
  if (!f) throw InvalidInputError("cannot write " + merged_path);
  write_merged_csv(f, merged);
  write_json_file((fs::path(config.out) / "summary.json").string(), summary);
  return all_converged ? kExitConverged : kExitBudget;
}

int cmd_certify(const RunConfig& config, std::ostream& out) {
  const BenchmarkInstance inst = load_instance(config);
  const CertifyResult result = certify(inst, config);
  Sink sink(config.out, out);
  sink.stream() << certificate_json(inst, config, result).dump(2) << '\n';
  sink.close(config.out);
  return result.passed ? kExitConverged : kExitCertificateViolated;
}

int cmd_gen(const RunConfig& config, std::ostream& out) {
  const BenchmarkInstance inst = load_instance(config);
  Sink sink(config.out, out);
  sink.stream() << inst.snapshot.dump() << '\n';
  sink.close(config.out);
  return kExitConverged;
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"goldvi: golden-ratio solvers for monotone variational inequalities"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value settings file");

  struct Bound {
    std::string key;
    std::string value;
    bool is_flag = false;
    bool flag_value = false;
    CLI::Option* option = nullptr;
  };
  const char* names[] = {"run", "compare", "certify", "gen"};
  const char* help[] = {"run one method and write its CSV trace",
                        "run several methods on the same problem",
                        "audit the descent certificate of alg1/alg2",
                        "write a problem snapshot as JSON"};
  std::vector<std::unique_ptr<Bound>> bound;
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "key=value settings file");
    for (const auto& k : config_keys()) {
      auto b = std::make_unique<Bound>();
      b->key = k.name;
      b->is_flag = k.is_flag;
      const std::string flag = std::string("--") + k.name;
      if (k.is_flag) {
        b->option = sub->add_flag(flag, b->flag_value, k.help);
      } else {
        b->option = sub->add_option(flag, b->value, k.help);
      }
      bound.push_back(std::move(b));
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitConverged : kExitError;
  }

  try {
    KeyValues values;
    if (!config_path.empty()) values = load_config_file(config_path);
    for (auto& [k, v] : environment_overrides()) values[k] = v;
    for (const auto& b : bound) {
      if (b->option->count() == 0) continue;
      values[b->key] = b->is_flag ? (b->flag_value ? "true" : "false") : b->value;
    }
    const RunConfig config = config_from_values(values);
    if (subs[0]->parsed()) return cmd_run(config, out);
    if (subs[1]->parsed()) return cmd_compare(config, err);
    if (subs[2]->parsed()) return cmd_certify(config, out);
    return cmd_gen(config, out);
  } catch (const std::exception& e) {
    err << "goldvi: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace goldvi
