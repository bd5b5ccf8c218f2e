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

// Benchmark harness behind the `goldvi` executable.
//
//   goldvi run      one method on one problem, CSV trace
//   goldvi compare  several methods on the same problem, one CSV each + merged
//   goldvi certify  descent-certificate audit of alg1/alg2, JSON report
//   goldvi gen      problem snapshot as JSON
//
// Settings come from a key=value file (--config), then GOLDVI_<KEY>
// environment variables, then command-line flags; later sources win.

#ifndef GOLDVI_CLI_HPP_
#define GOLDVI_CLI_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "goldvi/problems.hpp"
#include "goldvi/solvers.hpp"

namespace goldvi {

// Exit statuses.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitCertificateViolated = 3;

inline constexpr const char* kTraceHeader =
    "iter,op_evals,prox_evals,residual,lambda,phi,flg,wall_nanos";

using KeyValues = std::map<std::string, std::string>;

struct ConfigKey {
  const char* name;
  const char* help;
  bool is_flag;
};

// Every recognized setting; flag names are "--" + name, environment names are
// GOLDVI_ + upper-cased name with '-' replaced by '_'.
const std::vector<ConfigKey>& config_keys();
std::string env_name(const std::string& key);

struct RunConfig {
  Family family = Family::kAffine;
  FamilyParams params;
  std::string problem_file;  // snapshot JSON; overrides family generation
  Method method = Method::kAlg2;
  std::vector<Method> methods;
  std::uint64_t max_evals = 20000;
  double tolerance = 1e-6;
  SolverOptions<double> options;
  std::string out;
  bool record_wall_time = false;
  double certificate_tolerance = 1e-7;
  int probes = 20;
};

// key = value lines; '#' starts a comment. Unknown keys are errors.
KeyValues parse_config_text(const std::string& text);
KeyValues load_config_file(const std::string& path);
// Values of GOLDVI_* variables for the known keys.
KeyValues environment_overrides();
RunConfig config_from_values(const KeyValues& values);

// CSV traces: header kTraceHeader, %.17g reals, LF line endings.
void write_trace_csv(std::ostream& out, const std::vector<TracePoint<double>>& trace);
std::vector<TracePoint<double>> read_trace_csv(std::istream& in);

using NamedTrace = std::pair<std::string, std::vector<TracePoint<double>>>;
// Long format with a leading `method` column.
void write_merged_csv(std::ostream& out, const std::vector<NamedTrace>& traces);
std::vector<NamedTrace> read_merged_csv(std::istream& in);

std::string format_real(double v);

BenchmarkInstance load_instance(const RunConfig& config);
SolveConfig<double> solve_config(const RunConfig& config);
int exit_status(RunStatus status);

Json run_metadata(const BenchmarkInstance& inst, const RunConfig& config,
                  const RunRecord<double>& record);

// Certificate audit of one run; throws on invalid method.
struct CertifyResult {
  RunRecord<double> record;
  CertificateReport<double> report;
  bool passed = false;
};
CertifyResult certify(const BenchmarkInstance& inst, const RunConfig& config);
Json certificate_json(const BenchmarkInstance& inst, const RunConfig& config,
                      const CertifyResult& result);

// Entry point of the executable. Diagnostics go to `err`; `out` receives data
// written to "-".
int run_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace goldvi

#endif  // GOLDVI_CLI_HPP_
