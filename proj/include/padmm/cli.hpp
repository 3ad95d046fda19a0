#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "padmm/solver.hpp"

namespace padmm {

// Exit codes: 0 optimal, 2 iteration limit, 3 time limit, 4 solver error.
// Argument and input errors use 1.
int exit_code_for(SolveStatus s);

/// Fixed column order:
/// k,epoch,time_s,gap_rel,pinf_rel,dinf_rel,merit,feas,eps_y,eps_z,restarted
std::string records_csv(const std::vector<MetricRecord>& records);

std::string report_json_string(const LpInstance& lp, const SolverConfig& config,
                               const LpSolveResult& result,
                               const std::string& instance_path);

std::string solution_text(const LpInstance& lp, const LpSolveResult& result);

struct SolveOutputs {
  std::string json_path;
  std::string csv_path;
  std::string solution_path;
};

/// Parses, solves and writes the requested reports. `verify` additionally
/// cross-checks the objective against the enumeration oracle on instances
/// small enough for it.
int cmd_solve(const std::string& path, SolverConfig config,
              const SolveOutputs& outputs, bool verify, std::ostream& log);

struct BenchRecord {
  std::string instance;
  std::string variant;
  std::string status;
  std::size_t iterations = 0;
  double time_s = 0.0;
  double objective = 0.0;
  double measure = 0.0;
};

std::string bench_records_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_bench_records_csv(std::istream& in);

/// Fraction of instances each variant finishes within tau times the fastest
/// variant's time, per tau on a fixed grid. Instances a variant leaves
/// unsolved never count for it; instances nobody solves count for nobody.
std::string performance_profile_csv(const std::vector<BenchRecord>& records,
                                    const std::vector<std::string>& variants,
                                    const std::vector<double>& taus);

std::vector<double> default_tau_grid();

struct BenchOptions {
  std::vector<std::string> variants = {"dr", "edr", "repr"};
  std::string out_dir = "bench_out";
  std::size_t jobs = 1;
};

int cmd_bench(const std::string& dir, const SolverConfig& base,
              const BenchOptions& options, std::ostream& log);

/// Regenerates the performance profile from a stored bench records file.
int cmd_profile(const std::string& records_path, const std::string& out_path,
                std::ostream& log);

struct GenOptions {
  std::size_t count = 5;
  std::size_t n = 40;
  std::size_t m1 = 8;
  std::size_t m2 = 12;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool gzip = false;
};

/// Writes feasible random instances (with interior structure suitable for
/// benchmarking) as MPS files.
int cmd_gen(const GenOptions& options, std::ostream& log);

}  // namespace padmm
