#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "padmm/cli.hpp"

namespace {

// --restart accepts none, adaptive, or period:N
void apply_restart_flag(padmm::SolverConfig& cfg, const std::string& value) {
  using padmm::RestartKind;
  if (value == "none") {
    cfg.restart.kind = RestartKind::none;
  } else if (value == "adaptive") {
    cfg.restart.kind = RestartKind::adaptive_decay;
  } else if (value.rfind("period:", 0) == 0) {
    cfg.restart.kind = RestartKind::fixed_period;
    cfg.restart.period = std::stoull(value.substr(7));
  } else {
    throw CLI::ValidationError("--restart expects none, adaptive, or period:N");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order LP solver built on relaxed two-block splitting with "
               "semi-proximal terms, averaged candidates and merit-driven restarts"};
  app.require_subcommand(1);

  // solve ---------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "Solve a single MPS instance");
  std::string path, variant = "repr", restart_flag, candidate_flag, restart_to = "average";
  padmm::SolveOutputs outputs;
  bool verify = false;
  double rho = -1.0;
  padmm::SolverConfig cfg;
  solve->add_option("path", path, "MPS file (plain or gzip)")->required();
  solve->add_option("--variant", variant, "pr|dr|epr|edr|repr|redr|custom");
  solve->add_option("--sigma", cfg.sigma, "penalty parameter (default 1.0)");
  solve->add_option("--rho", rho, "relaxation factor in (0,2], custom variant");
  solve->add_option("--tol", cfg.tol, "optimality tolerance (default 1e-8)");
  solve->add_option("--max-iters", cfg.max_iters, "iteration budget");
  solve->add_option("--time-limit", cfg.time_limit_s, "seconds (default 3600)");
  solve->add_option("--restart", restart_flag, "none|adaptive|period:N");
  solve->add_option("--restart-to", restart_to, "average|last");
  solve->add_option("--candidate", candidate_flag, "pointwise|ergodic");
  solve->add_option("--log-every", cfg.log_every, "metric cadence (default 10)");
  solve->add_option("--seed", cfg.seed, "seed for the spectral estimate");
  solve->add_flag("--deterministic,!--no-deterministic", cfg.deterministic,
                  "forbid nondeterministic internals (default on)");
  solve->add_flag("--verify", verify, "cross-check against the enumeration oracle");
  solve->add_flag("--measure-clamped-x", cfg.measure_clamped_x,
                  "clamp x into the box before measuring optimality");
  solve->add_option("--json", outputs.json_path, "write the run report here");
  solve->add_option("--csv", outputs.csv_path, "write the iteration log here");
  solve->add_option("--solution", outputs.solution_path, "write the solution here");

  // bench ---------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Sweep a directory of MPS instances");
  std::string bench_dir;
  padmm::BenchOptions bench_opts;
  padmm::SolverConfig bench_cfg;
  std::string bench_variants = "dr,edr,repr";
  bench->add_option("dir", bench_dir, "directory of .mps/.mps.gz files")->required();
  bench->add_option("--variants", bench_variants, "comma list (default dr,edr,repr)");
  bench->add_option("--out", bench_opts.out_dir, "output directory");
  bench->add_option("--jobs", bench_opts.jobs, "parallel workers (default 1)");
  bench->add_option("--sigma", bench_cfg.sigma, "penalty parameter");
  bench->add_option("--tol", bench_cfg.tol, "optimality tolerance");
  bench->add_option("--max-iters", bench_cfg.max_iters, "iteration budget");
  bench->add_option("--time-limit", bench_cfg.time_limit_s, "per-solve seconds");
  bench->add_option("--log-every", bench_cfg.log_every, "metric cadence");
  bench->add_option("--seed", bench_cfg.seed, "seed for the spectral estimate");

  // profile ---------------------------------------------------------------
  auto* profile = app.add_subcommand("profile", "Rebuild a profile from bench records");
  std::string records_path, profile_out = "profile.csv";
  profile->add_option("records", records_path, "records.csv from bench")->required();
  profile->add_option("--out", profile_out, "output path (default profile.csv)");

  // gen -------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate feasible random MPS instances");
  padmm::GenOptions gen_opts;
  gen->add_option("--count", gen_opts.count, "number of instances (default 5)");
  gen->add_option("--n", gen_opts.n, "variables (default 40)");
  gen->add_option("--m1", gen_opts.m1, "equality rows (default 8)");
  gen->add_option("--m2", gen_opts.m2, "inequality rows (default 12)");
  gen->add_option("--seed", gen_opts.seed, "base seed");
  gen->add_option("--out", gen_opts.out_dir, "output directory");
  gen->add_flag("--gzip", gen_opts.gzip, "write .mps.gz");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      cfg.variant = padmm::variant_from_string(variant);
      cfg.apply_variant_defaults();
      if (rho > 0.0) cfg.rho = rho;
      if (!restart_flag.empty()) apply_restart_flag(cfg, restart_flag);
      if (!candidate_flag.empty())
        cfg.candidate = candidate_flag == "ergodic" ? padmm::CandidateKind::ergodic
                                                    : padmm::CandidateKind::pointwise;
      cfg.restart_to = restart_to == "last" ? padmm::RestartTarget::last
                                            : padmm::RestartTarget::average;
      return padmm::cmd_solve(path, cfg, outputs, verify, std::cout);
    }
    if (bench->parsed()) {
      bench_opts.variants.clear();
      std::string token;
      std::istringstream vs(bench_variants);
      while (std::getline(vs, token, ','))
        if (!token.empty()) bench_opts.variants.push_back(token);
      return padmm::cmd_bench(bench_dir, bench_cfg, bench_opts, std::cout);
    }
    if (profile->parsed())
      return padmm::cmd_profile(records_path, profile_out, std::cout);
    if (gen->parsed()) return padmm::cmd_gen(gen_opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
