#include "padmm/cli.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "padmm/mps.hpp"
#include "padmm/oracle.hpp"
#include "padmm/testgen.hpp"

namespace padmm {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return 0;
    case SolveStatus::iteration_limit: return 2;
    case SolveStatus::time_limit: return 3;
    case SolveStatus::error: return 4;
  }
  return 4;
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json config_json(const SolverConfig& c) {
  json j;
  j["variant"] = to_string(c.variant);
  j["rho"] = c.rho;
  j["sigma"] = c.sigma;
  j["tol"] = c.tol;
  j["max_iters"] = c.max_iters;
  j["time_limit_s"] = c.time_limit_s;
  j["candidate"] = c.candidate == CandidateKind::ergodic ? "ergodic" : "pointwise";
  j["restart"] = {{"kind", c.restart.kind == RestartKind::none
                               ? "none"
                               : c.restart.kind == RestartKind::fixed_period
                                     ? "fixed_period"
                                     : "adaptive_decay"},
                  {"period", c.restart.period},
                  {"sufficient_factor", c.restart.sufficient_factor},
                  {"necessary_factor", c.restart.necessary_factor},
                  {"artificial_cap", c.restart.artificial_cap},
                  {"min_epoch_len", c.restart.min_epoch_len}};
  j["restart_to"] = c.restart_to == RestartTarget::average ? "average" : "last";
  j["deterministic"] = c.deterministic;
  j["seed"] = c.seed;
  j["log_every"] = c.log_every;
  j["measure_clamped_x"] = c.measure_clamped_x;
  return j;
}

}  // namespace

std::string records_csv(const std::vector<MetricRecord>& records) {
  std::ostringstream out;
  out << "k,epoch,time_s,gap_rel,pinf_rel,dinf_rel,merit,feas,eps_y,eps_z,restarted\n";
  for (const auto& r : records) {
    out << r.k << ',' << r.epoch << ',' << fmt(r.time_s) << ',' << fmt(r.gap_rel)
        << ',' << fmt(r.pinf_rel) << ',' << fmt(r.dinf_rel) << ',' << fmt(r.merit)
        << ',' << fmt(r.feas) << ',' << fmt(r.eps_y) << ',' << fmt(r.eps_z) << ','
        << (r.restarted ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string report_json_string(const LpInstance& lp, const SolverConfig& config,
                               const LpSolveResult& result,
                               const std::string& instance_path) {
  json j;
  j["schema_version"] = 1;
  j["instance"] = {{"path", instance_path},
                   {"name", lp.name},
                   {"vars", lp.num_vars()},
                   {"eq_rows", lp.num_eq()},
                   {"ge_rows", lp.num_ge()}};
  j["config"] = config_json(config);
  json res;
  res["status"] = to_string(result.status);
  res["iterations"] = result.iterations;
  res["restarts"] = result.restarts;
  res["solve_time_s"] = result.solve_time_s;
  res["objective"] = result.objective;
  res["dual_objective"] =
      std::isfinite(result.dual_objective) ? json(result.dual_objective) : json("-inf");
  res["lambda1"] = result.lambda1;
  res["clamp_magnitude"] = result.clamp_magnitude;
  res["clamp_events"] = result.clamp_events;
  json opt;
  opt["measure"] = std::isfinite(result.final_measure) ? json(result.final_measure)
                                                       : json("inf");
  opt["gap_rel"] = result.final_parts.gap_rel;
  opt["gap_infinite"] = result.final_parts.gap_infinite;
  opt["pinf_rel"] = result.final_parts.pinf_rel;
  opt["dinf_rel"] = result.final_parts.dinf_rel;
  res["optimality"] = opt;
  res["merit"] =
      std::isfinite(result.final_merit) ? json(result.final_merit) : json("inf");
  if (!result.message.empty()) res["message"] = result.message;
  j["result"] = res;
  j["solution"] = {{"x", result.x}, {"y", result.y}, {"z", result.z}};
  return j.dump(2);
}

std::string solution_text(const LpInstance& lp, const LpSolveResult& result) {
  std::ostringstream out;
  out << "status " << to_string(result.status) << "\n";
  out << "objective " << fmt(result.objective) << "\n";
  out << "dual_objective " << fmt(result.dual_objective) << "\n";
  auto name = [&](const std::vector<std::string>& names, std::size_t i,
                  const char* prefix) {
    if (i < names.size() && !names[i].empty()) return names[i];
    return std::string(prefix) + std::to_string(i);
  };
  out << "primal\n";
  for (std::size_t j = 0; j < result.x.size(); ++j)
    out << "  " << name(lp.col_names, j, "C") << " " << fmt(result.x[j]) << "\n";
  out << "dual\n";
  for (std::size_t i = 0; i < result.y.size(); ++i) {
    const bool eq = i < lp.num_eq();
    out << "  "
        << name(eq ? lp.row_names_eq : lp.row_names_ge, eq ? i : i - lp.num_eq(),
                eq ? "E" : "G")
        << " " << fmt(result.y[i]) << "\n";
  }
  out << "reduced_cost\n";
  for (std::size_t j = 0; j < result.z.size(); ++j)
    out << "  " << name(lp.col_names, j, "C") << " " << fmt(result.z[j]) << "\n";
  return out.str();
}

namespace {

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

int cmd_solve(const std::string& path, SolverConfig config,
              const SolveOutputs& outputs, bool verify, std::ostream& log) {
  LpInstance lp;
  try {
    lp = parse_mps_file(path);
  } catch (const std::exception& e) {
    log << "parse error: " << e.what() << "\n";
    return 1;
  }

  LpSolveResult result;
  try {
    result = solve_lp(lp, config);
  } catch (const std::exception& e) {
    log << "solver error: " << e.what() << "\n";
    return 4;
  }

  log << lp.name << ": " << to_string(result.status) << " after "
      << result.iterations << " iterations (" << fmt(result.solve_time_s)
      << " s), objective " << fmt(result.objective) << ", measure "
      << fmt(result.final_measure) << ", restarts " << result.restarts << "\n";

  if (verify) {
    if (lp.num_vars() <= 12 && lp.num_rows() <= 12) {
      const TinyLpSolution oracle = solve_tiny_lp(lp);
      if (oracle.status == TinyLpStatus::optimal) {
        const double diff = std::abs(oracle.value - result.objective) /
                            (1.0 + std::abs(oracle.value));
        log << "verify: enumeration objective " << fmt(oracle.value)
            << ", relative difference " << fmt(diff) << "\n";
        if (diff > 1e-6) {
          log << "verify: MISMATCH beyond 1e-6\n";
          return 4;
        }
      } else {
        log << "verify: enumeration status "
            << (oracle.status == TinyLpStatus::infeasible ? "infeasible" : "unbounded")
            << "\n";
      }
    } else {
      log << "verify: instance too large for the enumeration oracle, skipped\n";
    }
  }

  try {
    if (!outputs.json_path.empty())
      write_file_atomic(outputs.json_path,
                        report_json_string(lp, config, result, path));
    if (!outputs.csv_path.empty())
      write_file_atomic(outputs.csv_path, records_csv(result.records));
    if (!outputs.solution_path.empty())
      write_file_atomic(outputs.solution_path, solution_text(lp, result));
  } catch (const std::exception& e) {
    log << "output error: " << e.what() << "\n";
    return 1;
  }
  return exit_code_for(result.status);
}

std::string bench_records_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "instance,variant,status,iterations,time_s,objective,measure\n";
  for (const auto& r : records)
    out << r.instance << ',' << r.variant << ',' << r.status << ',' << r.iterations
        << ',' << fmt(r.time_s) << ',' << fmt(r.objective) << ',' << fmt(r.measure)
        << '\n';
  return out.str();
}

std::vector<BenchRecord> parse_bench_records_csv(std::istream& in) {
  std::vector<BenchRecord> records;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    BenchRecord r;
    std::string field;
    std::getline(ls, r.instance, ',');
    std::getline(ls, r.variant, ',');
    std::getline(ls, r.status, ',');
    std::getline(ls, field, ',');
    r.iterations = std::stoull(field);
    std::getline(ls, field, ',');
    r.time_s = std::stod(field);
    std::getline(ls, field, ',');
    r.objective = field == "inf" ? kInf : field == "-inf" ? -kInf : std::stod(field);
    std::getline(ls, field, ',');
    r.measure = field == "inf" ? kInf : std::stod(field);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<double> default_tau_grid() {
  std::vector<double> taus;
  for (int i = 0; i <= 20; ++i) taus.push_back(std::pow(2.0, 0.5 * i));
  return taus;
}

std::string performance_profile_csv(const std::vector<BenchRecord>& records,
                                    const std::vector<std::string>& variants,
                                    const std::vector<double>& taus) {
  // fastest solved time per instance across the chosen variants
  std::vector<std::string> instances;
  for (const auto& r : records)
    if (std::find(instances.begin(), instances.end(), r.instance) == instances.end())
      instances.push_back(r.instance);

  auto solved_time = [&](const std::string& instance,
                         const std::string& variant) -> std::optional<double> {
    for (const auto& r : records)
      if (r.instance == instance && r.variant == variant && r.status == "optimal")
        return r.time_s;
    return std::nullopt;
  };

  std::ostringstream out;
  out << "tau";
  for (const auto& v : variants) out << ',' << v;
  out << '\n';
  if (instances.empty()) return out.str();

  std::vector<double> best(instances.size(), kInf);
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (const auto& v : variants)
      if (auto t = solved_time(instances[i], v)) best[i] = std::min(best[i], *t);

  for (double tau : taus) {
    out << fmt(tau);
    for (const auto& v : variants) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        if (!std::isfinite(best[i])) continue;
        if (auto t = solved_time(instances[i], v))
          if (*t <= tau * best[i]) ++count;
      }
      out << ',' << fmt(static_cast<double>(count) / static_cast<double>(instances.size()));
    }
    out << '\n';
  }
  return out.str();
}

int cmd_bench(const std::string& dir, const SolverConfig& base,
              const BenchOptions& options, std::ostream& log) {
  std::vector<std::string> paths;
  try {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string p = entry.path().string();
      if (p.ends_with(".mps") || p.ends_with(".mps.gz")) paths.push_back(p);
    }
  } catch (const std::exception& e) {
    log << "bench: " << e.what() << "\n";
    return 1;
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    log << "bench: no MPS files under '" << dir << "'\n";
    return 1;
  }
  fs::create_directories(options.out_dir);

  struct Task {
    std::size_t path_idx;
    std::string variant;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (const auto& v : options.variants) tasks.push_back({i, v});

  std::vector<BenchRecord> records(tasks.size());
  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) break;
      const Task& task = tasks[t];
      BenchRecord rec;
      rec.instance = fs::path(paths[task.path_idx]).filename().string();
      rec.variant = task.variant;
      try {
        const LpInstance lp = parse_mps_file(paths[task.path_idx]);
        SolverConfig cfg = base;
        cfg.variant = variant_from_string(task.variant);
        cfg.apply_variant_defaults();
        const LpSolveResult result = solve_lp(lp, cfg);
        rec.status = to_string(result.status);
        rec.iterations = result.iterations;
        rec.time_s = result.solve_time_s;
        rec.objective = result.objective;
        rec.measure = result.final_measure;
        const std::string stem = rec.instance + "." + rec.variant;
        write_file_atomic(options.out_dir + "/" + stem + ".json",
                          report_json_string(lp, cfg, result, paths[task.path_idx]));
        write_file_atomic(options.out_dir + "/" + stem + ".csv",
                          records_csv(result.records));
      } catch (const std::exception& e) {
        rec.status = "error";
        std::lock_guard<std::mutex> guard(log_mutex);
        log << rec.instance << " " << rec.variant << ": " << e.what() << "\n";
      }
      {
        std::lock_guard<std::mutex> guard(log_mutex);
        log << rec.instance << " " << rec.variant << ": " << rec.status << " "
            << rec.iterations << " iters " << fmt(rec.time_s) << " s\n";
      }
      records[t] = std::move(rec);
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i + 1 < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  write_file_atomic(options.out_dir + "/records.csv", bench_records_csv(records));
  write_file_atomic(
      options.out_dir + "/profile.csv",
      performance_profile_csv(records, options.variants, default_tau_grid()));
  log << "bench: wrote " << records.size() << " records to " << options.out_dir
      << "\n";
  return 0;
}

int cmd_profile(const std::string& records_path, const std::string& out_path,
                std::ostream& log) {
  std::ifstream in(records_path);
  if (!in) {
    log << "profile: cannot open '" << records_path << "'\n";
    return 1;
  }
  const std::vector<BenchRecord> records = parse_bench_records_csv(in);
  std::vector<std::string> variants;
  for (const auto& r : records)
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
      variants.push_back(r.variant);
  write_file_atomic(out_path,
                    performance_profile_csv(records, variants, default_tau_grid()));
  log << "profile: wrote " << out_path << "\n";
  return 0;
}

int cmd_gen(const GenOptions& options, std::ostream& log) {
  fs::create_directories(options.out_dir);
  for (std::size_t i = 0; i < options.count; ++i) {
    LpGenOptions gen;
    gen.n = options.n;
    gen.m1 = options.m1;
    gen.m2 = options.m2;
    gen.seed = options.seed + i;
    gen.density = std::min(1.0, 10.0 / static_cast<double>(options.n));
    const GeneratedLp inst = generate_lp(gen);
    const std::string base =
        options.out_dir + "/" + inst.lp.name + (options.gzip ? ".mps.gz" : ".mps");
    const std::string text = write_mps(inst.lp);
    if (options.gzip) {
      gzFile gz = gzopen(base.c_str(), "wb");
      if (gz == nullptr) {
        log << "gen: cannot write '" << base << "'\n";
        return 1;
      }
      gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
      gzclose(gz);
    } else {
      write_file_atomic(base, text);
    }
    log << "gen: wrote " << base << "\n";
  }
  return 0;
}

}  // namespace padmm
