// ojs: command-line front end for the scheduler library and the simulator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ojs/error.hpp"
#include "ojs/experiments.hpp"
#include "ojs/graph.hpp"
#include "ojs/io.hpp"
#include "ojs/scenario.hpp"
#include "ojs/scheduler.hpp"

namespace fs = std::filesystem;

namespace {

/// --out wins; otherwise $OJS_OUTPUT_DIR/<fallback>; otherwise stdout (empty).
std::string output_path(const std::string& out, const std::string& fallback) {
  if (!out.empty()) return out;
  if (const char* dir = std::getenv("OJS_OUTPUT_DIR"); dir && *dir) {
    fs::create_directories(dir);
    return (fs::path(dir) / fallback).string();
  }
  return {};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ojs::Error(ojs::ErrorCode::InvalidInput, fmt::format("cannot write '{}'", path));
  f << text;
  spdlog::info("wrote {}", path);
}

std::vector<double> parse_values(const std::string& text) {
  // "a,b,c" or "lo:hi:step"
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ojs::Error(ojs::ErrorCode::InvalidInput, fmt::format("bad number '{}' in --values", s));
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ojs::Error(ojs::ErrorCode::InvalidInput, "range --values must be lo:hi:step");
    const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
    if (!(step > 0)) throw ojs::Error(ojs::ErrorCode::InvalidInput, "range step must be positive");
    for (int k = 0; lo + k * step <= hi + 1e-9 * step; ++k) out.push_back(lo + k * step);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw ojs::Error(ojs::ErrorCode::InvalidInput, "--values is empty");
  return out;
}

ojs::Algorithm auto_algorithm(const ojs::Instance& inst, const ojs::SolverOptions& so) {
  if (ojs::is_bipartite(inst.graph).bipartite) return ojs::Algorithm::MmkBip;
  if (inst.graph.bs_count <= so.max_psp_bs && ojs::is_planar_series_parallel(inst.graph)) return ojs::Algorithm::Psp;
  return ojs::Algorithm::Sta;
}

struct SolveArgs {
  std::string file;
  std::string algo = "auto";
  std::string mmk = "dp";
  std::string out;
  std::string format = "table";
  int brute_max_packets = 10;
};

int cmd_solve(const SolveArgs& a) {
  const auto inst = ojs::load_instance(a.file);
  ojs::SolverOptions so;
  so.mmk = ojs::parse_mmk_solver(a.mmk);
  const auto chosen = a.algo == "auto" ? auto_algorithm(inst, so) : ojs::parse_algorithm(a.algo);

  struct Row {
    std::string name;
    std::optional<double> utility;
    std::string note;
  };
  std::vector<Row> rows;
  for (auto algo : {ojs::Algorithm::MmkBip, ojs::Algorithm::Mat, ojs::Algorithm::Sta, ojs::Algorithm::Psp}) {
    Row r{std::string(ojs::to_string(algo)), std::nullopt, ""};
    try {
      r.utility = ojs::solve_ojs(inst, algo, so).total_utility;
    } catch (const ojs::Error& e) {
      r.note = std::string(ojs::to_string(e.code()));
    }
    rows.push_back(r);
  }
  if (static_cast<int>(inst.packets.size()) <= a.brute_max_packets || chosen == ojs::Algorithm::BruteForce) {
    Row r{"brute-force", std::nullopt, ""};
    try {
      r.utility = ojs::brute_force_ojs(inst, so.brute_force_budget).total_utility;
    } catch (const ojs::Error& e) {
      r.note = std::string(ojs::to_string(e.code()));
    }
    rows.push_back(r);
  }

  const auto sched = chosen == ojs::Algorithm::BruteForce ? ojs::brute_force_ojs(inst, so.brute_force_budget)
                                                          : ojs::solve_ojs(inst, chosen, so);
  auto sj = ojs::schedule_to_json(inst, sched);
  sj["algorithm"] = std::string(ojs::to_string(chosen));
  sj["mmk"] = std::string(ojs::to_string(so.mmk));

  const auto stem = fs::path(a.file).stem().string();
  const auto sched_path = output_path(a.out, stem + ".schedule.json");
  if (a.format == "json") {
    emit(sched_path, sj.dump(2) + "\n");
    return 0;
  }
  if (!sched_path.empty()) emit(sched_path, sj.dump(2) + "\n");
  if (a.format == "csv") {
    std::cout << "algorithm,mmk,utility,note\n";
    for (const auto& r : rows)
      std::cout << fmt::format("{},{},{},{}\n", r.name, ojs::to_string(so.mmk), r.utility ? fmt::format("{:.12g}", *r.utility) : "",
                               r.note);
    return 0;
  }
  std::cout << fmt::format("{} ({} BSs, {} packets, S = {})\n", a.file, inst.graph.bs_count, inst.packets.size(),
                           inst.blocks_per_subframe);
  std::cout << fmt::format("{:<13} {:>14}  {}\n", "algorithm", "utility", "");
  for (const auto& r : rows) {
    const bool mark = r.name == ojs::to_string(chosen);
    std::cout << fmt::format("{:<13} {:>14}  {}\n", r.name, r.utility ? fmt::format("{:.6f}", *r.utility) : "n/a",
                             mark ? "<- schedule" : r.note);
  }
  const auto& summary = sj["summary"];
  std::cout << fmt::format("forward {}  joint {}  single {}  unscheduled {}\n", summary["forward"].dump(),
                           summary["joint"].dump(), summary["single"].dump(), summary["unscheduled"].dump());
  if (sched_path.empty()) std::cout << sj.dump(2) << "\n";
  return 0;
}

struct SweepArgs {
  std::string scenario;
  std::string axis;
  std::string values;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<int> horizon;
  std::optional<std::string> algo;
  std::string out;
  std::string format = "csv";
};

void emit_table(const ojs::ResultTable& t, const std::string& out, const std::string& stem, const std::string& format) {
  if (format == "json") {
    emit(output_path(out, stem + ".json"), ojs::to_json(t).dump(2) + "\n");
  } else {
    std::ostringstream ss;
    ojs::write_csv(ss, t);
    emit(output_path(out, stem + ".csv"), ss.str());
  }
}

int cmd_sweep(const SweepArgs& a) {
  auto s = ojs::load_scenario(a.scenario);
  if (a.seed) s.seed = *a.seed;
  if (a.replications) s.replications = *a.replications;
  if (a.horizon) s.horizon = *a.horizon;
  if (a.algo) s.algorithm = ojs::parse_algorithm(*a.algo);
  const auto axis = ojs::parse_sweep_axis(a.axis);
  ojs::RunOptions opts;
  opts.jobs = a.jobs;
  const auto table = ojs::run_sweep(s, axis, parse_values(a.values), opts);
  emit_table(table, a.out, fmt::format("sweep_{}_{}", s.name.empty() ? "scenario" : s.name, a.axis), a.format);
  return 0;
}

int cmd_ratio_bench(ojs::RatioBenchOptions o, const std::string& out, const std::string& format) {
  const auto table = ojs::run_ratio_bench(o);
  emit_table(table, out, "ratio_" + o.topology, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDMA joint scheduling for CoMP joint transmission: per-subframe schedulers and a queueing simulator.\n"
               "Output files default to $OJS_OUTPUT_DIR when set, else stdout. $OJS_DATA_DIR overrides the location of presets/ and data/."};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  SolveArgs solve;
  auto* sc = app.add_subcommand("solve", "Schedule one subframe instance (JSON) and compare algorithms");
  sc->add_option("file", solve.file, "Instance JSON")->required();
  sc->add_option("--algo", solve.algo, "auto, jtk-mmk, jtk-mat, jtk-sta, jtk-psp or brute-force")->capture_default_str();
  sc->add_option("--mmk", solve.mmk, "Inner knapsack solver: dp or greedy")->capture_default_str();
  sc->add_option("--out", solve.out, "Write the schedule JSON here");
  sc->add_option("--format", solve.format, "table, csv (utility table) or json (schedule only)")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  sc->add_option("--brute-max-packets", solve.brute_max_packets, "Include the exhaustive oracle up to this many packets")
      ->capture_default_str();

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Simulate a scenario over one axis and emit per-metric means with standard errors");
  sw->add_option("file", sweep.scenario, "Scenario JSON or preset name (cluster3, star7, cycle7)")->required();
  sw->add_option("--axis", sweep.axis, "backhaul, arrival_rate or users")->required();
  sw->add_option("--values", sweep.values, "Comma list or lo:hi:step")->required();
  sw->add_option("--jobs", sweep.jobs, "Worker threads for replications")->capture_default_str();
  sw->add_option("--seed", sweep.seed, "Override the scenario seed");
  sw->add_option("--replications", sweep.replications, "Override the replication count");
  sw->add_option("--horizon", sweep.horizon, "Override the subframes per replication");
  sw->add_option("--algo", sweep.algo, "Override the scheduling algorithm");
  sw->add_option("--out", sweep.out, "Output file");
  sw->add_option("--format", sweep.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  ojs::RatioBenchOptions bench;
  std::string bench_out, bench_format = "csv";
  auto* rb = app.add_subcommand("ratio-bench", "Single-subframe utility ratios against the optimal baseline");
  rb->add_option("--topology", bench.topology, "complete3 or bipartite3")->capture_default_str();
  rb->add_option("--users", bench.users, "User counts")->delimiter(',')->capture_default_str();
  rb->add_option("--samples", bench.samples, "Instances per user count")->capture_default_str();
  rb->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
  rb->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
  rb->add_option("--out", bench_out, "Output file");
  rb->add_option("--format", bench_format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("ojs"));
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*sc) return cmd_solve(solve);
    if (*sw) return cmd_sweep(sweep);
    if (*rb) return cmd_ratio_bench(bench, bench_out, bench_format);
  } catch (const ojs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
