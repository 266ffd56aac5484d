#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ojs/graph.hpp"
#include "ojs/mmk.hpp"
#include "ojs/model.hpp"

namespace ojs {

enum class Algorithm { MmkBip, Mat, Sta, Psp, BruteForce };
enum class MmkSolver { Dp, Greedy };

std::string_view to_string(Algorithm a);
std::string_view to_string(MmkSolver s);
/// Accepts the names produced by to_string in any case, plus short aliases
/// (mmk, mat, sta, psp, brute). Throws InvalidInput.
Algorithm parse_algorithm(std::string_view name);
MmkSolver parse_mmk_solver(std::string_view name);

struct SolverOptions {
  MmkSolver mmk = MmkSolver::Dp;
  MmkDpOptions dp;
  int max_psp_bs = 12;
  std::int64_t brute_force_budget = 50'000'000;  // search nodes
};

/// Knapsack half of a schedule: per-packet configuration (kUnscheduled,
/// kForward or an MCS) and its summed utility.
struct JtkResult {
  std::vector<Config> config;
  double utility = 0.0;
};

struct Schedule {
  std::vector<Config> config;
  std::vector<std::vector<int>> blocks;  // per packet, sorted block indices in 1..S
  double total_utility = 0.0;

  bool z(int packet, int mcs) const { return config[static_cast<std::size_t>(packet)] == mcs && mcs >= 1; }
  bool y(int packet) const { return config[static_cast<std::size_t>(packet)] == kForward; }
  bool x(int packet, int mcs, int block) const;
};

/// Sum of utilities of `config` in packet order.
double schedule_utility(const Instance& inst, const std::vector<Config>& config);

/// Whole-network knapsack; exact for bipartite G_J with the DP solver.
/// Throws NotBipartite.
JtkResult solve_jtk_mmk(const Instance& inst, const SolverOptions& opts = {});
/// Per-link two-BS knapsacks combined through a maximum-weight matching.
JtkResult solve_jtk_mat(const Instance& inst, const SolverOptions& opts = {});
/// Greedy commitment of the best star subproblem, repeated on what remains.
JtkResult solve_jtk_sta(const Instance& inst, const SolverOptions& opts = {});
/// Whole-network knapsack plus one dimension per odd BS set.
/// Throws NotSeriesParallel, TooManyBs.
JtkResult solve_jtk_psp(const Instance& inst, const SolverOptions& opts = {});

/// Assigns blocks to every wireless selection in `config` by edge coloring the
/// scheduled-blocks graph. Throws ColoringExceedsS when more than S colors
/// are needed.
std::vector<std::vector<int>> solve_jtc(const Instance& inst, const std::vector<Config>& config);

/// JTK followed by JTC; the result is checked with validate_schedule.
Schedule solve_ojs(const Instance& inst, Algorithm algo, const SolverOptions& opts = {});

/// Exhaustive optimum over all configurations, each candidate checked for
/// block-colorability. Throws SearchSpaceTooLarge.
Schedule brute_force_ojs(const Instance& inst, std::int64_t node_budget = 50'000'000);

/// Empty iff `sched` satisfies every scheduling constraint of `inst`.
std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& sched);

}  // namespace ojs
