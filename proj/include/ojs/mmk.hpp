#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ojs {

struct MmkChoice {
  std::vector<std::int64_t> weights;  // one entry per capacity dimension
  double value = 0.0;
};

struct MmkItem {
  std::vector<MmkChoice> choices;
};

/// Multidimensional multiple-choice knapsack: every item picks at most one
/// choice, and the summed weights must fit `capacities` in every dimension.
struct MmkInstance {
  std::vector<MmkItem> items;
  std::vector<std::int64_t> capacities;
};

struct MmkSelection {
  static constexpr int kNone = -1;
  std::vector<int> choice;  // per item: choice index or kNone
  double total_value = 0.0;
};

struct MmkDpOptions {
  std::int64_t state_budget = 10'000'000;
  // decision table entries (items x states)
  std::int64_t table_budget = 400'000'000;
};

/// Exact dynamic program over a dense D-dimensional capacity table.
/// Choices with value <= 0 are never taken. Among equal-value selections the
/// one that leaves earlier items unscheduled, then uses the lowest choice
/// index, wins.
/// Throws Error(StateSpaceTooLarge) past the budgets.
MmkSelection solve_mmk_dp(const MmkInstance& inst, const MmkDpOptions& opts = {});

/// Single pass over (item, choice) pairs sorted by value per unit of
/// capacity-normalized load. Feasible, no ratio guarantee.
MmkSelection solve_mmk_greedy(const MmkInstance& inst);

/// Empty when the selection fits; otherwise one message per problem.
std::vector<std::string> check_mmk_selection(const MmkInstance& inst, const MmkSelection& sel);

}  // namespace ojs
