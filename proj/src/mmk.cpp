#include "ojs/mmk.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "ojs/error.hpp"

namespace ojs {
namespace {

bool fits(const std::vector<std::int64_t>& w, const std::vector<std::int64_t>& cap) {
  for (std::size_t d = 0; d < cap.size(); ++d)
    if (w[d] > cap[d]) return false;
  return true;
}

void check_shape(const MmkInstance& inst) {
  const auto D = inst.capacities.size();
  for (auto c : inst.capacities)
    if (c < 0) throw Error(ErrorCode::InvalidInput, "negative knapsack capacity");
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    for (const auto& ch : inst.items[i].choices) {
      if (ch.weights.size() != D)
        throw Error(ErrorCode::InvalidInput, fmt::format("item {} has a weight vector of length {}, expected {}", i, ch.weights.size(), D));
      for (auto w : ch.weights)
        if (w < 0) throw Error(ErrorCode::InvalidInput, fmt::format("item {} has a negative weight", i));
    }
    if (inst.items[i].choices.size() > 254)
      throw Error(ErrorCode::InvalidInput, fmt::format("item {} has more than 254 choices", i));
  }
}

double summed_value(const MmkInstance& inst, const std::vector<int>& choice) {
  double total = 0.0;
  for (std::size_t i = 0; i < choice.size(); ++i)
    if (choice[i] != MmkSelection::kNone) total += inst.items[i].choices[static_cast<std::size_t>(choice[i])].value;
  return total;
}

}  // namespace

MmkSelection solve_mmk_dp(const MmkInstance& inst, const MmkDpOptions& opts) {
  check_shape(inst);
  const std::size_t I = inst.items.size();
  const std::size_t D = inst.capacities.size();
  MmkSelection out;
  out.choice.assign(I, MmkSelection::kNone);

  // usable[i] lists (choice index) with positive value that fit on their own
  std::vector<std::vector<int>> usable(I);
  std::vector<std::int64_t> weight_sum(D, 0);
  std::vector<std::int64_t> divisor(D, 0);
  for (std::size_t i = 0; i < I; ++i) {
    std::vector<std::int64_t> item_max(D, 0);
    const auto& choices = inst.items[i].choices;
    for (std::size_t r = 0; r < choices.size(); ++r) {
      if (!(choices[r].value > 0.0) || !fits(choices[r].weights, inst.capacities)) continue;
      usable[i].push_back(static_cast<int>(r));
      for (std::size_t d = 0; d < D; ++d) {
        item_max[d] = std::max(item_max[d], choices[r].weights[d]);
        divisor[d] = std::gcd(divisor[d], choices[r].weights[d]);
      }
    }
    for (std::size_t d = 0; d < D; ++d) weight_sum[d] += item_max[d];
  }

  std::vector<std::int64_t> extent(D, 1), stride(D, 1);
  std::int64_t states = 1;
  for (std::size_t d = 0; d < D; ++d) {
    const auto cap = std::min(inst.capacities[d], weight_sum[d]);
    extent[d] = divisor[d] == 0 ? 1 : cap / divisor[d] + 1;
    stride[d] = states;
    if (states > opts.state_budget / extent[d])
      throw Error(ErrorCode::StateSpaceTooLarge, fmt::format("knapsack table exceeds {} states", opts.state_budget));
    states *= extent[d];
  }

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < I; ++i)
    if (!usable[i].empty()) active.push_back(i);
  if (active.empty()) return out;
  if (static_cast<std::int64_t>(active.size()) > opts.table_budget / states)
    throw Error(ErrorCode::StateSpaceTooLarge,
                fmt::format("knapsack decision table for {} items x {} states exceeds budget", active.size(), states));

  struct Reduced {
    std::vector<std::int64_t> w;
    std::int64_t offset = 0;
    double value = 0.0;
    int index = 0;
  };
  auto reduce = [&](std::size_t i) {
    std::vector<Reduced> rs;
    for (int r : usable[i]) {
      const auto& ch = inst.items[i].choices[static_cast<std::size_t>(r)];
      Reduced red;
      red.w.resize(D);
      red.value = ch.value;
      red.index = r;
      bool ok = true;
      for (std::size_t d = 0; d < D; ++d) {
        red.w[d] = divisor[d] == 0 ? 0 : ch.weights[d] / divisor[d];
        if (red.w[d] >= extent[d]) ok = false;
        red.offset += red.w[d] * stride[d];
      }
      if (ok) rs.push_back(std::move(red));
    }
    return rs;
  };

  const auto S = static_cast<std::size_t>(states);
  std::vector<double> prev(S, 0.0), cur(S, 0.0);
  std::vector<std::uint8_t> decision(active.size() * S, 0);
  std::vector<std::int64_t> coord(D, 0);

  // items in reverse so that reconstruction walks forward from item 0
  for (std::size_t k = active.size(); k-- > 0;) {
    const auto rs = reduce(active[k]);
    std::uint8_t* dec = decision.data() + k * S;
    std::fill(coord.begin(), coord.end(), 0);
    for (std::size_t s = 0; s < S; ++s) {
      double best = prev[s];
      std::uint8_t pick = 0;
      for (std::size_t q = 0; q < rs.size(); ++q) {
        const auto& red = rs[q];
        bool ok = true;
        for (std::size_t d = 0; d < D && ok; ++d) ok = coord[d] >= red.w[d];
        if (!ok) continue;
        const double cand = red.value + prev[s - static_cast<std::size_t>(red.offset)];
        if (cand > best) {
          best = cand;
          pick = static_cast<std::uint8_t>(q + 1);
        }
      }
      cur[s] = best;
      dec[s] = pick;
      for (std::size_t d = 0; d < D; ++d) {
        if (++coord[d] < extent[d]) break;
        coord[d] = 0;
      }
    }
    std::swap(prev, cur);
  }

  std::size_t state = S - 1;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto pick = decision[k * S + state];
    if (pick == 0) continue;
    const auto rs = reduce(active[k]);
    const auto& red = rs[pick - 1u];
    out.choice[active[k]] = red.index;
    state -= static_cast<std::size_t>(red.offset);
  }
  out.total_value = summed_value(inst, out.choice);
  return out;
}

MmkSelection solve_mmk_greedy(const MmkInstance& inst) {
  check_shape(inst);
  const std::size_t I = inst.items.size();
  const std::size_t D = inst.capacities.size();
  MmkSelection out;
  out.choice.assign(I, MmkSelection::kNone);

  struct Candidate {
    double density;
    int item;
    int choice;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < I; ++i) {
    const auto& choices = inst.items[i].choices;
    for (std::size_t r = 0; r < choices.size(); ++r) {
      const auto& ch = choices[r];
      if (!(ch.value > 0.0) || !fits(ch.weights, inst.capacities)) continue;
      double load = 0.0;
      for (std::size_t d = 0; d < D; ++d)
        if (ch.weights[d] > 0) load += static_cast<double>(ch.weights[d]) / static_cast<double>(inst.capacities[d]);
      const double density = load > 0.0 ? ch.value / load : std::numeric_limits<double>::infinity();
      cands.push_back({density, static_cast<int>(i), static_cast<int>(r)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.density, a.item, a.choice) < std::tie(a.density, b.item, b.choice);
  });

  std::vector<std::int64_t> left = inst.capacities;
  for (const auto& c : cands) {
    if (out.choice[static_cast<std::size_t>(c.item)] != MmkSelection::kNone) continue;
    const auto& w = inst.items[static_cast<std::size_t>(c.item)].choices[static_cast<std::size_t>(c.choice)].weights;
    if (!fits(w, left)) continue;
    for (std::size_t d = 0; d < D; ++d) left[d] -= w[d];
    out.choice[static_cast<std::size_t>(c.item)] = c.choice;
  }
  out.total_value = summed_value(inst, out.choice);
  return out;
}

std::vector<std::string> check_mmk_selection(const MmkInstance& inst, const MmkSelection& sel) {
  std::vector<std::string> problems;
  if (sel.choice.size() != inst.items.size()) {
    problems.push_back(fmt::format("selection covers {} items, instance has {}", sel.choice.size(), inst.items.size()));
    return problems;
  }
  std::vector<std::int64_t> used(inst.capacities.size(), 0);
  for (std::size_t i = 0; i < sel.choice.size(); ++i) {
    const int r = sel.choice[i];
    if (r == MmkSelection::kNone) continue;
    if (r < 0 || r >= static_cast<int>(inst.items[i].choices.size())) {
      problems.push_back(fmt::format("item {} selects missing choice {}", i, r));
      continue;
    }
    const auto& w = inst.items[i].choices[static_cast<std::size_t>(r)].weights;
    for (std::size_t d = 0; d < used.size(); ++d) used[d] += w[d];
  }
  for (std::size_t d = 0; d < used.size(); ++d)
    if (used[d] > inst.capacities[d])
      problems.push_back(fmt::format("dimension {} uses {} of {}", d, used[d], inst.capacities[d]));
  return problems;
}

}  // namespace ojs
