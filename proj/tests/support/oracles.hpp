#pragma once
// Reference implementations used only by tests. They work from the raw
// constraint definitions with plain enumeration and share no code with the
// library solvers beyond the data types.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ojs/graph.hpp"
#include "ojs/mmk.hpp"
#include "ojs/model.hpp"
#include "ojs/scheduler.hpp"

namespace oracle {

using ojs::Instance;
using ojs::Packet;

inline bool has_link(const Instance& inst, int a, int b) {
  for (const auto& l : inst.graph.links)
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return true;
  return false;
}

inline std::int64_t link_capacity(const Instance& inst, int a, int b) {
  for (const auto& l : inst.graph.links)
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l.capacity_bytes;
  return -1;
}

inline bool can_forward(const Instance& inst, const Packet& p) {
  const auto& u = inst.users[static_cast<std::size_t>(p.user)];
  return !p.joint && u.secondary && has_link(inst, u.serving, *u.secondary);
}

/// Utility straight from the definitions of u_T, u_F and u_Q.
inline double value(const Instance& inst, const Packet& p, int config) {
  const auto& us = inst.utility;
  if (config == 0) {
    if (us.kind == ojs::UtilityKind::QueueBased) {
      const auto& q = us.queues[static_cast<std::size_t>(p.user)];
      return static_cast<double>(std::max<std::int64_t>(q.primary - q.joint, 0));
    }
    return us.gamma;
  }
  const double prob = p.per_mcs[static_cast<std::size_t>(config - 1)].success_prob;
  switch (us.kind) {
    case ojs::UtilityKind::Throughput:
      return prob;
    case ojs::UtilityKind::Fairness: {
      if (prob <= 0.0) return 0.0;
      double pmin = 1.0;
      for (const auto& q : inst.packets)
        for (const auto& o : q.per_mcs)
          if (o.success_prob > 0.0) pmin = std::min(pmin, o.success_prob);
      return std::log(prob) - std::log(pmin) + us.fairness_epsilon;
    }
    case ojs::UtilityKind::QueueBased: {
      const auto& q = us.queues[static_cast<std::size_t>(p.user)];
      const bool secondary_weight = p.joint && us.joint_weighting == ojs::JointWeighting::SecondaryQueue;
      return static_cast<double>(secondary_weight ? q.joint : q.primary) * prob;
    }
  }
  return 0.0;
}

/// All configurations a packet may take: -1 (nothing), 0 (forward) when
/// allowed, 1..M.
inline std::vector<int> options(const Instance& inst, const Packet& p) {
  std::vector<int> out{-1};
  if (can_forward(inst, p)) out.push_back(0);
  for (int m = 1; m <= static_cast<int>(p.per_mcs.size()); ++m) out.push_back(m);
  return out;
}

inline std::vector<int> transmitters(const Instance& inst, const Packet& p) {
  const auto& u = inst.users[static_cast<std::size_t>(p.user)];
  if (p.joint) return {u.serving, *u.secondary};
  return {u.serving};
}

/// Backhaul constraint: summed forward sizes per link within capacity.
inline bool links_ok(const Instance& inst, const std::vector<int>& config) {
  std::vector<std::int64_t> load(inst.graph.links.size(), 0);
  for (std::size_t i = 0; i < inst.packets.size(); ++i) {
    if (config[i] != 0) continue;
    const auto& p = inst.packets[i];
    const auto& u = inst.users[static_cast<std::size_t>(p.user)];
    for (std::size_t k = 0; k < inst.graph.links.size(); ++k) {
      const auto& l = inst.graph.links[k];
      if ((l.a == u.serving && l.b == *u.secondary) || (l.b == u.serving && l.a == *u.secondary)) load[k] += p.size_bytes;
    }
  }
  for (std::size_t k = 0; k < load.size(); ++k)
    if (load[k] > inst.graph.links[k].capacity_bytes) return false;
  return true;
}

/// Block assignment search: every wireless packet takes Γ distinct blocks out
/// of 1..S, identical at all its transmitters, and no BS uses a block twice.
inline std::optional<std::vector<std::vector<int>>> assign_blocks(const Instance& inst, const std::vector<int>& config) {
  const int S = inst.blocks_per_subframe;
  const int B = inst.graph.bs_count;
  std::vector<int> order;
  for (std::size_t i = 0; i < config.size(); ++i)
    if (config[i] >= 1) order.push_back(static_cast<int>(i));
  // fail fast on per-BS load
  std::vector<int> load(static_cast<std::size_t>(B), 0);
  for (int i : order) {
    const auto& p = inst.packets[static_cast<std::size_t>(i)];
    for (int b : transmitters(inst, p)) load[static_cast<std::size_t>(b)] += p.per_mcs[static_cast<std::size_t>(config[static_cast<std::size_t>(i)] - 1)].blocks_needed;
  }
  for (int l : load)
    if (l > S) return std::nullopt;

  std::vector<std::vector<bool>> used(static_cast<std::size_t>(B), std::vector<bool>(static_cast<std::size_t>(S) + 1, false));
  std::vector<std::vector<int>> blocks(config.size());
  std::function<bool(std::size_t)> place = [&](std::size_t k) -> bool {
    if (k == order.size()) return true;
    const int i = order[k];
    const auto& p = inst.packets[static_cast<std::size_t>(i)];
    const int need = p.per_mcs[static_cast<std::size_t>(config[static_cast<std::size_t>(i)] - 1)].blocks_needed;
    const auto tx = transmitters(inst, p);
    // subsets of 1..S of size `need` in lexicographic order
    std::vector<int> pick;
    std::function<bool(int)> choose = [&](int next) -> bool {
      if (static_cast<int>(pick.size()) == need) {
        for (int b : tx)
          for (int s : pick) used[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)] = true;
        blocks[static_cast<std::size_t>(i)] = pick;
        if (place(k + 1)) return true;
        for (int b : tx)
          for (int s : pick) used[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)] = false;
        return false;
      }
      for (int s = next; s <= S; ++s) {
        bool free = true;
        for (int b : tx) free = free && !used[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)];
        if (!free) continue;
        pick.push_back(s);
        if (choose(s + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    return choose(1);
  };
  if (!place(0)) return std::nullopt;
  return blocks;
}

struct Optimum {
  double utility = 0.0;
  std::vector<int> config;
};

/// Optimal OJS value by enumerating every configuration vector in order of
/// decreasing utility and returning the first one with a valid block
/// assignment and backhaul load.
inline Optimum ojs_optimum(const Instance& inst) {
  const std::size_t I = inst.packets.size();
  std::vector<std::vector<int>> opts(I);
  for (std::size_t i = 0; i < I; ++i) opts[i] = options(inst, inst.packets[i]);
  struct Cand {
    double u;
    std::vector<int> config;
  };
  std::vector<Cand> cands;
  std::vector<int> cur(I, -1);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double u) {
    if (i == I) {
      cands.push_back({u, cur});
      return;
    }
    for (int r : opts[i]) {
      cur[i] = r;
      rec(i + 1, r < 0 ? u : u + value(inst, inst.packets[i], r));
    }
    cur[i] = -1;
  };
  rec(0, 0.0);
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.u > b.u; });
  for (const auto& c : cands)
    if (links_ok(inst, c.config) && assign_blocks(inst, c.config)) return {c.u, c.config};
  return {0.0, std::vector<int>(I, -1)};
}

/// Independent schedule checker. Returns a description of the first problem.
inline std::optional<std::string> schedule_problem(const Instance& inst, const ojs::Schedule& s) {
  const std::size_t I = inst.packets.size();
  if (s.config.size() != I || s.blocks.size() != I) return "size mismatch";
  const int S = inst.blocks_per_subframe;
  std::set<std::pair<int, int>> taken;  // (BS, block)
  double total = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    const auto& p = inst.packets[i];
    const int r = s.config[i];
    if (r < -1 || r > static_cast<int>(p.per_mcs.size())) return "config out of range";
    if (r <= 0 && !s.blocks[i].empty()) return "blocks on a non-wireless packet";
    if (r == 0 && !can_forward(inst, p)) return "illegal forward";
    if (r >= 1) {
      const auto need = static_cast<std::size_t>(p.per_mcs[static_cast<std::size_t>(r - 1)].blocks_needed);
      if (s.blocks[i].size() != need) return "wrong block count";
      std::set<int> distinct(s.blocks[i].begin(), s.blocks[i].end());
      if (distinct.size() != need) return "repeated block";
      for (int blk : s.blocks[i]) {
        if (blk < 1 || blk > S) return "block out of range";
        for (int b : transmitters(inst, p))
          if (!taken.insert({b, blk}).second) return "block used twice at one BS";
      }
    }
    if (r >= 0) total += value(inst, p, r);
  }
  if (!links_ok(inst, s.config)) return "backhaul capacity exceeded";
  if (std::abs(total - s.total_utility) > 1e-9 * std::max(1.0, std::abs(total))) return "total utility mismatch";
  return std::nullopt;
}

// ---- knapsack -------------------------------------------------------------

inline double mmk_optimum(const ojs::MmkInstance& inst) {
  const std::size_t D = inst.capacities.size();
  double best = 0.0;
  std::vector<std::int64_t> load(D, 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double v) {
    if (i == inst.items.size()) {
      best = std::max(best, v);
      return;
    }
    rec(i + 1, v);
    for (const auto& c : inst.items[i].choices) {
      bool fits = true;
      for (std::size_t d = 0; d < D; ++d) fits = fits && load[d] + c.weights[d] <= inst.capacities[d];
      if (!fits) continue;
      for (std::size_t d = 0; d < D; ++d) load[d] += c.weights[d];
      rec(i + 1, v + c.value);
      for (std::size_t d = 0; d < D; ++d) load[d] -= c.weights[d];
    }
  };
  rec(0, 0.0);
  return best;
}

// ---- graphs ---------------------------------------------------------------

inline bool proper(const ojs::Multigraph& g, const std::vector<int>& color, int k) {
  if (color.size() != g.edges.size()) return false;
  std::set<std::pair<int, int>> seen;  // (vertex, color)
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (color[e] < 1 || color[e] > k) return false;
    if (!seen.insert({g.edges[e][0], color[e]}).second) return false;
    if (!seen.insert({g.edges[e][1], color[e]}).second) return false;
  }
  return true;
}

/// Plain backtracking; fine for a dozen edges.
inline bool colorable(const ojs::Multigraph& g, int k) {
  std::vector<std::vector<bool>> used(static_cast<std::size_t>(g.n), std::vector<bool>(static_cast<std::size_t>(k) + 1, false));
  std::function<bool(std::size_t)> rec = [&](std::size_t e) -> bool {
    if (e == g.edges.size()) return true;
    const auto [u, v] = g.edges[e];
    for (int c = 1; c <= k; ++c) {
      if (used[static_cast<std::size_t>(u)][static_cast<std::size_t>(c)] || used[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(u)][static_cast<std::size_t>(c)] = used[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)] = true;
      if (rec(e + 1)) return true;
      used[static_cast<std::size_t>(u)][static_cast<std::size_t>(c)] = used[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)] = false;
    }
    return false;
  };
  return rec(0);
}

inline int chromatic_index(const ojs::Multigraph& g) {
  int k = 0;
  for (int d : g.degrees()) k = std::max(k, d);
  while (!colorable(g, k)) ++k;
  return k;
}

/// Two-coloring by trying every vertex labeling.
inline bool bipartite_by_labels(int n, const std::vector<std::array<int, 2>>& edges) {
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (const auto& e : edges) ok = ok && (((mask >> e[0]) & 1u) != ((mask >> e[1]) & 1u));
    if (ok) return true;
  }
  return false;
}

/// K4 minor test by trying every assignment of vertices to four connected,
/// pairwise adjacent branch sets (or to none).
inline bool has_k4_minor(int n, const std::vector<std::array<int, 2>>& edges) {
  std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (const auto& e : edges) adj[static_cast<std::size_t>(e[0])][static_cast<std::size_t>(e[1])] = adj[static_cast<std::size_t>(e[1])][static_cast<std::size_t>(e[0])] = true;
  std::vector<int> part(static_cast<std::size_t>(n), 4);
  auto connected = [&](int set) {
    std::vector<int> members;
    for (int v = 0; v < n; ++v)
      if (part[static_cast<std::size_t>(v)] == set) members.push_back(v);
    if (members.empty()) return false;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> stack{members[0]};
    seen[static_cast<std::size_t>(members[0])] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w)
        if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)] && part[static_cast<std::size_t>(w)] == set) {
          seen[static_cast<std::size_t>(w)] = true;
          ++reached;
          stack.push_back(w);
        }
    }
    return reached == members.size();
  };
  std::function<bool(int)> rec = [&](int v) -> bool {
    if (v == n) {
      for (int s = 0; s < 4; ++s)
        if (!connected(s)) return false;
      for (int s = 0; s < 4; ++s)
        for (int t = s + 1; t < 4; ++t) {
          bool touch = false;
          for (int a = 0; a < n && !touch; ++a)
            for (int b = 0; b < n && !touch; ++b)
              touch = part[static_cast<std::size_t>(a)] == s && part[static_cast<std::size_t>(b)] == t && adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
          if (!touch) return false;
        }
      return true;
    }
    for (int s = 0; s <= 4; ++s) {
      part[static_cast<std::size_t>(v)] = s;
      if (rec(v + 1)) return true;
    }
    part[static_cast<std::size_t>(v)] = 4;
    return false;
  };
  return rec(0);
}

/// max over odd U of non-isolated vertices with |U| >= 3 of
/// ceil(2|E_U| / (|U| - 1)), by subsets.
inline int odd_density(const ojs::Multigraph& g) {
  std::uint32_t touched = 0;
  for (const auto& e : g.edges) touched |= (1u << e[0]) | (1u << e[1]);
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << g.n); ++mask) {
    if (mask & ~touched) continue;
    const int size = std::popcount(mask);
    if (size < 3 || size % 2 == 0) continue;
    int inside = 0;
    for (const auto& e : g.edges) inside += ((mask >> e[0]) & 1u) && ((mask >> e[1]) & 1u);
    best = std::max(best, (2 * inside + size - 2) / (size - 1));
  }
  return best;
}

/// Best matching weight over every edge subset.
inline double matching_optimum(const ojs::JtGraph& g, const std::vector<double>& w) {
  const std::size_t E = g.links.size();
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << E); ++mask) {
    std::vector<bool> used(static_cast<std::size_t>(g.bs_count), false);
    bool ok = true;
    double total = 0.0;
    for (std::size_t e = 0; e < E && ok; ++e) {
      if (!((mask >> e) & 1u)) continue;
      const auto& l = g.links[e];
      ok = !used[static_cast<std::size_t>(l.a)] && !used[static_cast<std::size_t>(l.b)];
      used[static_cast<std::size_t>(l.a)] = used[static_cast<std::size_t>(l.b)] = true;
      total += w[e];
    }
    if (ok) best = std::max(best, total);
  }
  return best;
}

}  // namespace oracle
