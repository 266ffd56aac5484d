#include "ojs/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include <fmt/format.h>

#include "ojs/error.hpp"

namespace ojs {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::MmkBip: return "jtk-mmk";
    case Algorithm::Mat: return "jtk-mat";
    case Algorithm::Sta: return "jtk-sta";
    case Algorithm::Psp: return "jtk-psp";
    case Algorithm::BruteForce: return "brute-force";
  }
  return "unknown";
}

std::string_view to_string(MmkSolver s) { return s == MmkSolver::Dp ? "dp" : "greedy"; }

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  const auto n = lower(name);
  if (n == "jtk-mmk" || n == "mmk") return Algorithm::MmkBip;
  if (n == "jtk-mat" || n == "mat") return Algorithm::Mat;
  if (n == "jtk-sta" || n == "sta") return Algorithm::Sta;
  if (n == "jtk-psp" || n == "psp") return Algorithm::Psp;
  if (n == "brute-force" || n == "brute") return Algorithm::BruteForce;
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown algorithm '{}'", name));
}

MmkSolver parse_mmk_solver(std::string_view name) {
  const auto n = lower(name);
  if (n == "dp") return MmkSolver::Dp;
  if (n == "greedy") return MmkSolver::Greedy;
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown knapsack solver '{}'", name));
}

bool Schedule::x(int packet, int mcs, int block) const {
  if (!z(packet, mcs)) return false;
  const auto& b = blocks[static_cast<std::size_t>(packet)];
  return std::binary_search(b.begin(), b.end(), block);
}

double schedule_utility(const Instance& inst, const std::vector<Config>& config) {
  double total = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i)
    if (config[i] != kUnscheduled) total += utility(inst, inst.packets[i], config[i]);
  return total;
}

namespace {

/// Which BSs and links a knapsack subproblem may use.
struct Scope {
  std::vector<bool> bs;
  std::vector<bool> jt;   // links usable for joint transmission
  std::vector<bool> fwd;  // links usable for forwarding
  bool odd_sets = false;
};

Scope full_scope(const Instance& inst) {
  Scope s;
  s.bs.assign(static_cast<std::size_t>(inst.graph.bs_count), true);
  s.jt.assign(inst.graph.links.size(), true);
  s.fwd = s.jt;
  return s;
}

Scope empty_scope(const Instance& inst) {
  Scope s;
  s.bs.assign(static_cast<std::size_t>(inst.graph.bs_count), false);
  s.jt.assign(inst.graph.links.size(), false);
  s.fwd = s.jt;
  return s;
}

double summed(const std::vector<std::vector<double>>& table, const std::vector<Config>& config) {
  double total = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i)
    if (config[i] != kUnscheduled) total += table[i][static_cast<std::size_t>(config[i])];
  return total;
}

/// Odd BS sets (size >= 3) whose joint-usable links form a connected,
/// non-bipartite subgraph; every other odd set is implied by the BS limits.
std::vector<std::uint32_t> binding_odd_sets(const Instance& inst, const Scope& scope) {
  const int B = inst.graph.bs_count;
  std::uint32_t allowed = 0;
  for (int b = 0; b < B; ++b)
    if (scope.bs[static_cast<std::size_t>(b)]) allowed |= 1u << b;
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = allowed; mask; mask = (mask - 1) & allowed) {
    const int size = std::popcount(mask);
    if (size < 3 || size % 2 == 0) continue;
    Multigraph sub;
    sub.n = B;
    for (std::size_t k = 0; k < inst.graph.links.size(); ++k) {
      const auto& l = inst.graph.links[k];
      if (scope.jt[k] && (mask >> l.a & 1u) && (mask >> l.b & 1u)) sub.edges.push_back({l.a, l.b});
    }
    // connected on the vertices of mask
    std::vector<int> comp(static_cast<std::size_t>(B), -1);
    const int start = std::countr_zero(mask);
    std::vector<int> stack{start};
    comp[static_cast<std::size_t>(start)] = 0;
    int reached = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& e : sub.edges) {
        const int w = e[0] == v ? e[1] : e[1] == v ? e[0] : -1;
        if (w >= 0 && comp[static_cast<std::size_t>(w)] == -1) {
          comp[static_cast<std::size_t>(w)] = 0;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    if (reached != size) continue;
    if (is_bipartite(sub).bipartite) continue;
    out.push_back(mask);
  }
  std::sort(out.begin(), out.end());
  return out;
}

JtkResult solve_scope(const Instance& inst, const std::vector<std::vector<double>>& table, const Scope& scope,
                      const SolverOptions& opts) {
  const int B = inst.graph.bs_count;
  const auto& links = inst.graph.links;
  std::vector<int> bs_dim(static_cast<std::size_t>(B), -1), link_dim(links.size(), -1);
  MmkInstance mmk;
  for (int b = 0; b < B; ++b) {
    if (!scope.bs[static_cast<std::size_t>(b)]) continue;
    bs_dim[static_cast<std::size_t>(b)] = static_cast<int>(mmk.capacities.size());
    mmk.capacities.push_back(inst.blocks_per_subframe);
  }
  for (std::size_t k = 0; k < links.size(); ++k) {
    if (!scope.fwd[k] || !scope.bs[static_cast<std::size_t>(links[k].a)] || !scope.bs[static_cast<std::size_t>(links[k].b)]) continue;
    link_dim[k] = static_cast<int>(mmk.capacities.size());
    mmk.capacities.push_back(links[k].capacity_bytes);
  }
  std::vector<std::uint32_t> odd;
  if (scope.odd_sets) odd = binding_odd_sets(inst, scope);
  const std::size_t odd_base = mmk.capacities.size();
  for (auto mask : odd) mmk.capacities.push_back(static_cast<std::int64_t>(inst.blocks_per_subframe) * (std::popcount(mask) - 1) / 2);
  const std::size_t D = mmk.capacities.size();

  std::vector<int> owner;                // MMK item -> packet
  std::vector<std::vector<Config>> cfg;  // MMK item choice -> config
  for (std::size_t i = 0; i < inst.packets.size(); ++i) {
    const auto& p = inst.packets[i];
    const auto& u = inst.users[static_cast<std::size_t>(p.user)];
    if (!scope.bs[static_cast<std::size_t>(u.serving)]) continue;
    std::optional<int> jt_link;
    if (p.joint) {
      if (!u.secondary || !scope.bs[static_cast<std::size_t>(*u.secondary)]) continue;
      jt_link = inst.graph.link_index(u.serving, *u.secondary);
      if (!jt_link || !scope.jt[static_cast<std::size_t>(*jt_link)]) continue;
    }
    MmkItem item;
    std::vector<Config> configs;
    if (const auto k = inst.forward_link(p); k && link_dim[static_cast<std::size_t>(*k)] >= 0 && table[i][kForward] > 0.0) {
      MmkChoice ch;
      ch.weights.assign(D, 0);
      ch.weights[static_cast<std::size_t>(link_dim[static_cast<std::size_t>(*k)])] = p.size_bytes;
      ch.value = table[i][kForward];
      item.choices.push_back(std::move(ch));
      configs.push_back(kForward);
    }
    for (Config r = 1; r <= static_cast<int>(p.per_mcs.size()); ++r) {
      if (!(table[i][static_cast<std::size_t>(r)] > 0.0)) continue;
      const auto g = p.per_mcs[static_cast<std::size_t>(r - 1)].blocks_needed;
      MmkChoice ch;
      ch.weights.assign(D, 0);
      ch.weights[static_cast<std::size_t>(bs_dim[static_cast<std::size_t>(u.serving)])] = g;
      if (p.joint) {
        ch.weights[static_cast<std::size_t>(bs_dim[static_cast<std::size_t>(*u.secondary)])] = g;
        for (std::size_t o = 0; o < odd.size(); ++o)
          if ((odd[o] >> u.serving & 1u) && (odd[o] >> *u.secondary & 1u)) ch.weights[odd_base + o] = g;
      }
      ch.value = table[i][static_cast<std::size_t>(r)];
      item.choices.push_back(std::move(ch));
      configs.push_back(r);
    }
    if (item.choices.empty()) continue;
    mmk.items.push_back(std::move(item));
    owner.push_back(static_cast<int>(i));
    cfg.push_back(std::move(configs));
  }

  const auto sel = opts.mmk == MmkSolver::Dp ? solve_mmk_dp(mmk, opts.dp) : solve_mmk_greedy(mmk);
  JtkResult out;
  out.config.assign(inst.packets.size(), kUnscheduled);
  for (std::size_t k = 0; k < owner.size(); ++k)
    if (sel.choice[k] != MmkSelection::kNone)
      out.config[static_cast<std::size_t>(owner[k])] = cfg[k][static_cast<std::size_t>(sel.choice[k])];
  out.utility = summed(table, out.config);
  return out;
}

void require_valid(const Instance& inst) {
  const auto problems = validate_instance(inst);
  if (!problems.empty())
    throw Error(ErrorCode::InvalidInput, fmt::format("{}: {}", problems.front().where, problems.front().rule));
}

}  // namespace

JtkResult solve_jtk_mmk(const Instance& inst, const SolverOptions& opts) {
  require_valid(inst);
  if (!is_bipartite(inst.graph).bipartite) throw Error(ErrorCode::NotBipartite, "joint transmission graph has an odd cycle");
  return solve_scope(inst, utility_table(inst), full_scope(inst), opts);
}

JtkResult solve_jtk_psp(const Instance& inst, const SolverOptions& opts) {
  require_valid(inst);
  if (inst.graph.bs_count > opts.max_psp_bs)
    throw Error(ErrorCode::TooManyBs, fmt::format("{} BSs exceed the odd-set limit of {}", inst.graph.bs_count, opts.max_psp_bs));
  if (!is_planar_series_parallel(inst.graph))
    throw Error(ErrorCode::NotSeriesParallel, "joint transmission graph contains a K4 minor");
  auto scope = full_scope(inst);
  scope.odd_sets = true;
  return solve_scope(inst, utility_table(inst), scope, opts);
}

JtkResult solve_jtk_mat(const Instance& inst, const SolverOptions& opts) {
  require_valid(inst);
  const auto table = utility_table(inst);
  const int B = inst.graph.bs_count;
  JtkResult out;
  out.config.assign(inst.packets.size(), kUnscheduled);
  auto merge = [&](const JtkResult& part) {
    for (std::size_t i = 0; i < part.config.size(); ++i) {
      if (part.config[i] == kUnscheduled) continue;
      if (out.config[i] != kUnscheduled) throw Error(ErrorCode::Internal, fmt::format("packet {} selected by two matched links", i));
      out.config[i] = part.config[i];
    }
  };

  for (int b = 0; b < B; ++b) {
    if (inst.graph.degree(b) > 0) continue;
    auto scope = empty_scope(inst);
    scope.bs[static_cast<std::size_t>(b)] = true;
    merge(solve_scope(inst, table, scope, opts));
  }

  std::vector<JtkResult> per_link;
  std::vector<double> weights;
  for (std::size_t k = 0; k < inst.graph.links.size(); ++k) {
    auto scope = empty_scope(inst);
    scope.bs[static_cast<std::size_t>(inst.graph.links[k].a)] = true;
    scope.bs[static_cast<std::size_t>(inst.graph.links[k].b)] = true;
    scope.jt[k] = scope.fwd[k] = true;
    per_link.push_back(solve_scope(inst, table, scope, opts));
    weights.push_back(per_link.back().utility);
  }
  for (int k : max_weight_matching(inst.graph, weights)) merge(per_link[static_cast<std::size_t>(k)]);
  out.utility = summed(table, out.config);
  return out;
}

JtkResult solve_jtk_sta(const Instance& inst, const SolverOptions& opts) {
  require_valid(inst);
  const auto table = utility_table(inst);
  const int B = inst.graph.bs_count;
  std::vector<bool> alive(static_cast<std::size_t>(B), true);
  std::vector<std::vector<BsIndex>> nbrs(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) nbrs[static_cast<std::size_t>(b)] = inst.graph.neighbors(b);

  auto star = [&](int b) {
    auto scope = empty_scope(inst);
    scope.bs[static_cast<std::size_t>(b)] = true;
    for (int w : nbrs[static_cast<std::size_t>(b)])
      if (alive[static_cast<std::size_t>(w)]) scope.bs[static_cast<std::size_t>(w)] = true;
    for (std::size_t k = 0; k < inst.graph.links.size(); ++k) {
      const auto& l = inst.graph.links[k];
      if (!scope.bs[static_cast<std::size_t>(l.a)] || !scope.bs[static_cast<std::size_t>(l.b)]) continue;
      scope.fwd[k] = true;
      scope.jt[k] = l.a == b || l.b == b;
    }
    return solve_scope(inst, table, scope, opts);
  };

  std::vector<JtkResult> best(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) best[static_cast<std::size_t>(b)] = star(b);

  JtkResult out;
  out.config.assign(inst.packets.size(), kUnscheduled);
  while (std::any_of(alive.begin(), alive.end(), [](bool a) { return a; })) {
    int pick = -1;
    for (int b = 0; b < B; ++b) {
      if (!alive[static_cast<std::size_t>(b)]) continue;
      if (pick < 0 || best[static_cast<std::size_t>(b)].utility > best[static_cast<std::size_t>(pick)].utility) pick = b;
    }
    for (std::size_t i = 0; i < out.config.size(); ++i) {
      const Config c = best[static_cast<std::size_t>(pick)].config[i];
      if (c == kUnscheduled) continue;
      if (out.config[i] != kUnscheduled) throw Error(ErrorCode::Internal, fmt::format("packet {} selected by two stars", i));
      out.config[i] = c;
    }
    std::vector<int> removed{pick};
    for (int w : nbrs[static_cast<std::size_t>(pick)])
      if (alive[static_cast<std::size_t>(w)]) removed.push_back(w);
    for (int r : removed) alive[static_cast<std::size_t>(r)] = false;
    // only stars that lost a neighbor change
    for (int b = 0; b < B; ++b) {
      if (!alive[static_cast<std::size_t>(b)]) continue;
      const auto& nb = nbrs[static_cast<std::size_t>(b)];
      const bool touched = std::any_of(nb.begin(), nb.end(), [&](int w) { return std::find(removed.begin(), removed.end(), w) != removed.end(); });
      if (touched) best[static_cast<std::size_t>(b)] = star(b);
    }
  }
  out.utility = summed(table, out.config);
  return out;
}

std::vector<std::vector<int>> solve_jtc(const Instance& inst, const std::vector<Config>& config) {
  const int S = inst.blocks_per_subframe;
  const auto sb = build_sb_graph(inst, config);
  const auto topo = sb.topology();
  if (topo.max_degree() > S)
    throw Error(ErrorCode::ColoringExceedsS, fmt::format("a BS needs {} blocks, only {} exist", topo.max_degree(), S));

  EdgeColoring coloring;
  if (is_bipartite(topo).bipartite) {
    coloring = edge_color_bipartite(topo, S);
  } else if (is_planar_series_parallel(topo)) {
    coloring = edge_color_series_parallel(topo);
  } else {
    auto found = edge_color_exhaustive(topo, S);
    if (!found) throw Error(ErrorCode::ColoringExceedsS, fmt::format("scheduled-blocks graph is not {}-edge-colorable", S));
    coloring = std::move(*found);
  }
  if (coloring.num_colors > S)
    throw Error(ErrorCode::ColoringExceedsS, fmt::format("coloring needs {} colors, only {} blocks exist", coloring.num_colors, S));

  std::vector<std::vector<int>> blocks(inst.packets.size());
  for (std::size_t e = 0; e < sb.edges.size(); ++e) blocks[static_cast<std::size_t>(sb.edges[e].packet)].push_back(coloring.color[e]);
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  return blocks;
}

Schedule solve_ojs(const Instance& inst, Algorithm algo, const SolverOptions& opts) {
  if (algo == Algorithm::BruteForce) return brute_force_ojs(inst, opts.brute_force_budget);
  JtkResult jtk;
  switch (algo) {
    case Algorithm::MmkBip: jtk = solve_jtk_mmk(inst, opts); break;
    case Algorithm::Mat: jtk = solve_jtk_mat(inst, opts); break;
    case Algorithm::Sta: jtk = solve_jtk_sta(inst, opts); break;
    case Algorithm::Psp: jtk = solve_jtk_psp(inst, opts); break;
    case Algorithm::BruteForce: break;
  }
  Schedule s;
  s.blocks = solve_jtc(inst, jtk.config);
  s.config = std::move(jtk.config);
  s.total_utility = jtk.utility;
  const auto problems = validate_schedule(inst, s);
  if (!problems.empty())
    throw Error(ErrorCode::Internal, fmt::format("{} produced an infeasible schedule: {}: {}", to_string(algo), problems.front().where, problems.front().rule));
  return s;
}

Schedule brute_force_ojs(const Instance& inst, std::int64_t node_budget) {
  require_valid(inst);
  const auto table = utility_table(inst);
  const std::size_t I = inst.packets.size();
  const int S = inst.blocks_per_subframe;

  // options per packet, best value first
  std::vector<std::vector<Config>> options(I);
  std::vector<double> best_left(I + 1, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    const auto& p = inst.packets[i];
    if (inst.forward_link(p) && table[i][kForward] > 0.0) options[i].push_back(kForward);
    for (Config r = 1; r <= static_cast<int>(p.per_mcs.size()); ++r)
      if (table[i][static_cast<std::size_t>(r)] > 0.0) options[i].push_back(r);
    std::stable_sort(options[i].begin(), options[i].end(),
                     [&](Config a, Config b) { return table[i][static_cast<std::size_t>(a)] > table[i][static_cast<std::size_t>(b)]; });
  }
  for (std::size_t i = I; i-- > 0;)
    best_left[i] = best_left[i + 1] + (options[i].empty() ? 0.0 : table[i][static_cast<std::size_t>(options[i].front())]);

  std::vector<int> bs_used(static_cast<std::size_t>(inst.graph.bs_count), 0);
  std::vector<std::int64_t> link_used(inst.graph.links.size(), 0);
  std::vector<Config> cur(I, kUnscheduled), best(I, kUnscheduled);
  std::vector<std::vector<int>> best_blocks(I);
  double best_value = 0.0;
  std::int64_t nodes = 0;

  std::function<void(std::size_t, double)> walk = [&](std::size_t i, double value) {
    if (++nodes > node_budget) throw Error(ErrorCode::SearchSpaceTooLarge, "brute-force search exceeded its node budget");
    if (value + best_left[i] <= best_value) return;
    if (i == I) {
      const auto topo = build_sb_graph(inst, cur).topology();
      const auto coloring = edge_color_exhaustive(topo, S, node_budget);
      if (!coloring) return;
      best_value = summed(table, cur);
      best = cur;
      for (auto& b : best_blocks) b.clear();
      const auto sb = build_sb_graph(inst, cur);
      for (std::size_t e = 0; e < sb.edges.size(); ++e) best_blocks[static_cast<std::size_t>(sb.edges[e].packet)].push_back(coloring->color[e]);
      for (auto& b : best_blocks) std::sort(b.begin(), b.end());
      return;
    }
    const auto& p = inst.packets[i];
    for (Config r : options[i]) {
      if (r == kForward) {
        const auto k = static_cast<std::size_t>(*inst.forward_link(p));
        if (link_used[k] + p.size_bytes > inst.graph.links[k].capacity_bytes) continue;
        link_used[k] += p.size_bytes;
        cur[i] = r;
        walk(i + 1, value + table[i][kForward]);
        link_used[k] -= p.size_bytes;
      } else {
        const int g = p.per_mcs[static_cast<std::size_t>(r - 1)].blocks_needed;
        const auto tx = inst.transmitters(p);
        if (std::any_of(tx.begin(), tx.end(), [&](int b) { return bs_used[static_cast<std::size_t>(b)] + g > S; })) continue;
        for (int b : tx) bs_used[static_cast<std::size_t>(b)] += g;
        cur[i] = r;
        walk(i + 1, value + table[i][static_cast<std::size_t>(r)]);
        for (int b : tx) bs_used[static_cast<std::size_t>(b)] -= g;
      }
      cur[i] = kUnscheduled;
    }
    walk(i + 1, value);
  };
  walk(0, 0.0);

  Schedule s;
  s.config = std::move(best);
  s.blocks = std::move(best_blocks);
  s.total_utility = summed(table, s.config);
  return s;
}

std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& sched) {
  std::vector<Violation> out;
  auto add = [&out](std::string where, std::string rule) { out.push_back({std::move(where), std::move(rule)}); };
  const std::size_t I = inst.packets.size();
  if (sched.config.size() != I || sched.blocks.size() != I) {
    add("schedule", fmt::format("expected {} packet entries", I));
    return out;
  }
  const int S = inst.blocks_per_subframe;
  std::map<std::pair<int, int>, std::size_t> block_owner;  // (BS, block) -> packet
  std::vector<std::int64_t> link_used(inst.graph.links.size(), 0);
  for (std::size_t i = 0; i < I; ++i) {
    const auto& p = inst.packets[i];
    const Config r = sched.config[i];
    const auto& blocks = sched.blocks[i];
    auto where = [i] { return fmt::format("packets[{}]", i); };
    if (r < kUnscheduled || r > static_cast<int>(p.per_mcs.size())) {
      add(where(), fmt::format("unknown configuration {}", r));
      continue;
    }
    if (r == kForward) {
      if (p.joint) add(where(), "joint-queue packet forwarded over the backhaul");
      const auto k = inst.forward_link(p);
      if (!k) add(where(), "forward without a backhaul link to a secondary BS");
      else link_used[static_cast<std::size_t>(*k)] += p.size_bytes;
    }
    const int want = r >= 1 ? p.per_mcs[static_cast<std::size_t>(r - 1)].blocks_needed : 0;
    if (static_cast<int>(blocks.size()) != want)
      add(where(), fmt::format("{} blocks assigned, configuration needs {}", blocks.size(), want));
    std::vector<int> sorted = blocks;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) add(where(), "same block assigned twice");
    if (r < 1) continue;
    for (int s : sorted) {
      if (s < 1 || s > S) {
        add(where(), fmt::format("block {} outside 1..{}", s, S));
        continue;
      }
      for (int b : inst.transmitters(p)) {
        auto [it, fresh] = block_owner.try_emplace({b, s}, i);
        if (!fresh && it->second != i)
          add(fmt::format("BS {} block {}", b, s), fmt::format("used by packets {} and {}", it->second, i));
      }
    }
  }
  for (std::size_t k = 0; k < link_used.size(); ++k)
    if (link_used[k] > inst.graph.links[k].capacity_bytes)
      add(fmt::format("link {}-{}", inst.graph.links[k].a, inst.graph.links[k].b),
          fmt::format("forwards {} bytes over capacity {}", link_used[k], inst.graph.links[k].capacity_bytes));
  if (out.empty()) {
    const double expect = schedule_utility(inst, sched.config);
    if (std::abs(expect - sched.total_utility) > 1e-9 * std::max(1.0, std::abs(expect)))
      add("total_utility", fmt::format("reported {} but configurations sum to {}", sched.total_utility, expect));
  }
  return out;
}

}  // namespace ojs
