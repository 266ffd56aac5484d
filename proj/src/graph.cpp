#include "ojs/graph.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <set>

#include <fmt/format.h>

#include "ojs/error.hpp"

namespace ojs {

std::vector<int> Multigraph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) {
    ++deg[static_cast<std::size_t>(e[0])];
    ++deg[static_cast<std::size_t>(e[1])];
  }
  return deg;
}

int Multigraph::max_degree() const {
  const auto deg = degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

Multigraph SbGraph::topology() const {
  Multigraph g;
  g.n = vertex_count();
  g.edges.reserve(edges.size());
  for (const auto& e : edges) g.edges.push_back({e.u, e.v});
  return g;
}

SbGraph build_sb_graph(const Instance& inst, const std::vector<Config>& config) {
  SbGraph g;
  g.bs_count = inst.graph.bs_count;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Config r = config[i];
    if (r <= kForward) continue;
    const auto& p = inst.packets[i];
    const auto& u = inst.users[static_cast<std::size_t>(p.user)];
    const int other = p.joint ? *u.secondary : g.bs_count + u.serving;
    const int copies = p.per_mcs[static_cast<std::size_t>(r - 1)].blocks_needed;
    for (int c = 0; c < copies; ++c) g.edges.push_back({u.serving, other, static_cast<int>(i), r});
  }
  return g;
}

namespace {

Multigraph as_multigraph(const JtGraph& g) {
  Multigraph m;
  m.n = g.bs_count;
  for (const auto& l : g.links) m.edges.push_back({l.a, l.b});
  return m;
}

std::vector<std::vector<std::pair<int, int>>> incidence(const Multigraph& g) {
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(g.n));
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto [a, b] = g.edges[k];
    adj[static_cast<std::size_t>(a)].push_back({b, static_cast<int>(k)});
    adj[static_cast<std::size_t>(b)].push_back({a, static_cast<int>(k)});
  }
  return adj;
}

}  // namespace

BipartiteCheck is_bipartite(const Multigraph& g) {
  BipartiteCheck out;
  const auto adj = incidence(g);
  std::vector<int> side(static_cast<std::size_t>(g.n), -1), parent(static_cast<std::size_t>(g.n), -1);
  for (int root = 0; root < g.n; ++root) {
    if (side[static_cast<std::size_t>(root)] != -1) continue;
    side[static_cast<std::size_t>(root)] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      for (const auto& [y, k] : adj[static_cast<std::size_t>(x)]) {
        if (side[static_cast<std::size_t>(y)] == -1) {
          side[static_cast<std::size_t>(y)] = 1 - side[static_cast<std::size_t>(x)];
          parent[static_cast<std::size_t>(y)] = x;
          queue.push_back(y);
        } else if (side[static_cast<std::size_t>(y)] == side[static_cast<std::size_t>(x)]) {
          // x and y sit at the same BFS parity: join their tree paths
          std::vector<int> px{x}, py{y};
          while (parent[static_cast<std::size_t>(px.back())] != -1) px.push_back(parent[static_cast<std::size_t>(px.back())]);
          while (parent[static_cast<std::size_t>(py.back())] != -1) py.push_back(parent[static_cast<std::size_t>(py.back())]);
          while (px.size() > 1 && py.size() > 1 && px[px.size() - 2] == py[py.size() - 2]) {
            px.pop_back();
            py.pop_back();
          }
          out.bipartite = false;
          out.odd_cycle.assign(px.begin(), px.end());
          for (auto it = py.rbegin() + 1; it != py.rend(); ++it) out.odd_cycle.push_back(*it);
          return out;
        }
      }
    }
  }
  out.side = std::move(side);
  return out;
}

BipartiteCheck is_bipartite(const JtGraph& g) { return is_bipartite(as_multigraph(g)); }

EdgeColoring edge_color_bipartite(const Multigraph& g, int s) {
  if (!is_bipartite(g).bipartite) throw Error(ErrorCode::NotBipartite, "scheduled-blocks graph has an odd cycle");
  const int delta = g.max_degree();
  if (delta > s) throw Error(ErrorCode::DegreeExceedsS, fmt::format("max degree {} exceeds {} blocks", delta, s));

  EdgeColoring out;
  out.color.assign(g.edges.size(), 0);
  out.num_colors = delta;
  if (g.edges.empty()) return out;

  // at[v][c]: edge colored c at v, or -1 (colors 0-based internally)
  std::vector<std::vector<int>> at(static_cast<std::size_t>(g.n), std::vector<int>(static_cast<std::size_t>(delta), -1));
  auto free_color = [&](int v) {
    const auto& row = at[static_cast<std::size_t>(v)];
    return static_cast<int>(std::find(row.begin(), row.end(), -1) - row.begin());
  };
  auto other = [&](int k, int v) { return g.edges[static_cast<std::size_t>(k)][0] == v ? g.edges[static_cast<std::size_t>(k)][1] : g.edges[static_cast<std::size_t>(k)][0]; };

  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const int u = g.edges[k][0];
    const int v = g.edges[k][1];
    const int a = free_color(u);
    const int b = free_color(v);
    if (at[static_cast<std::size_t>(v)][static_cast<std::size_t>(a)] != -1) {
      // swap a/b along the alternating path leaving v on color a
      std::vector<int> path;
      int x = v;
      int c = a;
      while (at[static_cast<std::size_t>(x)][static_cast<std::size_t>(c)] != -1) {
        const int e = at[static_cast<std::size_t>(x)][static_cast<std::size_t>(c)];
        path.push_back(e);
        x = other(e, x);
        c = c == a ? b : a;
      }
      for (int e : path) {
        const int col = out.color[static_cast<std::size_t>(e)] - 1;
        for (int end : g.edges[static_cast<std::size_t>(e)]) at[static_cast<std::size_t>(end)][static_cast<std::size_t>(col)] = -1;
      }
      for (int e : path) {
        const int col = out.color[static_cast<std::size_t>(e)] - 1 == a ? b : a;
        out.color[static_cast<std::size_t>(e)] = col + 1;
        for (int end : g.edges[static_cast<std::size_t>(e)]) at[static_cast<std::size_t>(end)][static_cast<std::size_t>(col)] = e;
      }
    }
    out.color[k] = a + 1;
    at[static_cast<std::size_t>(u)][static_cast<std::size_t>(a)] = static_cast<int>(k);
    at[static_cast<std::size_t>(v)][static_cast<std::size_t>(a)] = static_cast<int>(k);
  }
  return out;
}

bool is_planar_series_parallel(const Multigraph& g) {
  std::vector<std::set<int>> adj(static_cast<std::size_t>(g.n));
  for (const auto& [a, b] : g.edges) {
    if (a == b) continue;
    adj[static_cast<std::size_t>(a)].insert(b);
    adj[static_cast<std::size_t>(b)].insert(a);
  }
  std::deque<int> work;
  for (int v = 0; v < g.n; ++v) work.push_back(v);
  while (!work.empty()) {
    const int v = work.front();
    work.pop_front();
    auto& nv = adj[static_cast<std::size_t>(v)];
    if (nv.empty() || nv.size() > 2) continue;
    const std::vector<int> nb(nv.begin(), nv.end());
    for (int u : nb) adj[static_cast<std::size_t>(u)].erase(v);
    nv.clear();
    if (nb.size() == 2) {
      adj[static_cast<std::size_t>(nb[0])].insert(nb[1]);
      adj[static_cast<std::size_t>(nb[1])].insert(nb[0]);
    }
    for (int u : nb) work.push_back(u);
  }
  return std::all_of(adj.begin(), adj.end(), [](const std::set<int>& s) { return s.empty(); });
}

bool is_planar_series_parallel(const JtGraph& g) { return is_planar_series_parallel(as_multigraph(g)); }

int odd_set_density(const Multigraph& g, int max_vertices) {
  const auto deg = g.degrees();
  std::vector<int> verts;
  for (int v = 0; v < g.n; ++v)
    if (deg[static_cast<std::size_t>(v)] > 0) verts.push_back(v);
  const int V = static_cast<int>(verts.size());
  if (V > max_vertices) throw Error(ErrorCode::TooManyBs, fmt::format("{} vertices exceed the odd-set limit of {}", V, max_vertices));
  if (V < 3) return 0;

  std::vector<int> pos(static_cast<std::size_t>(g.n), -1);
  for (int k = 0; k < V; ++k) pos[static_cast<std::size_t>(verts[static_cast<std::size_t>(k)])] = k;
  std::vector<std::vector<int>> mult(static_cast<std::size_t>(V), std::vector<int>(static_cast<std::size_t>(V), 0));
  for (const auto& [a, b] : g.edges) {
    const int pa = pos[static_cast<std::size_t>(a)], pb = pos[static_cast<std::size_t>(b)];
    ++mult[static_cast<std::size_t>(pa)][static_cast<std::size_t>(pb)];
    ++mult[static_cast<std::size_t>(pb)][static_cast<std::size_t>(pa)];
  }

  const std::uint32_t full = 1u << V;
  std::vector<int> inner(full, 0);  // edges inside each subset
  int best = 0;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const int low = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    int add = 0;
    for (std::uint32_t m = rest; m; m &= m - 1) add += mult[static_cast<std::size_t>(low)][static_cast<std::size_t>(std::countr_zero(m))];
    inner[mask] = inner[rest] + add;
    const int size = std::popcount(mask);
    if (size >= 3 && size % 2 == 1) {
      const int denom = size - 1;
      best = std::max(best, (2 * inner[mask] + denom - 1) / denom);
    }
  }
  return best;
}

namespace {

struct PendantSplit {
  std::vector<bool> pendant;  // vertex is hung off a single kept neighbor
  Multigraph core;
  std::vector<int> core_edge;  // core edge -> original edge index
};

PendantSplit split_pendants(const Multigraph& g) {
  PendantSplit out;
  std::vector<std::set<int>> nbrs(static_cast<std::size_t>(g.n));
  for (const auto& [a, b] : g.edges) {
    nbrs[static_cast<std::size_t>(a)].insert(b);
    nbrs[static_cast<std::size_t>(b)].insert(a);
  }
  out.pendant.assign(static_cast<std::size_t>(g.n), false);
  std::vector<bool> anchor(static_cast<std::size_t>(g.n), false);
  for (int v = 0; v < g.n; ++v) {
    const auto& nv = nbrs[static_cast<std::size_t>(v)];
    if (nv.size() != 1 || anchor[static_cast<std::size_t>(v)]) continue;
    const int u = *nv.begin();
    if (out.pendant[static_cast<std::size_t>(u)]) continue;
    out.pendant[static_cast<std::size_t>(v)] = true;
    anchor[static_cast<std::size_t>(u)] = true;
  }
  out.core.n = g.n;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto [a, b] = g.edges[k];
    if (out.pendant[static_cast<std::size_t>(a)] || out.pendant[static_cast<std::size_t>(b)]) continue;
    out.core.edges.push_back(g.edges[k]);
    out.core_edge.push_back(static_cast<int>(k));
  }
  return out;
}

int chromatic_bound(const Multigraph& g) { return std::max(g.max_degree(), odd_set_density(g)); }

}  // namespace

int series_parallel_chromatic_index(const Multigraph& g) {
  const auto split = split_pendants(g);
  return std::max(g.max_degree(), odd_set_density(split.core));
}

EdgeColoring edge_color_series_parallel(const Multigraph& g) {
  if (!is_planar_series_parallel(g)) throw Error(ErrorCode::NotSeriesParallel, "graph contains a K4 minor");
  const auto split = split_pendants(g);
  const int k = std::max(g.max_degree(), odd_set_density(split.core));

  EdgeColoring out;
  out.color.assign(g.edges.size(), 0);
  out.num_colors = k;

  // distinct vertex pairs of the core with their multiplicities
  std::vector<std::array<int, 2>> pairs;
  std::vector<std::vector<int>> pair_edges;
  for (std::size_t c = 0; c < split.core.edges.size(); ++c) {
    auto e = split.core.edges[c];
    if (e[0] > e[1]) std::swap(e[0], e[1]);
    auto it = std::find(pairs.begin(), pairs.end(), e);
    if (it == pairs.end()) {
      pairs.push_back(e);
      pair_edges.emplace_back();
      it = pairs.end() - 1;
    }
    pair_edges[static_cast<std::size_t>(it - pairs.begin())].push_back(split.core_edge[c]);
  }
  std::vector<int> left(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) left[p] = static_cast<int>(pair_edges[p].size());

  auto residual = [&](const std::vector<int>& take) {
    Multigraph r;
    r.n = g.n;
    for (std::size_t p = 0; p < pairs.size(); ++p)
      for (int c = 0; c < left[p] - take[p]; ++c) r.edges.push_back(pairs[p]);
    return r;
  };

  // Peel one matching per color; each residual stays series-parallel, so its
  // chromatic index equals its bound and a matching that lowers the bound to
  // the remaining color count always exists.
  for (int color = 1; color <= k; ++color) {
    if (std::all_of(left.begin(), left.end(), [](int x) { return x == 0; })) break;
    const int remaining_after = k - color;
    std::vector<int> take(pairs.size(), 0);
    std::vector<bool> busy(static_cast<std::size_t>(g.n), false);
    bool found = false;
    std::function<void(std::size_t)> search = [&](std::size_t p) {
      if (found) return;
      if (p == pairs.size()) {
        if (chromatic_bound(residual(take)) <= remaining_after) found = true;
        return;
      }
      const auto [a, b] = pairs[p];
      if (left[p] > 0 && !busy[static_cast<std::size_t>(a)] && !busy[static_cast<std::size_t>(b)]) {
        take[p] = 1;
        busy[static_cast<std::size_t>(a)] = busy[static_cast<std::size_t>(b)] = true;
        search(p + 1);
        if (found) return;
        take[p] = 0;
        busy[static_cast<std::size_t>(a)] = busy[static_cast<std::size_t>(b)] = false;
      }
      search(p + 1);
    };
    search(0);
    if (!found) throw Error(ErrorCode::Internal, fmt::format("no color class found for color {} of {}", color, k));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (!take[p]) continue;
      const int edge = pair_edges[p][pair_edges[p].size() - static_cast<std::size_t>(left[p])];
      out.color[static_cast<std::size_t>(edge)] = color;
      --left[p];
    }
  }

  std::vector<std::vector<bool>> used(static_cast<std::size_t>(g.n), std::vector<bool>(static_cast<std::size_t>(k) + 1, false));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (out.color[e] == 0) continue;
    for (int v : g.edges[e]) used[static_cast<std::size_t>(v)][static_cast<std::size_t>(out.color[e])] = true;
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (out.color[e] != 0) continue;
    const auto [a, b] = g.edges[e];
    int c = 1;
    while (c <= k && (used[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] || used[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)])) ++c;
    if (c > k) throw Error(ErrorCode::Internal, "pendant edge left without a free color");
    out.color[e] = c;
    used[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = used[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = true;
  }
  return out;
}

std::optional<EdgeColoring> edge_color_exhaustive(const Multigraph& g, int k, std::int64_t node_budget) {
  EdgeColoring out;
  out.color.assign(g.edges.size(), 0);
  if (g.edges.empty()) return out;
  if (g.max_degree() > k) return std::nullopt;

  std::vector<int> order(g.edges.size());
  for (std::size_t e = 0; e < order.size(); ++e) order[e] = static_cast<int>(e);
  auto key = [&](int e) {
    const auto [a, b] = g.edges[static_cast<std::size_t>(e)];
    return std::array<int, 3>{std::min(a, b), std::max(a, b), e};
  };
  std::sort(order.begin(), order.end(), [&](int x, int y) { return key(x) < key(y); });

  std::vector<std::vector<bool>> used(static_cast<std::size_t>(g.n), std::vector<bool>(static_cast<std::size_t>(k) + 1, false));
  std::int64_t nodes = 0;
  std::function<bool(std::size_t, int)> place = [&](std::size_t pos, int max_used) -> bool {
    if (pos == order.size()) return true;
    if (++nodes > node_budget) throw Error(ErrorCode::SearchSpaceTooLarge, "edge coloring search exceeded its node budget");
    const int e = order[pos];
    const auto [a, b] = g.edges[static_cast<std::size_t>(e)];
    int lowest = 1;
    if (pos > 0) {
      const int prev = order[pos - 1];
      if (key(prev)[0] == key(e)[0] && key(prev)[1] == key(e)[1]) lowest = out.color[static_cast<std::size_t>(prev)] + 1;
    }
    const int top = std::min(k, max_used + 1);
    for (int c = lowest; c <= top; ++c) {
      if (used[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] || used[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = used[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = true;
      out.color[static_cast<std::size_t>(e)] = c;
      if (place(pos + 1, std::max(max_used, c))) return true;
      used[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = used[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = false;
    }
    out.color[static_cast<std::size_t>(e)] = 0;
    return false;
  };
  if (!place(0, 0)) return std::nullopt;
  out.num_colors = *std::max_element(out.color.begin(), out.color.end());
  return out;
}

bool is_proper_coloring(const Multigraph& g, const EdgeColoring& c) {
  if (c.color.size() != g.edges.size()) return false;
  std::set<std::pair<int, int>> seen;  // (vertex, color)
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int col = c.color[e];
    if (col < 1 || col > c.num_colors) return false;
    for (int v : g.edges[e])
      if (!seen.insert({v, col}).second) return false;
  }
  return true;
}

std::vector<int> max_weight_matching(const JtGraph& g, const std::vector<double>& weights, int max_edges) {
  const int C = static_cast<int>(g.links.size());
  if (static_cast<int>(weights.size()) != C) throw Error(ErrorCode::InvalidInput, "one weight per backhaul link is required");
  if (C > max_edges) throw Error(ErrorCode::GraphTooLarge, fmt::format("{} links exceed the matching limit of {}", C, max_edges));

  std::vector<int> best, cur;
  double best_w = -1.0;
  std::vector<bool> busy(static_cast<std::size_t>(g.bs_count), false);
  std::function<void(int)> walk = [&](int k) {
    if (k == C) {
      double w = 0.0;
      for (int e : cur) w += weights[static_cast<std::size_t>(e)];
      if (w > best_w || (w == best_w && cur < best)) {
        best_w = w;
        best = cur;
      }
      return;
    }
    const auto& l = g.links[static_cast<std::size_t>(k)];
    if (!busy[static_cast<std::size_t>(l.a)] && !busy[static_cast<std::size_t>(l.b)]) {
      busy[static_cast<std::size_t>(l.a)] = busy[static_cast<std::size_t>(l.b)] = true;
      cur.push_back(k);
      walk(k + 1);
      cur.pop_back();
      busy[static_cast<std::size_t>(l.a)] = busy[static_cast<std::size_t>(l.b)] = false;
    }
    walk(k + 1);
  };
  walk(0);
  return best;
}

}  // namespace ojs
