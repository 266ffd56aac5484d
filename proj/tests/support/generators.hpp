#pragma once
// Random instances for property tests. Probabilities are multiples of 1/8 and
// gamma is 1/1024, so every utility sum is exact in binary floating point and
// optimal values can be compared with ==.

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "ojs/graph.hpp"
#include "ojs/model.hpp"
#include "ojs/rng.hpp"

namespace gen {

enum class Topology { Bipartite, SeriesParallel, Any };

struct Params {
  Topology topology = Topology::Any;
  int min_bs = 2;
  int max_bs = 4;
  int max_packets = 6;
  int max_mcs = 2;
  int max_blocks = 3;      // S
  int max_capacity = 2;    // backhaul, in 73-byte packets
  bool queue_utility = false;
};

inline int uniform_int(ojs::Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

inline double eighths(ojs::Rng& rng, int lo = 0) { return uniform_int(rng, lo, 8) / 8.0; }

inline std::vector<std::array<int, 2>> random_links(ojs::Rng& rng, int B, Topology t) {
  std::vector<std::array<int, 2>> links;
  switch (t) {
    case Topology::Bipartite: {
      std::vector<int> side(static_cast<std::size_t>(B));
      for (auto& s : side) s = rng.bernoulli(0.5) ? 1 : 0;
      for (int a = 0; a < B; ++a)
        for (int b = a + 1; b < B; ++b)
          if (side[static_cast<std::size_t>(a)] != side[static_cast<std::size_t>(b)] && rng.bernoulli(0.8)) links.push_back({a, b});
      break;
    }
    case Topology::SeriesParallel: {
      // on at most four vertices everything but K4 is series-parallel; half
      // the time force a triangle so odd sets matter
      do {
        links.clear();
        const bool triangle = B >= 3 && rng.bernoulli(0.5);
        for (int a = 0; a < B; ++a)
          for (int b = a + 1; b < B; ++b)
            if ((triangle && b < 3) || rng.bernoulli(0.6)) links.push_back({a, b});
      } while (static_cast<int>(links.size()) == B * (B - 1) / 2 && B >= 4);
      break;
    }
    case Topology::Any:
      for (int a = 0; a < B; ++a)
        for (int b = a + 1; b < B; ++b)
          if (rng.bernoulli(0.65)) links.push_back({a, b});
      break;
  }
  return links;
}

inline ojs::Instance random_instance(ojs::Rng& rng, const Params& prm) {
  ojs::Instance inst;
  const int B = uniform_int(rng, prm.min_bs, prm.max_bs);
  inst.graph.bs_count = B;
  for (const auto& l : random_links(rng, B, prm.topology))
    inst.graph.links.push_back({l[0], l[1], 73 * uniform_int(rng, 0, prm.max_capacity)});
  inst.blocks_per_subframe = uniform_int(rng, 1, prm.max_blocks);

  const int I = uniform_int(rng, 1, prm.max_packets);
  const int N = uniform_int(rng, 1, std::min(I, B + 1));
  for (int n = 0; n < N; ++n) {
    ojs::UserAssignment u;
    u.serving = uniform_int(rng, 0, B - 1);
    const auto nb = inst.graph.neighbors(u.serving);
    if (!nb.empty() && rng.bernoulli(0.75)) u.secondary = nb[rng.below(nb.size())];
    inst.users.push_back(u);
  }

  const int M = uniform_int(rng, 1, prm.max_mcs);
  std::vector<int> gamma(static_cast<std::size_t>(M));
  for (auto& g : gamma) g = uniform_int(rng, 1, std::min(2, inst.blocks_per_subframe));
  static constexpr std::int64_t kSizes[] = {40, 73, 73, 100, 146};
  for (int i = 0; i < I; ++i) {
    ojs::Packet p;
    p.id = i;
    p.user = uniform_int(rng, 0, N - 1);
    p.joint = inst.users[static_cast<std::size_t>(p.user)].secondary.has_value() && rng.bernoulli(0.35);
    p.size_bytes = kSizes[rng.below(5)];
    for (int m = 0; m < M; ++m) p.per_mcs.push_back({gamma[static_cast<std::size_t>(m)], eighths(rng)});
    inst.packets.push_back(std::move(p));
  }
  // joint transmissions are never worse than single ones for the same user
  for (auto& p : inst.packets) {
    if (!p.joint) continue;
    for (const auto& q : inst.packets)
      if (!q.joint && q.user == p.user)
        for (int m = 0; m < M; ++m)
          p.per_mcs[static_cast<std::size_t>(m)].success_prob =
              std::max(p.per_mcs[static_cast<std::size_t>(m)].success_prob, q.per_mcs[static_cast<std::size_t>(m)].success_prob);
  }

  inst.utility.gamma = 1.0 / 1024.0;
  if (prm.queue_utility) {
    inst.utility.kind = ojs::UtilityKind::QueueBased;
    for (int n = 0; n < N; ++n) inst.utility.queues.push_back({uniform_int(rng, 0, 12), uniform_int(rng, 0, 6)});
  }
  return inst;
}

/// Random multigraph with parallel edges on n vertices.
inline ojs::Multigraph random_multigraph(ojs::Rng& rng, int n, int edges) {
  ojs::Multigraph g;
  g.n = n;
  for (int e = 0; e < edges; ++e) {
    const int u = uniform_int(rng, 0, n - 1);
    int v = uniform_int(rng, 0, n - 2);
    if (v >= u) ++v;
    g.edges.push_back({u, v});
  }
  return g;
}

/// Random series-parallel multigraph grown by series and parallel
/// compositions of a single edge, plus pendant edges.
inline ojs::Multigraph random_sp_multigraph(ojs::Rng& rng, int ops) {
  ojs::Multigraph g;
  g.n = 2;
  g.edges.push_back({0, 1});
  for (int k = 0; k < ops; ++k) {
    const auto e = rng.below(g.edges.size());
    const double r = rng.uniform();
    if (r < 0.4) {
      g.edges.push_back(g.edges[e]);  // parallel
    } else if (r < 0.8) {
      const int w = g.n++;  // subdivide
      const auto [a, b] = g.edges[e];
      g.edges[e] = {a, w};
      g.edges.push_back({w, b});
    } else {
      const int w = g.n++;  // pendant
      g.edges.push_back({uniform_int(rng, 0, w - 1), w});
    }
  }
  return g;
}

}  // namespace gen
