#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ojs/model.hpp"

namespace ojs {

/// Undirected multigraph on vertices 0..n-1. Parallel edges allowed, no loops.
struct Multigraph {
  int n = 0;
  std::vector<std::array<int, 2>> edges;

  std::vector<int> degrees() const;
  int max_degree() const;
};

/// One scheduled-block edge: a wireless transmission of `packet` with MCS
/// `config` needs one block on each endpoint. Single transmissions join the
/// serving BS b to its dummy mirror B + b.
struct SbEdge {
  int u = 0;
  int v = 0;
  int packet = 0;
  Config config = 1;
};

struct SbGraph {
  int bs_count = 0;
  std::vector<SbEdge> edges;

  int vertex_count() const { return 2 * bs_count; }
  Multigraph topology() const;
};

/// Per-packet choice: kUnscheduled, kForward, or an MCS 1..M.
inline constexpr Config kUnscheduled = -1;

/// Adds Γ(i,m) parallel edges for every wireless selection in `config`.
SbGraph build_sb_graph(const Instance& inst, const std::vector<Config>& config);

struct BipartiteCheck {
  bool bipartite = true;
  std::vector<int> side;       // 0/1 per vertex when bipartite
  std::vector<int> odd_cycle;  // vertex sequence of an odd cycle otherwise
};

BipartiteCheck is_bipartite(const Multigraph& g);
BipartiteCheck is_bipartite(const JtGraph& g);

struct EdgeColoring {
  std::vector<int> color;  // per edge, 1-based
  int num_colors = 0;
};

/// Colors with exactly Δ(g) colors by alternating-path recoloring.
/// Throws NotBipartite, DegreeExceedsS when Δ(g) > s.
EdgeColoring edge_color_bipartite(const Multigraph& g, int s);

/// True iff the underlying simple graph has no K4 minor, decided by repeated
/// loop/parallel/degree-1/degree-2 reductions.
bool is_planar_series_parallel(const Multigraph& g);
bool is_planar_series_parallel(const JtGraph& g);

/// max over odd sets U of non-isolated vertices, |U| >= 3, of
/// ceil(2|E_U| / (|U| - 1)). Isolated vertices never raise the value above Δ.
/// Throws TooManyBs past `max_vertices` non-isolated vertices.
int odd_set_density(const Multigraph& g, int max_vertices = 16);

/// max(Δ, odd_set_density): the chromatic index of a series-parallel multigraph.
int series_parallel_chromatic_index(const Multigraph& g);

/// Colors a series-parallel multigraph with series_parallel_chromatic_index
/// colors. Vertices of degree one hanging off a single neighbor (dummy BS
/// mirrors) are colored last.
/// Throws NotSeriesParallel.
EdgeColoring edge_color_series_parallel(const Multigraph& g);

/// Backtracking search for a proper coloring with at most `k` colors.
/// Returns an empty optional when none exists. Throws SearchSpaceTooLarge
/// past `node_budget` search nodes.
std::optional<EdgeColoring> edge_color_exhaustive(const Multigraph& g, int k, std::int64_t node_budget = 20'000'000);

bool is_proper_coloring(const Multigraph& g, const EdgeColoring& c);

/// Exact maximum-weight matching by enumeration. Returns sorted link indices;
/// ties go to the lexicographically smallest index list.
/// Throws GraphTooLarge past `max_edges` links.
std::vector<int> max_weight_matching(const JtGraph& g, const std::vector<double>& weights, int max_edges = 24);

}  // namespace ojs
