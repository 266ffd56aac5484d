#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ojs/queueing.hpp"
#include "ojs/scenario.hpp"

namespace ojs {

inline constexpr int kSchemaVersion = 1;
std::string build_id();

struct MetricValue {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

/// Mean and standard error of the finite entries of `xs`.
MetricValue summarize(const std::string& name, const std::vector<double>& xs);

struct RunOptions {
  int jobs = 1;
  bool check_maxweight = false;
};

/// Draws user positions for one replication and evaluates their channels.
Network make_network(const Scenario& s, Rng& rng);

struct ReplicationOutcome {
  double throughput_all = 0.0;
  double throughput_inter = 0.0;  // NaN without inter-cell users
  double throughput_intra = 0.0;  // NaN without intra-cell users
  double queue_mean = 0.0;
  double queue_final = 0.0;
  std::vector<double> queue_trace;  // total queued packets after each subframe
  double max_maxweight_error = 0.0;  // relative
};

/// One replication with its own stream seeded from (s.seed, index).
ReplicationOutcome run_replication(const Scenario& s, int index, const RunOptions& opts);

struct SimMetrics {
  std::vector<MetricValue> metrics;
  std::vector<double> mean_queue_trace;
  std::optional<Verdict> verdict;  // of mean_queue_trace, when long enough
  double max_maxweight_error = 0.0;
};

/// Replications fan out over opts.jobs threads; aggregation follows
/// replication order, so results do not depend on the thread count.
SimMetrics run_simulation(const Scenario& s, const RunOptions& opts = {});

enum class SweepAxis { Backhaul, ArrivalRate, Users };
std::string_view to_string(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view name);
Scenario apply_axis(const Scenario& s, SweepAxis axis, double value);

struct ResultRow {
  double value = 0.0;
  MetricValue metric;
};

struct ResultTable {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::string axis;
  std::vector<ResultRow> rows;
};

ResultTable run_sweep(const Scenario& s, SweepAxis axis, const std::vector<double>& values, const RunOptions& opts = {});

struct RatioBenchOptions {
  std::string topology = "complete3";  // complete3 | bipartite3
  std::vector<int> users{1, 2, 3, 5, 8, 10, 15, 20, 25, 30, 35, 40};
  int samples = 1000;
  std::uint64_t seed = 1;
  int jobs = 1;
  int blocks_per_subframe = 4;
  double backhaul_packets = 1.0;
  double gamma = 1e-3;
};

/// Algorithm whose DP variant is optimal on the bench topology.
Algorithm ratio_baseline(const std::string& topology);

/// Single-subframe instance: users dropped in the 3-BS cluster, each with one
/// primary-queue packet and, given a secondary BS, one joint-queue packet;
/// throughput utility.
Instance sample_ratio_instance(const Scenario& cluster, const RatioBenchOptions& opts, int users, Rng& rng);

/// Mean ratio of each algorithm/solver pair to the optimal baseline, one
/// metric per pair named "<algorithm>/<solver>", plus the mean ratio of each
/// algorithm's greedy variant to its DP variant, "<algorithm>/greedy_over_dp".
ResultTable run_ratio_bench(const RatioBenchOptions& opts);

void write_csv(std::ostream& out, const ResultTable& t);
nlohmann::json to_json(const ResultTable& t);

}  // namespace ojs
