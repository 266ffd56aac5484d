#include "ojs/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "ojs/error.hpp"
#include "ojs/io.hpp"

#ifndef OJS_BUILD_ID
#define OJS_BUILD_ID "dev"
#endif

namespace ojs {

using nlohmann::json;

std::string build_id() { return OJS_BUILD_ID; }

namespace {

/// Runs body(k) for k in [0, count) on up to `jobs` threads. The exception of
/// the lowest failing index is rethrown.
template <typename F>
void parallel_for(int count, int jobs, F&& body) {
  jobs = std::max(1, std::min(jobs, count));
  std::atomic<int> next{0};
  std::mutex mu;
  int failed_at = std::numeric_limits<int>::max();
  std::exception_ptr failure;
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(mu);
        if (k < failed_at) {
          failed_at = k;
          failure = std::current_exception();
        }
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

MetricValue summarize(const std::string& name, const std::vector<double>& xs) {
  MetricValue m;
  m.name = name;
  double sum = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++m.n;
    }
  if (m.n == 0) {
    m.mean = kNaN;
    m.std_error = kNaN;
    return m;
  }
  m.mean = sum / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double x : xs)
      if (std::isfinite(x)) ss += (x - m.mean) * (x - m.mean);
    m.std_error = std::sqrt(ss / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
  }
  return m;
}

Network make_network(const Scenario& s, Rng& rng) {
  Network net;
  net.graph = scenario_graph(s);
  net.blocks_per_packet = s.blocks_per_packet;
  net.blocks_per_subframe = s.blocks_per_subframe;
  net.packet_bytes = s.packet_bytes;
  net.joint_weighting = s.joint_weighting;
  Geometry geom = s.geometry;
  for (int n = 0; n < s.users; ++n) {
    const double r = s.placement.radius_m * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    geom.user_positions.push_back({s.placement.center.x + r * std::cos(theta), s.placement.center.y + r * std::sin(theta)});
  }
  for (int n = 0; n < s.users; ++n) net.users.push_back(evaluate_user(geom, net.graph, s.mcs, n, s.intercell_threshold_dbm));
  return net;
}

ReplicationOutcome run_replication(const Scenario& s, int index, const RunOptions& opts) {
  Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(index)));
  const Network net = make_network(s, rng);
  const std::size_t N = net.users.size();
  NetState state(N);
  StepOptions step_opts;
  step_opts.algorithm = s.algorithm;
  step_opts.solver.mmk = s.mmk;
  step_opts.check_maxweight = opts.check_maxweight;

  ReplicationOutcome out;
  std::vector<std::int64_t> arrived(N, 0), delivered(N, 0);
  double queue_sum = 0.0;
  out.queue_trace.reserve(static_cast<std::size_t>(s.horizon));
  for (int t = 0; t < s.horizon; ++t) {
    const auto rep = step(state, net, s.arrivals, step_opts, rng);
    for (std::size_t n = 0; n < N; ++n) {
      arrived[n] += rep.arrivals[n];
      delivered[n] += rep.single_successes[n] + rep.joint_successes[n];
    }
    const double scale = std::max({1.0, std::abs(rep.objective), std::abs(rep.maxweight)});
    out.max_maxweight_error = std::max(out.max_maxweight_error, std::abs(rep.objective - rep.maxweight) / scale);
    const auto total = static_cast<double>(state.total());
    out.queue_trace.push_back(total);
    queue_sum += total;
  }

  double all = 0.0, inter = 0.0, intra = 0.0;
  int n_inter = 0, n_intra = 0;
  for (std::size_t n = 0; n < N; ++n) {
    const double thr = arrived[n] == 0 ? 1.0 : static_cast<double>(delivered[n]) / static_cast<double>(arrived[n]);
    all += thr;
    if (net.users[n].intercell) {
      inter += thr;
      ++n_inter;
    } else {
      intra += thr;
      ++n_intra;
    }
  }
  out.throughput_all = N == 0 ? kNaN : all / static_cast<double>(N);
  out.throughput_inter = n_inter == 0 ? kNaN : inter / n_inter;
  out.throughput_intra = n_intra == 0 ? kNaN : intra / n_intra;
  out.queue_mean = s.horizon == 0 ? 0.0 : queue_sum / s.horizon;
  out.queue_final = out.queue_trace.empty() ? 0.0 : out.queue_trace.back();
  return out;
}

SimMetrics run_simulation(const Scenario& s, const RunOptions& opts) {
  std::vector<ReplicationOutcome> reps(static_cast<std::size_t>(s.replications));
  parallel_for(s.replications, opts.jobs, [&](int k) { reps[static_cast<std::size_t>(k)] = run_replication(s, k, opts); });

  SimMetrics m;
  auto collect = [&](double ReplicationOutcome::*field) {
    std::vector<double> xs;
    xs.reserve(reps.size());
    for (const auto& r : reps) xs.push_back(r.*field);
    return xs;
  };
  if (s.horizon == 0) {
    for (const char* name : {"throughput_all", "throughput_inter", "throughput_intra", "queue_mean", "queue_final"})
      m.metrics.push_back({name, 0.0, 0.0, static_cast<std::int64_t>(reps.size())});
    return m;
  }
  m.metrics.push_back(summarize("throughput_all", collect(&ReplicationOutcome::throughput_all)));
  m.metrics.push_back(summarize("throughput_inter", collect(&ReplicationOutcome::throughput_inter)));
  m.metrics.push_back(summarize("throughput_intra", collect(&ReplicationOutcome::throughput_intra)));
  m.metrics.push_back(summarize("queue_mean", collect(&ReplicationOutcome::queue_mean)));
  m.metrics.push_back(summarize("queue_final", collect(&ReplicationOutcome::queue_final)));

  m.mean_queue_trace.assign(static_cast<std::size_t>(s.horizon), 0.0);
  for (const auto& r : reps) {
    for (std::size_t t = 0; t < r.queue_trace.size(); ++t) m.mean_queue_trace[t] += r.queue_trace[t];
    m.max_maxweight_error = std::max(m.max_maxweight_error, r.max_maxweight_error);
  }
  for (auto& q : m.mean_queue_trace) q /= static_cast<double>(reps.size());
  if (m.mean_queue_trace.size() >= s.stability.min_length) {
    m.verdict = detect_stability(m.mean_queue_trace, s.stability);
    const double code = *m.verdict == Verdict::Stable ? 1.0 : *m.verdict == Verdict::Unstable ? -1.0 : 0.0;
    m.metrics.push_back({"stability", code, 0.0, static_cast<std::int64_t>(reps.size())});
    m.metrics.push_back({"queue_slope", trailing_slope(m.mean_queue_trace), 0.0, static_cast<std::int64_t>(reps.size())});
  }
  return m;
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Backhaul: return "backhaul";
    case SweepAxis::ArrivalRate: return "arrival_rate";
    case SweepAxis::Users: return "users";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "backhaul") return SweepAxis::Backhaul;
  if (name == "arrival_rate") return SweepAxis::ArrivalRate;
  if (name == "users") return SweepAxis::Users;
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown sweep axis '{}' (backhaul, arrival_rate, users)", name));
}

Scenario apply_axis(const Scenario& s, SweepAxis axis, double value) {
  Scenario out = s;
  switch (axis) {
    case SweepAxis::Backhaul:
      if (value < 0) throw Error(ErrorCode::InvalidInput, fmt::format("negative backhaul capacity {}", value));
      out.backhaul_packets = value;
      break;
    case SweepAxis::ArrivalRate:
      out.arrivals = s.arrivals.with_mean(value);
      break;
    case SweepAxis::Users:
      if (value < 0 || value != std::floor(value)) throw Error(ErrorCode::InvalidInput, fmt::format("user count {} is not a nonnegative integer", value));
      out.users = static_cast<int>(value);
      break;
  }
  return out;
}

ResultTable run_sweep(const Scenario& s, SweepAxis axis, const std::vector<double>& values, const RunOptions& opts) {
  ResultTable t;
  t.scenario_hash = scenario_hash(s);
  t.seed = s.seed;
  t.axis = std::string(to_string(axis));
  for (double v : values) {
    const auto metrics = run_simulation(apply_axis(s, axis, v), opts);
    for (const auto& m : metrics.metrics) t.rows.push_back({v, m});
  }
  return t;
}

Algorithm ratio_baseline(const std::string& topology) {
  if (topology == "complete3") return Algorithm::Psp;
  if (topology == "bipartite3") return Algorithm::MmkBip;
  throw Error(ErrorCode::InvalidInput, fmt::format("unknown bench topology '{}' (complete3, bipartite3)", topology));
}

Instance sample_ratio_instance(const Scenario& cluster, const RatioBenchOptions& opts, int users, Rng& rng) {
  Scenario s = cluster;
  s.users = users;
  s.blocks_per_subframe = opts.blocks_per_subframe;
  s.backhaul_packets = opts.backhaul_packets;
  const Network net = make_network(s, rng);

  Instance inst;
  inst.graph = net.graph;
  inst.blocks_per_subframe = s.blocks_per_subframe;
  inst.utility.kind = UtilityKind::Throughput;
  inst.utility.gamma = opts.gamma;
  auto options = [&](const std::vector<double>& probs) {
    std::vector<McsOption> out;
    for (std::size_t m = 0; m < probs.size(); ++m) out.push_back({s.blocks_per_packet[m], probs[m]});
    return out;
  };
  for (int n = 0; n < users; ++n) {
    const auto& link = net.users[static_cast<std::size_t>(n)];
    inst.users.push_back(link.assignment);
    inst.packets.push_back({static_cast<int>(inst.packets.size()), n, false, s.packet_bytes, options(link.p_single)});
    if (link.assignment.secondary)
      inst.packets.push_back({static_cast<int>(inst.packets.size()), n, true, s.packet_bytes, options(link.p_joint)});
  }
  return inst;
}

ResultTable run_ratio_bench(const RatioBenchOptions& opts) {
  const Algorithm baseline = ratio_baseline(opts.topology);
  Scenario cluster = load_scenario("cluster3");
  cluster.links = opts.topology == "complete3" ? std::vector<std::array<int, 2>>{{0, 1}, {0, 2}, {1, 2}}
                                               : std::vector<std::array<int, 2>>{{0, 1}, {1, 2}};
  if (opts.samples < 1) throw Error(ErrorCode::InvalidInput, "at least one sample per point is required");

  struct Variant {
    Algorithm algo;
    MmkSolver mmk;
  };
  const std::vector<Variant> variants = {{baseline, MmkSolver::Dp},        {Algorithm::Sta, MmkSolver::Dp},
                                         {Algorithm::Mat, MmkSolver::Dp},  {baseline, MmkSolver::Greedy},
                                         {Algorithm::Sta, MmkSolver::Greedy}, {Algorithm::Mat, MmkSolver::Greedy}};

  json config{{"topology", opts.topology}, {"users", opts.users}, {"samples", opts.samples},
              {"blocks_per_subframe", opts.blocks_per_subframe}, {"backhaul_packets", opts.backhaul_packets},
              {"gamma", opts.gamma}, {"cluster", scenario_to_json(cluster)}};
  ResultTable t;
  t.scenario_hash = fnv1a_hex(config.dump());
  t.seed = opts.seed;
  t.axis = "users";

  for (int users : opts.users) {
    // per variant: ratio to the optimum; then per algorithm: greedy over DP
    const std::size_t kAlgos = variants.size() / 2;
    std::vector<std::vector<double>> ratios(variants.size() + kAlgos, std::vector<double>(static_cast<std::size_t>(opts.samples)));
    const auto point_seed = derive_seed(opts.seed, static_cast<std::uint64_t>(users));
    parallel_for(opts.samples, opts.jobs, [&](int k) {
      Rng rng(derive_seed(point_seed, static_cast<std::uint64_t>(k)));
      const Instance inst = sample_ratio_instance(cluster, opts, users, rng);
      std::vector<double> value(variants.size());
      for (std::size_t v = 0; v < variants.size(); ++v) {
        SolverOptions so;
        so.mmk = variants[v].mmk;
        value[v] = solve_ojs(inst, variants[v].algo, so).total_utility;
      }
      auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 1.0; };
      for (std::size_t v = 0; v < variants.size(); ++v) ratios[v][static_cast<std::size_t>(k)] = ratio(value[v], value[0]);
      for (std::size_t a = 0; a < kAlgos; ++a)
        ratios[variants.size() + a][static_cast<std::size_t>(k)] = ratio(value[kAlgos + a], value[a]);
    });
    for (std::size_t v = 0; v < variants.size(); ++v)
      t.rows.push_back({static_cast<double>(users),
                        summarize(fmt::format("{}/{}", to_string(variants[v].algo), to_string(variants[v].mmk)), ratios[v])});
    for (std::size_t a = 0; a < kAlgos; ++a)
      t.rows.push_back({static_cast<double>(users),
                        summarize(fmt::format("{}/greedy_over_dp", to_string(variants[a].algo)), ratios[variants.size() + a])});
  }
  return t;
}

namespace {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{:.12g}", x);
}

}  // namespace

void write_csv(std::ostream& out, const ResultTable& t) {
  out << "schema_version,scenario_hash,build_id,seed,axis,value,metric,mean,stderr,n\n";
  for (const auto& r : t.rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", kSchemaVersion, t.scenario_hash, build_id(), t.seed, t.axis,
                       number(r.value), r.metric.name, number(r.metric.mean), number(r.metric.std_error), r.metric.n);
}

json to_json(const ResultTable& t) {
  json j{{"schema_version", kSchemaVersion}, {"scenario_hash", t.scenario_hash}, {"build_id", build_id()},
         {"seed", t.seed}, {"axis", t.axis}, {"rows", json::array()}};
  for (const auto& r : t.rows) {
    json row{{"value", r.value}, {"metric", r.metric.name}, {"n", r.metric.n}};
    row["mean"] = std::isnan(r.metric.mean) ? json(nullptr) : json(r.metric.mean);
    row["stderr"] = std::isnan(r.metric.std_error) ? json(nullptr) : json(r.metric.std_error);
    j["rows"].push_back(row);
  }
  return j;
}

}  // namespace ojs
