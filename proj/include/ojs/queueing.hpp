#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ojs/channel.hpp"
#include "ojs/model.hpp"
#include "ojs/rng.hpp"
#include "ojs/scheduler.hpp"

namespace ojs {

/// Per-user queue pair: L_n packets at the serving BS, L̂_n in the joint queue
/// shared with the secondary BS.
struct NetState {
  std::vector<std::int64_t> primary;
  std::vector<std::int64_t> joint;
  std::int64_t t = 0;

  explicit NetState(std::size_t users = 0) : primary(users, 0), joint(users, 0) {}
  std::int64_t total() const;
};

enum class ArrivalKind { Binomial, Bernoulli, Deterministic };

struct ArrivalProcess {
  ArrivalKind kind = ArrivalKind::Binomial;
  int n_trials = 3;
  double p = 0.5;          // Binomial/Bernoulli success probability
  int per_subframe = 1;    // Deterministic count

  double mean() const;
  /// Same kind, rescaled to `rate` packets per subframe per user.
  /// Throws InvalidConfig when the kind cannot reach `rate`.
  ArrivalProcess with_mean(double rate) const;
  int draw(Rng& rng) const;
};

/// Everything a subframe needs besides the queues: topology with byte
/// capacities, per-user channel quality and the packet/block constants.
struct Network {
  JtGraph graph;
  std::vector<UserLink> users;
  std::vector<int> blocks_per_packet;  // per MCS
  int blocks_per_subframe = 50;
  std::int64_t packet_bytes = 73;
  JointWeighting joint_weighting = JointWeighting::SecondaryQueue;
};

/// Queue-weighted instance for the current state. Each user contributes
/// identical packets: up to S + (backhaul packets) primary-queue packets and
/// up to S joint-queue packets, never more than are queued. Users without
/// any positive-utility option contribute nothing.
Instance build_instance(const Network& net, const NetState& state);

struct SubframeReport {
  std::vector<int> arrivals;
  std::vector<int> single_successes;  // μ(1): primary-queue departures
  std::vector<int> joint_successes;   // μ(2): joint-queue departures
  std::vector<int> forwards;          // μ(3): moved to the joint queue
  double objective = 0.0;             // solver utility
  double maxweight = 0.0;             // MaxWeight expression of the schedule
};

/// MaxWeight expression Σ_n L_n E[μ1] + (L_n − L̂_n)⁺ μ3 + L̂_n E[μ2] of a
/// schedule, computed from its configurations and the queue state.
double maxweight_value(const Instance& inst, const NetState& state, const Schedule& sched);

struct StepOptions {
  Algorithm algorithm = Algorithm::Psp;
  SolverOptions solver{MmkSolver::Greedy};
  /// Throw Internal whenever the solver objective and the MaxWeight
  /// expression differ by more than 1e-9 relative.
  bool check_maxweight = false;
};

/// One subframe: draw arrivals, schedule from the current queues, draw
/// departures in packet order, move forwards, add arrivals.
SubframeReport step(NetState& state, const Network& net, const ArrivalProcess& arrivals, const StepOptions& opts, Rng& rng);

enum class Verdict { Stable, Unstable, Inconclusive };
std::string_view to_string(Verdict v);

struct StabilityOptions {
  double epsilon = 0.01;      // packets/subframe
  double max_queue = 1e6;
  std::size_t min_length = 200;
};

/// OLS slope of the last half of `trace`: stable at or below epsilon with the
/// trace under max_queue, unstable at or above 10 * epsilon.
/// Throws TraceTooShort.
Verdict detect_stability(const std::vector<double>& trace, const StabilityOptions& opts = {});
double trailing_slope(const std::vector<double>& trace);

}  // namespace ojs
