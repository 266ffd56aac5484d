#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ojs {

using BsIndex = int;

/// Backhaul link between two BSs. Both directions share `capacity_bytes`.
struct BackhaulLink {
  BsIndex a = 0;
  BsIndex b = 0;
  std::int64_t capacity_bytes = 0;
};

/// Joint transmission graph: BSs are vertices, backhaul links are edges. Only
/// BSs adjacent here may transmit jointly.
struct JtGraph {
  int bs_count = 0;
  std::vector<BackhaulLink> links;

  /// Index into `links` of the link joining a and b, if any.
  std::optional<int> link_index(BsIndex a, BsIndex b) const;
  int degree(BsIndex b) const;
  int max_degree() const;
  std::vector<BsIndex> neighbors(BsIndex b) const;
  /// Capacity dimensions of the knapsack view: one per BS, one per link.
  int dimension_count() const { return bs_count + static_cast<int>(links.size()); }
};

struct UserAssignment {
  BsIndex serving = 0;
  std::optional<BsIndex> secondary;
};

struct McsOption {
  int blocks_needed = 1;      // scheduled blocks for one packet at this MCS
  double success_prob = 0.0;  // delivery probability at this MCS
};

/// A queued packet. `joint` marks a packet that already sits in the joint
/// queue (both serving and secondary BS hold a copy) and can only be
/// transmitted jointly; otherwise it can be single-transmitted by the serving
/// BS or forwarded over the backhaul.
struct Packet {
  int id = 0;
  int user = 0;
  bool joint = false;
  std::int64_t size_bytes = 0;
  std::vector<McsOption> per_mcs;
};

enum class UtilityKind { Throughput, Fairness, QueueBased };

/// How a joint-queue packet's wireless utility is weighted under the
/// queue-based utility. `SecondaryQueue` weights it by the joint-queue length,
/// which makes the summed objective equal the MaxWeight expression;
/// `PrimaryQueue` weights every wireless transmission by the primary queue.
enum class JointWeighting { SecondaryQueue, PrimaryQueue };

struct QueueLengths {
  std::int64_t primary = 0;  // L_n
  std::int64_t joint = 0;    // L̂_n
};

struct UtilitySpec {
  UtilityKind kind = UtilityKind::Throughput;
  double gamma = 1e-3;       // forward utility for Throughput/Fairness
  double fairness_epsilon = 1e-6;
  JointWeighting joint_weighting = JointWeighting::SecondaryQueue;
  std::vector<QueueLengths> queues;  // per user, QueueBased only
};

/// One subframe's scheduling input.
struct Instance {
  JtGraph graph;
  std::vector<UserAssignment> users;
  std::vector<Packet> packets;
  int blocks_per_subframe = 1;
  UtilitySpec utility;

  int mcs_count() const { return packets.empty() ? 0 : static_cast<int>(packets.front().per_mcs.size()); }
  /// BSs whose blocks a wireless transmission of `packet` occupies: the
  /// serving BS, plus the secondary BS for a joint packet.
  std::vector<BsIndex> transmitters(const Packet& packet) const;
  /// Backhaul link a forward of `packet` would use, if the packet can be forwarded.
  std::optional<int> forward_link(const Packet& packet) const;
};

struct Violation {
  std::string where;  // field path, e.g. "packets[3].joint"
  std::string rule;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_instance(const Instance& inst);

/// Configuration index r: 0 is a backhaul forward, 1..M a wireless
/// transmission with MCS r.
using Config = int;
inline constexpr Config kForward = 0;

/// Utility of scheduling `packet` in configuration `config`.
/// Throws Error(InvalidConfig) when the configuration does not exist for the
/// packet (forwarding a joint-queue packet, forwarding without a secondary BS,
/// or an MCS outside 1..M).
double utility(const Instance& inst, const Packet& packet, Config config);

/// utility() for every (packet, config) pair; infeasible configurations get a
/// value of 0. Row i has M + 1 entries indexed by config.
std::vector<std::vector<double>> utility_table(const Instance& inst);

}  // namespace ojs
