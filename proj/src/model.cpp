#include "ojs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "ojs/error.hpp"

namespace ojs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyTransmitSet: return "EmptyTransmitSet";
    case ErrorCode::UnknownMcs: return "UnknownMcs";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::NotBipartite: return "NotBipartite";
    case ErrorCode::DegreeExceedsS: return "DegreeExceedsS";
    case ErrorCode::NotSeriesParallel: return "NotSeriesParallel";
    case ErrorCode::TooManyBs: return "TooManyBs";
    case ErrorCode::GraphTooLarge: return "GraphTooLarge";
    case ErrorCode::ColoringExceedsS: return "ColoringExceedsS";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

std::optional<int> JtGraph::link_index(BsIndex a, BsIndex b) const {
  for (std::size_t k = 0; k < links.size(); ++k) {
    const auto& l = links[k];
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return static_cast<int>(k);
  }
  return std::nullopt;
}

int JtGraph::degree(BsIndex b) const {
  return static_cast<int>(std::count_if(links.begin(), links.end(),
                                        [b](const BackhaulLink& l) { return l.a == b || l.b == b; }));
}

int JtGraph::max_degree() const {
  int best = 0;
  for (BsIndex b = 0; b < bs_count; ++b) best = std::max(best, degree(b));
  return best;
}

std::vector<BsIndex> JtGraph::neighbors(BsIndex b) const {
  std::vector<BsIndex> out;
  for (const auto& l : links) {
    if (l.a == b) out.push_back(l.b);
    else if (l.b == b) out.push_back(l.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BsIndex> Instance::transmitters(const Packet& packet) const {
  const auto& u = users.at(static_cast<std::size_t>(packet.user));
  if (packet.joint && u.secondary) return {u.serving, *u.secondary};
  return {u.serving};
}

std::optional<int> Instance::forward_link(const Packet& packet) const {
  if (packet.joint) return std::nullopt;
  const auto& u = users.at(static_cast<std::size_t>(packet.user));
  if (!u.secondary) return std::nullopt;
  return graph.link_index(u.serving, *u.secondary);
}

std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  auto add = [&out](std::string where, std::string rule) { out.push_back({std::move(where), std::move(rule)}); };

  const int B = inst.graph.bs_count;
  if (B < 1) add("graph.bs_count", "at least one BS is required");
  if (inst.blocks_per_subframe < 1) add("blocks_per_subframe", "S must be >= 1");

  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < inst.graph.links.size(); ++k) {
    const auto& l = inst.graph.links[k];
    auto where = [k] { return fmt::format("graph.links[{}]", k); };
    if (l.a < 0 || l.a >= B || l.b < 0 || l.b >= B) add(where(), "endpoint out of range");
    if (l.a == l.b) add(where(), "self-loop");
    if (l.capacity_bytes < 0) add(where() + ".capacity_bytes", "capacity must be >= 0");
    auto key = std::minmax(l.a, l.b);
    if (!seen.insert(key).second) add(where(), "duplicate link");
  }

  const int N = static_cast<int>(inst.users.size());
  for (int n = 0; n < N; ++n) {
    const auto& u = inst.users[static_cast<std::size_t>(n)];
    auto where = [n] { return fmt::format("users[{}]", n); };
    if (u.serving < 0 || u.serving >= B) add(where() + ".serving", "BS index out of range");
    if (u.secondary) {
      if (*u.secondary < 0 || *u.secondary >= B) add(where() + ".secondary", "BS index out of range");
      if (*u.secondary == u.serving) add(where() + ".secondary", "secondary equals serving BS");
      else if (!inst.graph.link_index(u.serving, *u.secondary))
        add(where() + ".secondary", "no backhaul link between serving and secondary BS");
    }
  }

  const int M = inst.mcs_count();
  // per (user, mcs): max p over single packets, min p over joint packets
  std::vector<double> single_max(static_cast<std::size_t>(N * M), -1.0), joint_min(static_cast<std::size_t>(N * M), 2.0);
  for (std::size_t i = 0; i < inst.packets.size(); ++i) {
    const auto& p = inst.packets[i];
    auto where = [i] { return fmt::format("packets[{}]", i); };
    if (p.user < 0 || p.user >= N) {
      add(where() + ".user", "user index out of range");
      continue;
    }
    if (p.joint && !inst.users[static_cast<std::size_t>(p.user)].secondary)
      add(where() + ".joint", "joint packet for a user without a secondary BS");
    if (p.size_bytes < 0) add(where() + ".size_bytes", "size must be >= 0");
    if (static_cast<int>(p.per_mcs.size()) != M) {
      add(where() + ".per_mcs", "MCS count differs between packets");
      continue;
    }
    for (std::size_t m = 0; m < p.per_mcs.size(); ++m) {
      const auto& o = p.per_mcs[m];
      if (o.blocks_needed < 1) add(fmt::format("{}.per_mcs[{}].blocks", where(), m), "blocks_needed must be >= 1");
      if (!(o.success_prob >= 0.0 && o.success_prob <= 1.0))
        add(fmt::format("{}.per_mcs[{}].p", where(), m), "success probability outside [0,1]");
      const auto slot = static_cast<std::size_t>(p.user * M) + m;
      if (p.joint) joint_min[slot] = std::min(joint_min[slot], o.success_prob);
      else single_max[slot] = std::max(single_max[slot], o.success_prob);
    }
  }
  for (std::size_t slot = 0; slot < single_max.size(); ++slot) {
    if (single_max[slot] >= 0.0 && joint_min[slot] <= 1.0 && joint_min[slot] < single_max[slot])
      add(fmt::format("users[{}]", slot / static_cast<std::size_t>(M)),
          fmt::format("joint success probability below single for MCS {}", slot % static_cast<std::size_t>(M) + 1));
  }

  const auto& us = inst.utility;
  if ((us.kind == UtilityKind::Throughput || us.kind == UtilityKind::Fairness) && !(us.gamma > 0.0))
    add("utility.gamma", "gamma must be > 0");
  if (us.kind == UtilityKind::QueueBased) {
    if (static_cast<int>(us.queues.size()) != N) add("utility.queues", "one queue pair per user is required");
    for (std::size_t n = 0; n < us.queues.size(); ++n) {
      if (us.queues[n].primary < 0 || us.queues[n].joint < 0)
        add(fmt::format("utility.queues[{}]", n), "queue lengths must be >= 0");
    }
  }
  return out;
}

namespace {

double fairness_floor(const Instance& inst) {
  double p_min = 1.0;
  for (const auto& p : inst.packets)
    for (const auto& o : p.per_mcs)
      if (o.success_prob > 0.0) p_min = std::min(p_min, o.success_prob);
  return p_min;
}

void check_config(const Instance& inst, const Packet& packet, Config config) {
  if (config == kForward) {
    if (packet.joint) throw Error(ErrorCode::InvalidConfig, fmt::format("packet {} is in the joint queue and cannot be forwarded", packet.id));
    if (!inst.forward_link(packet))
      throw Error(ErrorCode::InvalidConfig, fmt::format("packet {} has no secondary BS to forward to", packet.id));
    return;
  }
  if (config < 0 || config > static_cast<int>(packet.per_mcs.size()))
    throw Error(ErrorCode::InvalidConfig, fmt::format("packet {} has no configuration {}", packet.id, config));
}

double utility_unchecked(const Instance& inst, const Packet& packet, Config config, double p_min) {
  const auto& us = inst.utility;
  switch (us.kind) {
    case UtilityKind::Throughput:
      return config == kForward ? us.gamma : packet.per_mcs[static_cast<std::size_t>(config - 1)].success_prob;
    case UtilityKind::Fairness: {
      if (config == kForward) return us.gamma;
      const double p = packet.per_mcs[static_cast<std::size_t>(config - 1)].success_prob;
      if (p <= 0.0) return 0.0;
      return std::log(p) - std::log(p_min) + us.fairness_epsilon;
    }
    case UtilityKind::QueueBased: {
      const auto& q = us.queues.at(static_cast<std::size_t>(packet.user));
      if (config == kForward) return static_cast<double>(std::max<std::int64_t>(q.primary - q.joint, 0));
      const double p = packet.per_mcs[static_cast<std::size_t>(config - 1)].success_prob;
      const bool by_joint_queue = packet.joint && us.joint_weighting == JointWeighting::SecondaryQueue;
      return static_cast<double>(by_joint_queue ? q.joint : q.primary) * p;
    }
  }
  return 0.0;
}

}  // namespace

double utility(const Instance& inst, const Packet& packet, Config config) {
  check_config(inst, packet, config);
  const double p_min = inst.utility.kind == UtilityKind::Fairness ? fairness_floor(inst) : 1.0;
  return utility_unchecked(inst, packet, config, p_min);
}

std::vector<std::vector<double>> utility_table(const Instance& inst) {
  const double p_min = inst.utility.kind == UtilityKind::Fairness ? fairness_floor(inst) : 1.0;
  std::vector<std::vector<double>> table;
  table.reserve(inst.packets.size());
  for (const auto& p : inst.packets) {
    std::vector<double> row(p.per_mcs.size() + 1, 0.0);
    if (inst.forward_link(p)) row[kForward] = utility_unchecked(inst, p, kForward, p_min);
    for (Config r = 1; r <= static_cast<int>(p.per_mcs.size()); ++r) row[static_cast<std::size_t>(r)] = utility_unchecked(inst, p, r, p_min);
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace ojs
