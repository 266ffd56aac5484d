#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ojs/channel.hpp"
#include "ojs/queueing.hpp"
#include "ojs/scheduler.hpp"

namespace ojs {

/// Users are dropped uniformly in this disk.
struct Placement {
  Point center;
  double radius_m = 1050.0;
};

struct Scenario {
  std::string name;
  Geometry geometry;  // user_positions stay empty; drawn per replication
  std::vector<std::array<int, 2>> links;
  double backhaul_packets = 2.0;  // per-link capacity in packets/subframe
  std::int64_t packet_bytes = 73;
  std::string mcs_table;  // path as written in the file
  McsTable mcs;
  std::vector<int> blocks_per_packet{2, 1, 1};
  int users = 20;
  Placement placement;
  ArrivalProcess arrivals;
  JointWeighting joint_weighting = JointWeighting::SecondaryQueue;
  Algorithm algorithm = Algorithm::Psp;
  MmkSolver mmk = MmkSolver::Greedy;
  int blocks_per_subframe = 50;
  int horizon = 1000;
  int replications = 1000;
  std::uint64_t seed = 1;
  double intercell_threshold_dbm = -85.0;
  StabilityOptions stability;
};

/// Root for presets/ and data/: $OJS_DATA_DIR, else the source tree.
std::string data_dir();

/// Scenario from JSON. A "base" field names a preset (cluster3, star7,
/// cycle7) or a path; the remaining fields are merged over it.
/// Relative paths resolve against `base_dir`, then data_dir().
/// Throws InvalidInput.
Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir);
/// A preset name or a path to a scenario file.
Scenario load_scenario(const std::string& name_or_path);

/// Canonical JSON: every field, fixed key order.
nlohmann::json scenario_to_json(const Scenario& s);
std::string scenario_hash(const Scenario& s);

JtGraph scenario_graph(const Scenario& s);

}  // namespace ojs
