#include "ojs/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <fmt/format.h>

#include "ojs/error.hpp"
#include "ojs/io.hpp"

#ifndef OJS_SOURCE_DIR
#define OJS_SOURCE_DIR "."
#endif

namespace ojs {

using nlohmann::json;
namespace fs = std::filesystem;

std::string data_dir() {
  if (const char* env = std::getenv("OJS_DATA_DIR"); env && *env) return env;
  return OJS_SOURCE_DIR;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, fmt::format("scenario field {}: {}", where, what));
}

const std::set<std::string> kKeys = {
    "base", "name", "bs", "links", "backhaul_packets", "packet_bytes", "bs_height_m", "user_height_m",
    "tx_power_dbm", "carrier_freq_mhz", "bandwidth_hz", "noise_psd_dbm_hz", "mcs_table", "blocks_per_packet",
    "users", "placement", "arrivals", "joint_weighting", "algorithm", "mmk", "blocks_per_subframe", "horizon",
    "replications", "seed", "intercell_threshold_dbm", "stability"};

std::string resolve(const std::string& path, const std::string& base_dir) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  if (!base_dir.empty() && fs::exists(fs::path(base_dir) / p)) return (fs::path(base_dir) / p).string();
  return (fs::path(data_dir()) / p).string();
}

bool is_preset_name(const std::string& s) { return s.find('/') == std::string::npos && s.find('.') == std::string::npos; }

/// Follows "base" references and merges each layer over its base.
json flatten(const json& j, const std::string& base_dir, int depth) {
  if (depth > 8) throw Error(ErrorCode::InvalidInput, "scenario base chain is too deep");
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "scenario must be a JSON object");
  if (!j.contains("base")) return j;
  if (!j["base"].is_string()) fail("base", "expected a preset name or path");
  const auto base = j["base"].get<std::string>();
  const std::string path = is_preset_name(base) ? (fs::path(data_dir()) / "presets" / (base + ".json")).string() : resolve(base, base_dir);
  json merged = flatten(parse_json_text(read_file(path), path), fs::path(path).parent_path().string(), depth + 1);
  json layer = j;
  layer.erase("base");
  merged.merge_patch(layer);
  return merged;
}

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(key, "expected a number");
  return j[key].get<double>();
}

std::int64_t integer(const json& j, const char* key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(key, "expected an integer");
  return j[key].get<std::int64_t>();
}

Point point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) fail(where, "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Scenario parse_flat(const json& j, const std::string& base_dir) {
  for (const auto& [key, value] : j.items())
    if (!kKeys.count(key)) fail(key, "unknown field");

  Scenario s;
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  if (!j.contains("bs") || !j["bs"].is_array() || j["bs"].empty()) fail("bs", "expected a non-empty array of [x, y]");
  for (std::size_t b = 0; b < j["bs"].size(); ++b) s.geometry.bs_positions.push_back(point(j["bs"][b], fmt::format("bs[{}]", b)));
  const int B = static_cast<int>(s.geometry.bs_positions.size());
  if (j.contains("links")) {
    std::set<std::pair<int, int>> seen;
    for (const auto& l : j["links"]) {
      if (!l.is_array() || l.size() != 2 || !l[0].is_number_integer() || !l[1].is_number_integer()) fail("links", "expected [a, b] pairs");
      const int a = l[0].get<int>(), b = l[1].get<int>();
      if (a < 0 || b < 0 || a >= B || b >= B || a == b) fail("links", fmt::format("bad link [{}, {}]", a, b));
      if (!seen.insert(std::minmax(a, b)).second) fail("links", fmt::format("duplicate link [{}, {}]", a, b));
      s.links.push_back({a, b});
    }
  }
  s.backhaul_packets = num(j, "backhaul_packets", s.backhaul_packets);
  s.packet_bytes = integer(j, "packet_bytes", s.packet_bytes);
  s.geometry.bs_height_m = num(j, "bs_height_m", s.geometry.bs_height_m);
  s.geometry.user_height_m = num(j, "user_height_m", s.geometry.user_height_m);
  s.geometry.tx_power_dbm = num(j, "tx_power_dbm", s.geometry.tx_power_dbm);
  s.geometry.carrier_freq_mhz = num(j, "carrier_freq_mhz", s.geometry.carrier_freq_mhz);
  s.geometry.bandwidth_hz = num(j, "bandwidth_hz", s.geometry.bandwidth_hz);
  s.geometry.noise_psd_dbm_hz = num(j, "noise_psd_dbm_hz", s.geometry.noise_psd_dbm_hz);

  if (!j.contains("mcs_table") || !j["mcs_table"].is_string()) fail("mcs_table", "expected a CSV path");
  s.mcs_table = j["mcs_table"].get<std::string>();
  s.mcs = load_mcs_table(resolve(s.mcs_table, base_dir));
  if (j.contains("blocks_per_packet")) s.blocks_per_packet = j["blocks_per_packet"].get<std::vector<int>>();
  if (static_cast<int>(s.blocks_per_packet.size()) != s.mcs.size())
    fail("blocks_per_packet", fmt::format("{} entries for {} MCS curves", s.blocks_per_packet.size(), s.mcs.size()));
  for (std::size_t m = 0; m < s.blocks_per_packet.size(); ++m) {
    if (s.blocks_per_packet[m] < 1) fail("blocks_per_packet", "entries must be >= 1");
    s.mcs.curves[m].blocks_per_packet = s.blocks_per_packet[m];
  }

  s.users = static_cast<int>(integer(j, "users", s.users));
  if (j.contains("placement")) {
    const auto& p = j["placement"];
    if (p.contains("center")) s.placement.center = point(p["center"], "placement.center");
    s.placement.radius_m = num(p, "radius_m", s.placement.radius_m);
  }
  if (j.contains("arrivals")) {
    const auto& a = j["arrivals"];
    const auto kind = a.value("kind", std::string("binomial"));
    if (kind == "binomial") s.arrivals.kind = ArrivalKind::Binomial;
    else if (kind == "bernoulli") s.arrivals.kind = ArrivalKind::Bernoulli;
    else if (kind == "deterministic") s.arrivals.kind = ArrivalKind::Deterministic;
    else fail("arrivals.kind", "expected binomial, bernoulli or deterministic");
    s.arrivals.n_trials = static_cast<int>(integer(a, "n_trials", s.arrivals.n_trials));
    s.arrivals.p = num(a, "p", s.arrivals.p);
    s.arrivals.per_subframe = static_cast<int>(integer(a, "per_subframe", s.arrivals.per_subframe));
  }
  if (j.contains("joint_weighting")) {
    const auto w = j["joint_weighting"].get<std::string>();
    if (w == "secondary_queue") s.joint_weighting = JointWeighting::SecondaryQueue;
    else if (w == "primary_queue") s.joint_weighting = JointWeighting::PrimaryQueue;
    else fail("joint_weighting", "expected secondary_queue or primary_queue");
  }
  if (j.contains("algorithm")) s.algorithm = parse_algorithm(j["algorithm"].get<std::string>());
  if (j.contains("mmk")) s.mmk = parse_mmk_solver(j["mmk"].get<std::string>());
  s.blocks_per_subframe = static_cast<int>(integer(j, "blocks_per_subframe", s.blocks_per_subframe));
  s.horizon = static_cast<int>(integer(j, "horizon", s.horizon));
  s.replications = static_cast<int>(integer(j, "replications", s.replications));
  s.seed = static_cast<std::uint64_t>(integer(j, "seed", static_cast<std::int64_t>(s.seed)));
  s.intercell_threshold_dbm = num(j, "intercell_threshold_dbm", s.intercell_threshold_dbm);
  if (j.contains("stability")) {
    s.stability.epsilon = num(j["stability"], "epsilon", s.stability.epsilon);
    s.stability.max_queue = num(j["stability"], "max_queue", s.stability.max_queue);
  }

  if (s.users < 0) fail("users", "must be >= 0");
  if (s.packet_bytes < 1) fail("packet_bytes", "must be >= 1");
  if (s.backhaul_packets < 0) fail("backhaul_packets", "must be >= 0");
  if (s.blocks_per_subframe < 1) fail("blocks_per_subframe", "must be >= 1");
  if (s.horizon < 0) fail("horizon", "must be >= 0");
  if (s.replications < 1) fail("replications", "must be >= 1");
  if (!(s.placement.radius_m > 0)) fail("placement.radius_m", "must be > 0");
  if (s.arrivals.p < 0 || s.arrivals.p > 1) fail("arrivals.p", "must be in [0, 1]");
  return s;
}

}  // namespace

Scenario scenario_from_json(const json& raw, const std::string& base_dir) {
  const json j = flatten(raw, base_dir, 0);
  try {
    return parse_flat(j, base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, fmt::format("scenario: {}", e.what()));
  }
}

Scenario load_scenario(const std::string& name_or_path) {
  std::string path = name_or_path;
  if (is_preset_name(name_or_path) && !fs::exists(name_or_path))
    path = (fs::path(data_dir()) / "presets" / (name_or_path + ".json")).string();
  return scenario_from_json(parse_json_text(read_file(path), path), fs::path(path).parent_path().string());
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["bs"] = json::array();
  for (const auto& p : s.geometry.bs_positions) j["bs"].push_back({p.x, p.y});
  j["links"] = s.links;
  j["backhaul_packets"] = s.backhaul_packets;
  j["packet_bytes"] = s.packet_bytes;
  j["bs_height_m"] = s.geometry.bs_height_m;
  j["user_height_m"] = s.geometry.user_height_m;
  j["tx_power_dbm"] = s.geometry.tx_power_dbm;
  j["carrier_freq_mhz"] = s.geometry.carrier_freq_mhz;
  j["bandwidth_hz"] = s.geometry.bandwidth_hz;
  j["noise_psd_dbm_hz"] = s.geometry.noise_psd_dbm_hz;
  j["mcs_table"] = s.mcs_table;
  json curves = json::array();
  for (const auto& c : s.mcs.curves) curves.push_back({{"name", c.name}, {"points", c.points}});
  j["mcs_curves"] = curves;
  j["blocks_per_packet"] = s.blocks_per_packet;
  j["users"] = s.users;
  j["placement"] = {{"center", {s.placement.center.x, s.placement.center.y}}, {"radius_m", s.placement.radius_m}};
  const char* kind = s.arrivals.kind == ArrivalKind::Binomial ? "binomial" : s.arrivals.kind == ArrivalKind::Bernoulli ? "bernoulli" : "deterministic";
  j["arrivals"] = {{"kind", kind}, {"n_trials", s.arrivals.n_trials}, {"p", s.arrivals.p}, {"per_subframe", s.arrivals.per_subframe}};
  j["joint_weighting"] = s.joint_weighting == JointWeighting::SecondaryQueue ? "secondary_queue" : "primary_queue";
  j["algorithm"] = std::string(to_string(s.algorithm));
  j["mmk"] = std::string(to_string(s.mmk));
  j["blocks_per_subframe"] = s.blocks_per_subframe;
  j["horizon"] = s.horizon;
  j["replications"] = s.replications;
  j["seed"] = s.seed;
  j["intercell_threshold_dbm"] = s.intercell_threshold_dbm;
  j["stability"] = {{"epsilon", s.stability.epsilon}, {"max_queue", s.stability.max_queue}};
  return j;
}

std::string scenario_hash(const Scenario& s) { return fnv1a_hex(scenario_to_json(s).dump()); }

JtGraph scenario_graph(const Scenario& s) {
  JtGraph g;
  g.bs_count = static_cast<int>(s.geometry.bs_positions.size());
  const auto cap = static_cast<std::int64_t>(std::llround(s.backhaul_packets * static_cast<double>(s.packet_bytes)));
  for (const auto& l : s.links) g.links.push_back({l[0], l[1], cap});
  return g;
}

}  // namespace ojs
