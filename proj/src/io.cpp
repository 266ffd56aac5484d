#include "ojs/io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>

#include "ojs/error.hpp"

namespace ojs {

using nlohmann::json;

nlohmann::json parse_json_text(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1, column = 1;
    for (std::size_t k = 0; k < offset; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorCode::InvalidInput, fmt::format("{}:{}:{}: {}", origin, line, column, what));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, fmt::format("at {}: {}", where.empty() ? "/" : where, what));
}

void expect_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(where + "/" + key, "unknown field");
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(where, fmt::format("missing field '{}'", key));
  return obj.at(key);
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<std::int64_t>();
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

const json& as_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  return v;
}

UtilitySpec utility_from_json(const json& j, const std::string& where) {
  expect_keys(j, {"kind", "gamma", "fairness_epsilon", "queues", "joint_weighting"}, where);
  UtilitySpec u;
  const auto& kind = field(j, "kind", where);
  if (!kind.is_string()) fail(where + "/kind", "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "throughput") u.kind = UtilityKind::Throughput;
  else if (k == "fairness") u.kind = UtilityKind::Fairness;
  else if (k == "queue") u.kind = UtilityKind::QueueBased;
  else fail(where + "/kind", "expected throughput, fairness or queue");
  if (j.contains("gamma")) u.gamma = as_number(j["gamma"], where + "/gamma");
  if (j.contains("fairness_epsilon")) u.fairness_epsilon = as_number(j["fairness_epsilon"], where + "/fairness_epsilon");
  if (j.contains("joint_weighting")) {
    const auto& w = j["joint_weighting"];
    if (w == "secondary_queue") u.joint_weighting = JointWeighting::SecondaryQueue;
    else if (w == "primary_queue") u.joint_weighting = JointWeighting::PrimaryQueue;
    else fail(where + "/joint_weighting", "expected secondary_queue or primary_queue");
  }
  if (j.contains("queues")) {
    const auto& qs = as_array(j["queues"], where + "/queues");
    for (std::size_t n = 0; n < qs.size(); ++n) {
      const auto w = fmt::format("{}/queues/{}", where, n);
      expect_keys(qs[n], {"L", "L_hat"}, w);
      u.queues.push_back({as_int(field(qs[n], "L", w), w + "/L"), as_int(field(qs[n], "L_hat", w), w + "/L_hat")});
    }
  }
  return u;
}

}  // namespace

Instance instance_from_json(const json& j) {
  expect_keys(j, {"bs_count", "backhaul", "users", "blocks_per_subframe", "packets", "utility"}, "");
  Instance inst;
  inst.graph.bs_count = static_cast<int>(as_int(field(j, "bs_count", ""), "/bs_count"));
  inst.blocks_per_subframe = static_cast<int>(as_int(field(j, "blocks_per_subframe", ""), "/blocks_per_subframe"));
  if (j.contains("backhaul")) {
    const auto& links = as_array(j["backhaul"], "/backhaul");
    for (std::size_t k = 0; k < links.size(); ++k) {
      const auto w = fmt::format("/backhaul/{}", k);
      expect_keys(links[k], {"a", "b", "capacity_bytes"}, w);
      inst.graph.links.push_back({static_cast<int>(as_int(field(links[k], "a", w), w + "/a")),
                                  static_cast<int>(as_int(field(links[k], "b", w), w + "/b")),
                                  as_int(field(links[k], "capacity_bytes", w), w + "/capacity_bytes")});
    }
  }
  const auto& users = as_array(field(j, "users", ""), "/users");
  for (std::size_t n = 0; n < users.size(); ++n) {
    const auto w = fmt::format("/users/{}", n);
    expect_keys(users[n], {"serving", "secondary"}, w);
    UserAssignment u;
    u.serving = static_cast<int>(as_int(field(users[n], "serving", w), w + "/serving"));
    if (users[n].contains("secondary") && !users[n]["secondary"].is_null())
      u.secondary = static_cast<int>(as_int(users[n]["secondary"], w + "/secondary"));
    inst.users.push_back(u);
  }
  const auto& packets = as_array(field(j, "packets", ""), "/packets");
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const auto w = fmt::format("/packets/{}", i);
    const auto& pj = packets[i];
    expect_keys(pj, {"id", "user", "joint", "size_bytes", "mcs"}, w);
    Packet p;
    p.id = pj.contains("id") ? static_cast<int>(as_int(pj["id"], w + "/id")) : static_cast<int>(i);
    p.user = static_cast<int>(as_int(field(pj, "user", w), w + "/user"));
    if (pj.contains("joint")) {
      if (!pj["joint"].is_boolean()) fail(w + "/joint", "expected true or false");
      p.joint = pj["joint"].get<bool>();
    }
    p.size_bytes = as_int(field(pj, "size_bytes", w), w + "/size_bytes");
    const auto& mcs = as_array(field(pj, "mcs", w), w + "/mcs");
    for (std::size_t m = 0; m < mcs.size(); ++m) {
      const auto wm = fmt::format("{}/mcs/{}", w, m);
      expect_keys(mcs[m], {"blocks", "p"}, wm);
      p.per_mcs.push_back({static_cast<int>(as_int(field(mcs[m], "blocks", wm), wm + "/blocks")),
                           as_number(field(mcs[m], "p", wm), wm + "/p")});
    }
    inst.packets.push_back(std::move(p));
  }
  if (j.contains("utility")) inst.utility = utility_from_json(j["utility"], "/utility");

  const auto problems = validate_instance(inst);
  if (!problems.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : problems) msg += fmt::format("\n  {}: {}", v.where, v.rule);
    throw Error(ErrorCode::InvalidInput, msg);
  }
  return inst;
}

Instance load_instance(const std::string& path) { return instance_from_json(parse_json_text(read_file(path), path)); }

nlohmann::json instance_to_json(const Instance& inst) {
  json j;
  j["bs_count"] = inst.graph.bs_count;
  j["blocks_per_subframe"] = inst.blocks_per_subframe;
  j["backhaul"] = json::array();
  for (const auto& l : inst.graph.links) j["backhaul"].push_back({{"a", l.a}, {"b", l.b}, {"capacity_bytes", l.capacity_bytes}});
  j["users"] = json::array();
  for (const auto& u : inst.users) {
    json uj{{"serving", u.serving}};
    if (u.secondary) uj["secondary"] = *u.secondary;
    j["users"].push_back(uj);
  }
  j["packets"] = json::array();
  for (const auto& p : inst.packets) {
    json pj{{"id", p.id}, {"user", p.user}, {"joint", p.joint}, {"size_bytes", p.size_bytes}, {"mcs", json::array()}};
    for (const auto& o : p.per_mcs) pj["mcs"].push_back({{"blocks", o.blocks_needed}, {"p", o.success_prob}});
    j["packets"].push_back(pj);
  }
  json u;
  switch (inst.utility.kind) {
    case UtilityKind::Throughput: u["kind"] = "throughput"; break;
    case UtilityKind::Fairness: u["kind"] = "fairness"; break;
    case UtilityKind::QueueBased: u["kind"] = "queue"; break;
  }
  if (inst.utility.kind == UtilityKind::QueueBased) {
    u["joint_weighting"] = inst.utility.joint_weighting == JointWeighting::SecondaryQueue ? "secondary_queue" : "primary_queue";
    u["queues"] = json::array();
    for (const auto& q : inst.utility.queues) u["queues"].push_back({{"L", q.primary}, {"L_hat", q.joint}});
  } else {
    u["gamma"] = inst.utility.gamma;
  }
  j["utility"] = u;
  return j;
}

nlohmann::json schedule_to_json(const Instance& inst, const Schedule& sched) {
  json j;
  j["total_utility"] = sched.total_utility;
  j["packets"] = json::array();
  json forward = json::array(), joint = json::array(), single = json::array(), idle = json::array();
  for (std::size_t i = 0; i < inst.packets.size(); ++i) {
    const auto& p = inst.packets[i];
    const Config r = sched.config[i];
    json pj{{"id", p.id}};
    if (r == kUnscheduled) {
      pj["action"] = "none";
      idle.push_back(p.id);
    } else if (r == kForward) {
      pj["action"] = "forward";
      forward.push_back(p.id);
    } else {
      pj["action"] = p.joint ? "joint" : "single";
      pj["mcs"] = r;
      pj["blocks"] = sched.blocks[i];
      (p.joint ? joint : single).push_back(p.id);
    }
    j["packets"].push_back(pj);
  }
  j["summary"] = {{"forward", forward}, {"joint", joint}, {"single", single}, {"unscheduled", idle}};
  return j;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace ojs
