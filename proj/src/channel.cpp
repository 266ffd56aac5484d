#include "ojs/channel.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ojs/error.hpp"

namespace ojs {
namespace {

void warn_once(std::atomic<bool>& flag, const std::string& message) {
  if (!flag.exchange(true)) spdlog::warn("{}", message);
}

std::atomic<bool> warned_distance{false};
std::atomic<bool> warned_freq{false};
std::atomic<bool> warned_hm{false};
std::atomic<bool> warned_hb{false};

}  // namespace

double hata_path_loss(double distance_km, double f_mhz, double hb_m, double hm_m) {
  if (distance_km < 0.02) {
    warn_once(warned_distance, fmt::format("Hata distance {} km raised to 0.02 km", distance_km));
    distance_km = 0.02;
  }
  if (f_mhz < 150.0 || f_mhz > 1500.0) {
    warn_once(warned_freq, fmt::format("Hata frequency {} MHz clamped to 150..1500", f_mhz));
    f_mhz = std::clamp(f_mhz, 150.0, 1500.0);
  }
  if (hm_m < 1.0 || hm_m > 10.0) {
    warn_once(warned_hm, fmt::format("Hata mobile height {} m clamped to 1..10", hm_m));
    hm_m = std::clamp(hm_m, 1.0, 10.0);
  }
  if (hb_m < 30.0 || hb_m > 200.0) warn_once(warned_hb, fmt::format("Hata BS height {} m is outside 30..200 m", hb_m));

  const double lf = std::log10(f_mhz);
  const double lhb = std::log10(hb_m);
  const double a_hm = (1.1 * lf - 0.7) * hm_m - (1.56 * lf - 0.8);
  return 69.55 + 26.16 * lf - 13.82 * lhb - a_hm + (44.9 - 6.55 * lhb) * std::log10(distance_km);
}

double distance_m(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double rx_power_dbm(const Geometry& geom, int user, int bs) {
  const double d = distance_m(geom.user_positions.at(static_cast<std::size_t>(user)), geom.bs_positions.at(static_cast<std::size_t>(bs)));
  return geom.tx_power_dbm - hata_path_loss(d / 1000.0, geom.carrier_freq_mhz, geom.bs_height_m, geom.user_height_m);
}

double noise_power_mw(const Geometry& geom) {
  return std::pow(10.0, (geom.noise_psd_dbm_hz + 10.0 * std::log10(geom.bandwidth_hz)) / 10.0);
}

double sinr(const Geometry& geom, int user, const std::vector<int>& transmit_set, bool all_bs_active) {
  if (transmit_set.empty()) throw Error(ErrorCode::EmptyTransmitSet, fmt::format("no transmitting BS for user {}", user));
  const int B = static_cast<int>(geom.bs_positions.size());
  double amplitude = 0.0;
  double interference = 0.0;
  for (int b = 0; b < B; ++b) {
    const double p = std::pow(10.0, rx_power_dbm(geom, user, b) / 10.0);
    if (std::find(transmit_set.begin(), transmit_set.end(), b) != transmit_set.end()) amplitude += std::sqrt(p);
    else if (all_bs_active) interference += p;
  }
  return amplitude * amplitude / (interference + noise_power_mw(geom));
}

McsTable parse_mcs_table(std::istream& in) {
  McsTable table;
  std::string line;
  int line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string name, sinr_s, p_s;
    if (!std::getline(ss, name, ',') || !std::getline(ss, sinr_s, ',') || !std::getline(ss, p_s))
      throw Error(ErrorCode::InvalidInput, fmt::format("MCS table line {}: expected 3 columns", line_no));
    double sinr_db = 0.0, p = 0.0;
    try {
      std::size_t used_s = 0, used_p = 0;
      sinr_db = std::stod(sinr_s, &used_s);
      p = std::stod(p_s, &used_p);
      if (used_s != sinr_s.size() || used_p != p_s.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      // a non-numeric first row is the column header
      if (std::exchange(header, false)) continue;
      throw Error(ErrorCode::InvalidInput, fmt::format("MCS table line {}: non-numeric value", line_no));
    }
    header = false;
    if (p < 0.0 || p > 1.0) throw Error(ErrorCode::InvalidInput, fmt::format("MCS table line {}: probability outside [0,1]", line_no));
    auto it = std::find_if(table.curves.begin(), table.curves.end(), [&](const McsCurve& c) { return c.name == name; });
    if (it == table.curves.end()) {
      table.curves.push_back({name, {}, 1});
      it = table.curves.end() - 1;
    }
    if (!it->points.empty() && (sinr_db <= it->points.back().first || p < it->points.back().second))
      throw Error(ErrorCode::InvalidInput, fmt::format("MCS table line {}: curve {} must increase in SINR and not decrease in probability", line_no, name));
    it->points.emplace_back(sinr_db, p);
  }
  if (table.curves.empty()) throw Error(ErrorCode::InvalidInput, "MCS table has no rows");
  return table;
}

McsTable load_mcs_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, fmt::format("cannot open MCS table '{}'", path));
  return parse_mcs_table(in);
}

double success_prob(const McsTable& table, int mcs, double sinr_linear) {
  if (mcs < 1 || mcs > table.size()) throw Error(ErrorCode::UnknownMcs, fmt::format("MCS {} not in table of {}", mcs, table.size()));
  const auto& pts = table.curves[static_cast<std::size_t>(mcs - 1)].points;
  if (!(sinr_linear > 0.0)) return 0.0;
  const double x = to_db(sinr_linear);
  if (x < pts.front().first) return 0.0;
  if (x >= pts.back().first) return pts.back().second;
  const auto hi = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const auto& pt) { return v < pt.first; });
  const auto lo = hi - 1;
  const double t = (x - lo->first) / (hi->first - lo->first);
  return std::clamp(lo->second + t * (hi->second - lo->second), 0.0, 1.0);
}

UserAssignment assign_bs(const Geometry& geom, const JtGraph& graph, int user) {
  const int B = static_cast<int>(geom.bs_positions.size());
  std::vector<double> single(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) single[static_cast<std::size_t>(b)] = sinr(geom, user, {b});
  UserAssignment a;
  for (int b = 1; b < B; ++b)
    if (single[static_cast<std::size_t>(b)] > single[static_cast<std::size_t>(a.serving)]) a.serving = b;
  for (int b : graph.neighbors(a.serving))
    if (!a.secondary || single[static_cast<std::size_t>(b)] > single[static_cast<std::size_t>(*a.secondary)]) a.secondary = b;
  return a;
}

bool intercell_classify(const Geometry& geom, int user, double threshold_dbm) {
  int above = 0;
  for (int b = 0; b < static_cast<int>(geom.bs_positions.size()); ++b)
    if (rx_power_dbm(geom, user, b) > threshold_dbm) ++above;
  return above >= 2;
}

UserLink evaluate_user(const Geometry& geom, const JtGraph& graph, const McsTable& table, int user, double intercell_threshold_dbm) {
  UserLink link;
  link.assignment = assign_bs(geom, graph, user);
  link.intercell = intercell_classify(geom, user, intercell_threshold_dbm);
  const double s1 = sinr(geom, user, {link.assignment.serving});
  for (int m = 1; m <= table.size(); ++m) link.p_single.push_back(success_prob(table, m, s1));
  if (link.assignment.secondary) {
    const double s2 = sinr(geom, user, {link.assignment.serving, *link.assignment.secondary});
    for (int m = 1; m <= table.size(); ++m) link.p_joint.push_back(success_prob(table, m, s2));
  }
  return link;
}

}  // namespace ojs
