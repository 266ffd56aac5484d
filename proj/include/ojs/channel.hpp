#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ojs/model.hpp"

namespace ojs {

struct Point {
  double x = 0.0;  // meters
  double y = 0.0;
};

struct Geometry {
  std::vector<Point> bs_positions;
  double bs_height_m = 20.0;
  std::vector<Point> user_positions;
  double user_height_m = 1.5;
  double tx_power_dbm = 39.0;
  double carrier_freq_mhz = 1500.0;
  double bandwidth_hz = 10e6;
  double noise_psd_dbm_hz = -174.0;
};

/// Urban Hata path loss in dB (small/medium city mobile antenna correction).
/// Distance, frequency and mobile height are clamped to the model's range
/// with a one-time warning; a BS height outside 30..200 m only warns.
double hata_path_loss(double distance_km, double f_mhz, double hb_m, double hm_m);

double distance_m(Point a, Point b);
double rx_power_dbm(const Geometry& geom, int user, int bs);
double noise_power_mw(const Geometry& geom);

/// Coherently combined SINR (linear) of `transmit_set` at `user`. With
/// `all_bs_active`, every BS outside the set interferes at full power.
/// Throws EmptyTransmitSet.
double sinr(const Geometry& geom, int user, const std::vector<int>& transmit_set, bool all_bs_active = true);

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

struct McsCurve {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (SINR dB, success probability), SINR ascending
  int blocks_per_packet = 1;
};

struct McsTable {
  std::vector<McsCurve> curves;

  int size() const { return static_cast<int>(curves.size()); }
};

/// Reads `mcs_name,sinr_db,success_prob` rows; MCS order follows first
/// appearance. Throws InvalidInput on malformed rows or a decreasing curve.
McsTable parse_mcs_table(std::istream& in);
McsTable load_mcs_table(const std::string& path);

/// Piecewise-linear in dB: 0 below the first point, the last value above the
/// last point. `mcs` is 1-based. Throws UnknownMcs.
double success_prob(const McsTable& table, int mcs, double sinr_linear);

/// Serving BS: best single-BS SINR. Secondary BS: best single-BS SINR among
/// the serving BS's backhaul neighbors. Ties go to the lower index.
UserAssignment assign_bs(const Geometry& geom, const JtGraph& graph, int user);

/// True iff at least two BSs reach `user` above `threshold_dbm`.
bool intercell_classify(const Geometry& geom, int user, double threshold_dbm);

/// Per-MCS success probabilities of one user for single transmission from
/// the serving BS and joint transmission with the secondary BS.
struct UserLink {
  UserAssignment assignment;
  std::vector<double> p_single;
  std::vector<double> p_joint;  // empty without a secondary BS
  bool intercell = false;
};

UserLink evaluate_user(const Geometry& geom, const JtGraph& graph, const McsTable& table, int user, double intercell_threshold_dbm);

}  // namespace ojs
