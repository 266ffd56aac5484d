// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// CSV outputs go to $OJS_OUTPUT_DIR (default ./acceptance_out).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ojs/error.hpp"
#include "ojs/experiments.hpp"
#include "ojs/graph.hpp"
#include "ojs/scheduler.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ojs;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::filesystem::path output_dir() {
  const char* env = std::getenv("OJS_OUTPUT_DIR");
  std::filesystem::path dir = env && *env ? env : "acceptance_out";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string csv_of(const ResultTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

void save(const std::string& name, const std::string& csv) {
  std::ofstream(output_dir() / name, std::ios::binary) << csv;
}

/// Fails the outcome with a message, keeping the first few.
struct Failures {
  int count = 0;
  std::string first;
  void add(const std::string& what) {
    if (count++ == 0) first = what;
  }
  void into(Outcome& o) const {
    if (count == 0) return;
    o.pass = false;
    o.detail += "; " + std::to_string(count) + " failures, first: " + first;
  }
};

// ---- 1, 2: exact optimality --------------------------------------------------

Outcome exact_optimality(gen::Topology topo, int instances, Algorithm algo, std::uint64_t seed) {
  Rng rng(seed);
  gen::Params prm;
  prm.topology = topo;
  prm.min_bs = 2;
  prm.max_bs = topo == gen::Topology::Bipartite ? 3 : 4;
  prm.max_packets = 6;
  prm.max_mcs = 2;
  prm.max_blocks = 3;
  prm.max_capacity = 2;
  Failures f;
  int odd = 0;
  for (int k = 0; k < instances; ++k) {
    prm.queue_utility = k % 3 == 2;
    const auto inst = gen::random_instance(rng, prm);
    Multigraph g{inst.graph.bs_count, {}};
    for (const auto& l : inst.graph.links) g.edges.push_back({l.a, l.b});
    if (!is_bipartite(g).bipartite) ++odd;
    try {
      const auto s = solve_ojs(inst, algo);
      const double brute = brute_force_ojs(inst).total_utility;
      const double opt = oracle::ojs_optimum(inst).utility;
      if (s.total_utility != brute || brute != opt)
        f.add("instance " + std::to_string(k) + ": solver " + fmt_double(s.total_utility) + ", brute force " + fmt_double(brute) +
              ", enumeration " + fmt_double(opt));
      else if (const auto bad = oracle::schedule_problem(inst, s))
        f.add("instance " + std::to_string(k) + ": " + *bad);
    } catch (const std::exception& e) {
      f.add("instance " + std::to_string(k) + ": " + e.what());
    }
  }
  Outcome o;
  o.detail = std::to_string(instances) + " instances, " + std::to_string(odd) + " with an odd cycle";
  f.into(o);
  return o;
}

// ---- 3: approximation bounds -------------------------------------------------

Outcome approximation_bounds() {
  Rng rng(303);
  gen::Params prm;
  prm.max_bs = 4;
  Failures f;
  double worst_mat = 1.0, worst_sta = 1.0;
  const int instances = 600;
  for (int k = 0; k < instances; ++k) {
    prm.queue_utility = k % 2 == 1;
    const auto inst = gen::random_instance(rng, prm);
    const double opt = oracle::ojs_optimum(inst).utility;
    const int delta = std::max(1, inst.graph.max_degree());
    try {
      const double mat = solve_ojs(inst, Algorithm::Mat).total_utility;
      const double sta = solve_ojs(inst, Algorithm::Sta).total_utility;
      if (opt > 0) {
        worst_mat = std::min(worst_mat, mat / opt);
        worst_sta = std::min(worst_sta, sta / opt);
      }
      if (mat < 2.0 / (3.0 * delta) * opt - 1e-12) f.add("instance " + std::to_string(k) + ": MAT " + fmt_double(mat) + " vs OPT " + fmt_double(opt));
      if (sta < opt / delta - 1e-12) f.add("instance " + std::to_string(k) + ": STA " + fmt_double(sta) + " vs OPT " + fmt_double(opt));
      if (mat > opt + 1e-12 || sta > opt + 1e-12) f.add("instance " + std::to_string(k) + ": heuristic above the optimum");
    } catch (const std::exception& e) {
      f.add("instance " + std::to_string(k) + ": " + e.what());
    }
  }
  Outcome o;
  o.detail = std::to_string(instances) + " instances, min MAT/OPT " + fmt_double(worst_mat) + " (bound 2/(3 delta)), min STA/OPT " +
             fmt_double(worst_sta) + " (bound 1/delta)";
  f.into(o);
  return o;
}

// ---- 4: coloring soundness ---------------------------------------------------

Outcome coloring_soundness() {
  Rng rng(404);
  gen::Params prm;
  prm.max_bs = 6;
  prm.max_packets = 12;
  prm.max_mcs = 3;
  prm.max_blocks = 5;
  prm.max_capacity = 3;
  Failures f;
  int produced = 0, fallbacks = 0;
  std::map<std::string, int> by_algo;
  for (int k = 0; produced < 1000; ++k) {
    prm.topology = static_cast<gen::Topology>(k % 3);
    prm.queue_utility = k % 2 == 1;
    const auto inst = gen::random_instance(rng, prm);
    Multigraph g{inst.graph.bs_count, {}};
    for (const auto& l : inst.graph.links) g.edges.push_back({l.a, l.b});
    SolverOptions dp, greedy;
    greedy.mmk = MmkSolver::Greedy;
    std::vector<std::pair<Algorithm, std::function<JtkResult(const SolverOptions&)>>> runs{
        {Algorithm::Mat, [&](const SolverOptions& o) { return solve_jtk_mat(inst, o); }},
        {Algorithm::Sta, [&](const SolverOptions& o) { return solve_jtk_sta(inst, o); }},
    };
    if (is_bipartite(g).bipartite) runs.push_back({Algorithm::MmkBip, [&](const SolverOptions& o) { return solve_jtk_mmk(inst, o); }});
    else if (is_planar_series_parallel(g)) runs.push_back({Algorithm::Psp, [&](const SolverOptions& o) { return solve_jtk_psp(inst, o); }});
    for (auto& [algo, run] : runs) {
      if (produced >= 1000) break;
      ++produced;
      ++by_algo[std::string(to_string(algo))];
      try {
        JtkResult z;
        try {
          z = run(k % 2 == 0 ? dp : greedy);
        } catch (const Error& e) {
          // the DP refuses instances over its state budget; the greedy one never does
          if (e.code() != ErrorCode::StateSpaceTooLarge) throw;
          ++fallbacks;
          z = run(greedy);
        }
        Schedule s;
        s.config = z.config;
        s.blocks = solve_jtc(inst, z.config);
        s.total_utility = z.utility;
        if (const auto bad = oracle::schedule_problem(inst, s)) f.add(std::string(to_string(algo)) + ": " + *bad);
      } catch (const std::exception& e) {
        f.add(std::string(to_string(algo)) + ": " + e.what());
      }
    }
  }
  Outcome o;
  o.detail = std::to_string(produced) + " z vectors (";
  for (auto it = by_algo.begin(); it != by_algo.end(); ++it) o.detail += (it == by_algo.begin() ? "" : ", ") + it->first + " " + std::to_string(it->second);
  o.detail += "), inner solver alternating DP and greedy by instance, " + std::to_string(fallbacks) + " DP state-budget refusals solved greedily";
  f.into(o);
  return o;
}

// ---- 5: ratio curves ---------------------------------------------------------

struct Series {
  std::vector<double> users, mean;
};

std::map<std::string, Series> by_metric(const ResultTable& t) {
  std::map<std::string, Series> out;
  for (const auto& r : t.rows) {
    out[r.metric.name].users.push_back(r.value);
    out[r.metric.name].mean.push_back(r.metric.mean);
  }
  return out;
}

Outcome ratio_curves(std::vector<std::string>& csvs) {
  Outcome o;
  Failures f;
  for (const std::string topo : {"complete3", "bipartite3"}) {
    RatioBenchOptions opts;
    opts.topology = topo;
    opts.samples = 1000;
    opts.seed = 5;
    const auto t = run_ratio_bench(opts);
    csvs.push_back(csv_of(t));
    save("ratio_" + topo + ".csv", csvs.back());
    const auto m = by_metric(t);
    const std::string base(to_string(ratio_baseline(topo)));
    const double delta = 2.0;  // both bench topologies
    auto worst = [&](const std::string& name) { return *std::min_element(m.at(name).mean.begin(), m.at(name).mean.end()); };
    auto worst_from = [&](const std::string& name, double min_users) {
      double w = 1.0;
      const auto& s = m.at(name);
      for (std::size_t k = 0; k < s.users.size(); ++k)
        if (s.users[k] >= min_users) w = std::min(w, s.mean[k]);
      return w;
    };
    const double sta = worst("jtk-sta/dp"), mat = worst("jtk-mat/dp");
    if (sta < 0.75) f.add(topo + ": STA(DP) worst " + fmt_double(sta));
    if (mat < 0.55) f.add(topo + ": MAT(DP) worst " + fmt_double(mat));
    if (mat < 2.0 / (3.0 * delta)) f.add(topo + ": MAT(DP) below 2/(3 delta)");
    const double base_greedy = worst_from(base + "/greedy", 10);
    if (base_greedy < 0.9) f.add(topo + ": " + base + " greedy " + fmt_double(base_greedy));
    double own = 1.0;
    for (const std::string a : {base, std::string("jtk-sta"), std::string("jtk-mat")}) own = std::min(own, worst_from(a + "/greedy_over_dp", 10));
    if (own < 0.9) f.add(topo + ": greedy over DP " + fmt_double(own));
    o.detail += (o.detail.empty() ? "" : "; ") + topo + ": STA(DP) worst " + fmt_double(sta) + ", MAT(DP) worst " + fmt_double(mat) + ", " + base +
                "(greedy) >=10 users " + fmt_double(base_greedy) + ", greedy/DP >=10 users " + fmt_double(own) + " [info: STA(greedy) " +
                fmt_double(worst_from("jtk-sta/greedy", 10)) + ", MAT(greedy) " + fmt_double(worst_from("jtk-mat/greedy", 10)) + " vs OPT]";
  }
  f.into(o);
  return o;
}

// ---- 6: backhaul sweep -------------------------------------------------------

Outcome backhaul_sweep(std::vector<std::string>& csvs) {
  auto s = load_scenario("cluster3");
  s.users = 20;
  s.horizon = 1000;
  s.replications = 200;
  const auto t = run_sweep(s, SweepAxis::Backhaul, {0, 1, 2, 3, 4, 5, 6});
  csvs.push_back(csv_of(t));
  save("backhaul_cluster3.csv", csvs.back());
  std::map<std::string, std::vector<MetricValue>> m;
  for (const auto& r : t.rows) m[r.metric.name].push_back(r.metric);
  const auto& inter = m.at("throughput_inter");
  const auto& intra = m.at("throughput_intra");

  Outcome o;
  Failures f;
  for (std::size_t k = 1; k < inter.size(); ++k) {
    const double slack = std::max(inter[k].std_error, inter[k - 1].std_error);
    if (inter[k].mean < inter[k - 1].mean - slack)
      f.add("inter-cell drops from BC " + std::to_string(k - 1) + " to " + std::to_string(k));
  }
  const double gain2 = inter[2].mean - inter[0].mean, gain6 = inter[6].mean - inter[0].mean;
  const double share = gain6 > 0 ? gain2 / gain6 : 0.0;
  if (!(gain6 > 0)) f.add("no inter-cell gain at BC 6");
  else if (share < 0.6) f.add("BC 2 captures " + fmt_double(share) + " of the gain");
  double lo = 1.0, hi = 0.0;
  for (const auto& v : intra) lo = std::min(lo, v.mean), hi = std::max(hi, v.mean);
  if (hi - lo >= 0.10) f.add("intra-cell spread " + fmt_double(hi - lo));
  o.detail = "inter-cell " + fmt_double(inter[0].mean) + " -> " + fmt_double(inter[6].mean) + ", BC 2 share of gain " + fmt_double(share) +
             ", intra-cell spread " + fmt_double(hi - lo);
  f.into(o);
  return o;
}

// ---- 7: stability flip -------------------------------------------------------

Outcome stability_flip(std::vector<std::string>& csvs) {
  const std::vector<double> bcs{0, 1, 2, 4, 6};
  std::vector<double> rates{0.1};
  for (int k = 1; k <= 12; ++k) rates.push_back(0.25 * k);
  Outcome o;
  Failures f;
  double previous = -1.0;
  int flips = 0;
  for (double bc : bcs) {
    auto s = load_scenario("cluster3");
    s.backhaul_packets = bc;
    s.horizon = 1000;
    s.replications = 20;
    const auto t = run_sweep(s, SweepAxis::ArrivalRate, rates);
    csvs.push_back(csv_of(t));
    save("stability_bc" + std::to_string(static_cast<int>(bc)) + ".csv", csvs.back());
    // 1 stable, 0 inconclusive, -1 unstable; must never rise with the rate
    std::vector<double> verdict;
    for (const auto& r : t.rows)
      if (r.metric.name == "stability") verdict.push_back(r.metric.mean);
    std::string shape;
    double threshold = 0.0;
    bool monotone = true;
    for (std::size_t k = 0; k < verdict.size(); ++k) {
      shape += verdict[k] > 0 ? 'S' : verdict[k] < 0 ? 'U' : '?';
      if (k > 0 && verdict[k] > verdict[k - 1]) monotone = false;
      if (verdict[k] > 0) threshold = rates[k];
    }
    // an empty stable region (threshold 0) is allowed; the top of the range must be unstable
    flips += shape.front() == 'S' && shape.back() == 'U' ? 1 : 0;
    if (!monotone) f.add("BC " + fmt_double(bc) + " verdicts not monotone: " + shape);
    if (shape.back() != 'U') f.add("BC " + fmt_double(bc) + " never becomes unstable: " + shape);
    if (threshold < previous) f.add("threshold falls at BC " + fmt_double(bc));
    previous = threshold;
    o.detail += (o.detail.empty() ? "" : ", ") + std::string("BC ") + fmt_double(bc) + " " + shape + " (stable up to " + fmt_double(threshold) + ")";
  }
  if (flips == 0) f.add("no backhaul capacity shows a stable-to-unstable flip");
  o.detail = "rates 0.1, 0.25..3 (S stable, ? inconclusive, U unstable): " + o.detail;
  f.into(o);
  return o;
}

// ---- 8: MaxWeight identity ---------------------------------------------------

Outcome maxweight_identity() {
  Outcome o;
  double worst = 0.0;
  int subframes = 0;
  try {
    for (const auto& [preset, horizon] : {std::pair{"cluster3", 10000}, std::pair{"star7", 2000}}) {
      auto s = load_scenario(preset);
      s.horizon = horizon;
      RunOptions opts;
      opts.check_maxweight = true;
      const auto r = run_replication(s, 0, opts);
      worst = std::max(worst, r.max_maxweight_error);
      subframes += s.horizon;
    }
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = e.what();
    return o;
  }
  o.pass = worst <= 1e-9;
  o.detail = std::to_string(subframes) + " subframes, max relative error " + fmt_double(worst);
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto run = [&](int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && secs > budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt_double(budget_s) + " s budget";
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  run(1, "bipartite exact optimality", 120, [] { return exact_optimality(gen::Topology::Bipartite, 500, Algorithm::MmkBip, 101); });
  run(2, "series-parallel exact optimality", 300, [] { return exact_optimality(gen::Topology::SeriesParallel, 300, Algorithm::Psp, 202); });
  run(3, "approximation bounds", 300, approximation_bounds);
  run(4, "coloring soundness", 60, coloring_soundness);

  std::vector<std::string> first;
  run(5, "ratio curves", 600, [&] { return ratio_curves(first); });
  run(6, "backhaul sweep", 1800, [&] { return backhaul_sweep(first); });
  run(7, "stability flip", 1200, [&] { return stability_flip(first); });
  run(8, "MaxWeight identity", 0, maxweight_identity);
  run(9, "determinism", 0, [&] {
    std::vector<std::string> second;
    Outcome o;
    ratio_curves(second);
    backhaul_sweep(second);
    stability_flip(second);
    o.pass = first.size() == second.size() && first == second;
    std::size_t same = 0;
    for (std::size_t k = 0; k < std::min(first.size(), second.size()); ++k) same += first[k] == second[k] ? 1 : 0;
    o.detail += std::to_string(same) + " of " + std::to_string(first.size()) + " CSVs byte-identical";
    return o;
  });
  return failed == 0 ? 0 : 1;
}
