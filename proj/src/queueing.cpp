#include "ojs/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ojs/error.hpp"

namespace ojs {

std::int64_t NetState::total() const {
  return std::accumulate(primary.begin(), primary.end(), std::int64_t{0}) + std::accumulate(joint.begin(), joint.end(), std::int64_t{0});
}

double ArrivalProcess::mean() const {
  switch (kind) {
    case ArrivalKind::Binomial: return n_trials * p;
    case ArrivalKind::Bernoulli: return p;
    case ArrivalKind::Deterministic: return per_subframe;
  }
  return 0.0;
}

ArrivalProcess ArrivalProcess::with_mean(double rate) const {
  if (rate < 0.0) throw Error(ErrorCode::InvalidConfig, fmt::format("negative arrival rate {}", rate));
  ArrivalProcess out = *this;
  switch (kind) {
    case ArrivalKind::Binomial:
      if (n_trials < 1 || rate > n_trials)
        throw Error(ErrorCode::InvalidConfig, fmt::format("rate {} exceeds binomial trials {}", rate, n_trials));
      out.p = rate / n_trials;
      break;
    case ArrivalKind::Bernoulli:
      if (rate > 1.0) throw Error(ErrorCode::InvalidConfig, fmt::format("Bernoulli rate {} exceeds 1", rate));
      out.p = rate;
      break;
    case ArrivalKind::Deterministic:
      if (rate != std::floor(rate)) throw Error(ErrorCode::InvalidConfig, fmt::format("deterministic rate {} is not an integer", rate));
      out.per_subframe = static_cast<int>(rate);
      break;
  }
  return out;
}

int ArrivalProcess::draw(Rng& rng) const {
  switch (kind) {
    case ArrivalKind::Binomial: return rng.binomial(n_trials, p);
    case ArrivalKind::Bernoulli: return rng.bernoulli(p) ? 1 : 0;
    case ArrivalKind::Deterministic: return per_subframe;
  }
  return 0;
}

Instance build_instance(const Network& net, const NetState& state) {
  Instance inst;
  inst.graph = net.graph;
  inst.blocks_per_subframe = net.blocks_per_subframe;
  inst.utility.kind = UtilityKind::QueueBased;
  inst.utility.joint_weighting = net.joint_weighting;
  const std::size_t N = net.users.size();
  inst.users.reserve(N);
  inst.utility.queues.reserve(N);
  const auto S = static_cast<std::int64_t>(net.blocks_per_subframe);

  auto options = [&](const std::vector<double>& probs) {
    std::vector<McsOption> out;
    for (std::size_t m = 0; m < probs.size(); ++m) out.push_back({net.blocks_per_packet[m], probs[m]});
    return out;
  };
  auto any_positive = [](const std::vector<double>& v) { return std::any_of(v.begin(), v.end(), [](double p) { return p > 0.0; }); };

  int next_id = 0;
  for (std::size_t n = 0; n < N; ++n) {
    const auto& link = net.users[n];
    inst.users.push_back(link.assignment);
    const auto L = state.primary[n];
    const auto Lh = state.joint[n];
    inst.utility.queues.push_back({L, Lh});

    std::int64_t forwardable = 0;
    if (link.assignment.secondary && L > Lh) {
      const auto k = net.graph.link_index(link.assignment.serving, *link.assignment.secondary);
      if (k) forwardable = net.graph.links[static_cast<std::size_t>(*k)].capacity_bytes / net.packet_bytes;
    }
    const std::int64_t wireless = any_positive(link.p_single) && L > 0 ? S : 0;
    const std::int64_t primary_offer = std::min(L, wireless + forwardable);
    for (std::int64_t c = 0; c < primary_offer; ++c)
      inst.packets.push_back({next_id++, static_cast<int>(n), false, net.packet_bytes, options(link.p_single)});

    if (link.assignment.secondary && any_positive(link.p_joint)) {
      const std::int64_t weight = net.joint_weighting == JointWeighting::SecondaryQueue ? Lh : L;
      const std::int64_t joint_offer = weight > 0 ? std::min(Lh, S) : 0;
      for (std::int64_t c = 0; c < joint_offer; ++c)
        inst.packets.push_back({next_id++, static_cast<int>(n), true, net.packet_bytes, options(link.p_joint)});
    }
  }
  return inst;
}

double maxweight_value(const Instance& inst, const NetState& state, const Schedule& sched) {
  const std::size_t N = state.primary.size();
  std::vector<double> e_single(N, 0.0), e_joint(N, 0.0);
  std::vector<std::int64_t> forwards(N, 0);
  for (std::size_t i = 0; i < inst.packets.size(); ++i) {
    const auto& p = inst.packets[i];
    const Config r = sched.config[i];
    const auto n = static_cast<std::size_t>(p.user);
    if (r == kForward) ++forwards[n];
    else if (r >= 1) (p.joint ? e_joint : e_single)[n] += p.per_mcs[static_cast<std::size_t>(r - 1)].success_prob;
  }
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const auto L = static_cast<double>(state.primary[n]);
    const auto Lh = static_cast<double>(state.joint[n]);
    total += L * e_single[n] + std::max(L - Lh, 0.0) * static_cast<double>(forwards[n]) + Lh * e_joint[n];
  }
  return total;
}

SubframeReport step(NetState& state, const Network& net, const ArrivalProcess& arrivals, const StepOptions& opts, Rng& rng) {
  const std::size_t N = net.users.size();
  SubframeReport rep;
  rep.arrivals.resize(N);
  rep.single_successes.assign(N, 0);
  rep.joint_successes.assign(N, 0);
  rep.forwards.assign(N, 0);
  for (std::size_t n = 0; n < N; ++n) rep.arrivals[n] = arrivals.draw(rng);

  const Instance inst = build_instance(net, state);
  if (!inst.packets.empty()) {
    const Schedule sched = solve_ojs(inst, opts.algorithm, opts.solver);
    rep.objective = sched.total_utility;
    rep.maxweight = maxweight_value(inst, state, sched);
    if (opts.check_maxweight) {
      const double scale = std::max({1.0, std::abs(rep.objective), std::abs(rep.maxweight)});
      if (std::abs(rep.objective - rep.maxweight) > 1e-9 * scale)
        throw Error(ErrorCode::Internal, fmt::format("subframe {}: solver objective {} differs from MaxWeight value {}", state.t, rep.objective, rep.maxweight));
    }
    for (std::size_t i = 0; i < inst.packets.size(); ++i) {
      const auto& p = inst.packets[i];
      const Config r = sched.config[i];
      const auto n = static_cast<std::size_t>(p.user);
      if (r == kForward) {
        ++rep.forwards[n];
      } else if (r >= 1 && rng.bernoulli(p.per_mcs[static_cast<std::size_t>(r - 1)].success_prob)) {
        ++(p.joint ? rep.joint_successes : rep.single_successes)[n];
      }
    }
  }

  for (std::size_t n = 0; n < N; ++n) {
    state.primary[n] += rep.arrivals[n] - rep.single_successes[n] - rep.forwards[n];
    state.joint[n] += rep.forwards[n] - rep.joint_successes[n];
    if (state.primary[n] < 0 || state.joint[n] < 0)
      throw Error(ErrorCode::Internal, fmt::format("negative queue for user {} at subframe {}", n, state.t));
  }
  ++state.t;
  return rep;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

double trailing_slope(const std::vector<double>& trace) {
  const std::size_t start = trace.size() / 2;
  const std::size_t n = trace.size() - start;
  if (n < 2) return 0.0;
  const double xm = (static_cast<double>(n) - 1.0) / 2.0;
  double ym = 0.0;
  for (std::size_t k = start; k < trace.size(); ++k) ym += trace[k];
  ym /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = static_cast<double>(k) - xm;
    sxy += dx * (trace[start + k] - ym);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Verdict detect_stability(const std::vector<double>& trace, const StabilityOptions& opts) {
  if (trace.size() < opts.min_length)
    throw Error(ErrorCode::TraceTooShort, fmt::format("trace of {} subframes, need {}", trace.size(), opts.min_length));
  const double slope = trailing_slope(trace);
  const double peak = *std::max_element(trace.begin(), trace.end());
  if (slope <= opts.epsilon && peak <= opts.max_queue) return Verdict::Stable;
  if (slope >= 10.0 * opts.epsilon) return Verdict::Unstable;
  return Verdict::Inconclusive;
}

}  // namespace ojs
