#include "sifair/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "sifair/error.hpp"

namespace sifair {

namespace {

constexpr Seconds kEdge = 60;
constexpr Seconds kNow = 3600;
// Arrival such that the pickup deadline leaves exactly one edge of slack.
constexpr Seconds kTightArrival = kNow - 300 + kEdge;

SimConfig single_request_config() {
  SimConfig cfg;
  cfg.capacity = 1;
  cfg.max_bundle = 1;
  cfg.vfa = ValueFunction::zero();
  return cfg;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

LocationId pick_other(std::mt19937_64& rng, const std::vector<LocationId>& pool, LocationId not_this) {
  std::vector<LocationId> choices;
  for (const auto l : pool) {
    if (l != not_this) choices.push_back(l);
  }
  return choices[pick(rng, choices.size())];
}

Request make_request(const TheoremInstance& inst, LocationId pickup, LocationId dropoff,
                     Seconds arrival, double value) {
  Request r;
  r.id = static_cast<RequestId>(inst.requests.size());
  r.pickup = pickup;
  r.dropoff = dropoff;
  r.arrival = arrival;
  r.group = group_of(inst.partition, pickup, dropoff);
  r.value = value;
  return r;
}

// Random location farther than one edge from every location in `avoid`.
std::optional<LocationId> far_location(std::mt19937_64& rng, const StreetNetwork& net,
                                       const std::vector<LocationId>& avoid) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    const auto loc = static_cast<LocationId>(pick(rng, net.size()));
    const bool ok = std::all_of(avoid.begin(), avoid.end(),
                                [&](LocationId a) { return net.distance(a, loc) > kEdge; });
    if (ok) return loc;
  }
  return std::nullopt;
}

VehicleState idle_vehicle(std::int64_t id, LocationId at) {
  VehicleState v;
  v.id = id;
  v.location = at;
  v.capacity = 1;
  return v;
}

const Candidate& chosen_of(const WindowOutcome& out, std::size_t k) {
  return out.problem.vehicles[k].actions[out.matching.chosen[k]];
}

std::size_t argmin_group(const PassengerHistory& h) {
  std::size_t best = h.num_groups();
  for (std::size_t g = 0; g < h.num_groups(); ++g) {
    if (!h.observed(g)) continue;
    if (best == h.num_groups() || h.rate(g) < h.rate(best)) best = g;
  }
  return best;
}

// Highest-value request among the driver's single-request candidates.
std::optional<RequestId> preferred_request(const TheoremInstance& inst, const WindowOutcome& out,
                                           std::size_t driver) {
  std::optional<RequestId> best;
  double best_value = -1;
  for (const auto& a : out.actions[driver]) {
    if (a.requests.size() != 1) continue;
    if (a.requests[0].value > best_value) {
      best_value = a.requests[0].value;
      best = a.requests[0].id;
    }
  }
  (void)inst;
  return best;
}

bool can_serve(const WindowOutcome& out, std::size_t driver, RequestId r) {
  const auto& actions = out.problem.vehicles[driver].actions;
  return std::any_of(actions.begin(), actions.end(), [&](const Candidate& c) {
    return std::find(c.requests.begin(), c.requests.end(), r) != c.requests.end();
  });
}

}  // namespace

InstanceRun run_window(const TheoremInstance& inst, const ScoreWeights& weights) {
  SimConfig cfg = inst.config;
  cfg.weights = weights;
  Simulator sim(cfg, inst.net, inst.partition, inst.fleet);
  sim.passenger_history() = inst.passenger_history;
  sim.driver_history() = inst.driver_history;
  InstanceRun run;
  run.outcome = sim.decide(inst.requests, inst.now);
  run.passenger_after = sim.passenger_history();
  run.driver_after = sim.driver_history();
  return run;
}

TheoremInstance build_passenger_min_unfair_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TheoremInstance inst;
  const int rows = 3 + static_cast<int>(pick(rng, 3));
  const int cols = 4 + static_cast<int>(pick(rng, 3));
  inst.net = make_grid(rows, cols, kEdge);
  inst.partition = make_grid_partition(rows, cols, rows, (cols + 1) / 2);
  inst.config = single_request_config();
  inst.now = kNow;

  const auto home = static_cast<LocationId>(pick(rng, inst.net.size()));
  const AreaId origin = inst.partition.area_of(home);
  const AreaId worst_dest = static_cast<AreaId>(pick(rng, 2));
  const GroupId worst{origin, worst_dest};
  const GroupId other{origin, static_cast<AreaId>(1 - worst_dest)};
  inst.target = inst.partition.group_index(worst);

  inst.passenger_history = PassengerHistory(inst.partition.num_areas());
  for (std::size_t g = 0; g < inst.partition.num_groups(); ++g) {
    const std::uint64_t requested = 50 + pick(rng, 100);
    const double rate = g == inst.target ? uniform(rng, 0.05, 0.3) : uniform(rng, 0.5, 0.95);
    inst.passenger_history.seed(g, requested,
                                static_cast<std::uint64_t>(std::floor(rate * requested)));
  }

  // Vehicle 0 is the only one close enough to reach either tight request.
  inst.fleet.push_back(idle_vehicle(0, home));
  const auto r_f = make_request(
      inst, home, pick_other(rng, inst.partition.locations_in(worst.dest), home), kTightArrival, 1.0);
  inst.requests.push_back(r_f);
  const auto r_o = make_request(inst, home,
                                pick_other(rng, inst.partition.locations_in(other.dest), home),
                                kTightArrival, 1.0 + uniform(rng, 0.1, 1.0));
  inst.requests.push_back(r_o);

  const std::size_t extra = 1 + pick(rng, 3);
  for (std::size_t e = 0; e < extra; ++e) {
    const auto at = far_location(rng, inst.net, {home});
    if (!at) break;
    inst.fleet.push_back(idle_vehicle(static_cast<std::int64_t>(inst.fleet.size()), *at));
    AreaId dest = static_cast<AreaId>(pick(rng, 2));
    if (GroupId{inst.partition.area_of(*at), dest} == worst) dest = 1 - dest;
    inst.requests.push_back(make_request(
        inst, *at, pick_other(rng, inst.partition.locations_in(dest), *at), kTightArrival,
        uniform(rng, 0.5, 2.0)));
  }
  inst.driver_history = DriverHistory(inst.fleet.size());

  const auto check = run_window(inst, {});
  if (!is_passenger_min_unfair(inst, check.outcome)) {
    throw ContractError("passenger instance for seed " + std::to_string(seed) +
                        " is not min-unfair at zero weight");
  }
  return inst;
}

TheoremInstance build_driver_min_unfair_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TheoremInstance inst;
  const int rows = 4 + static_cast<int>(pick(rng, 2));
  const int cols = 5 + static_cast<int>(pick(rng, 3));
  inst.net = make_grid(rows, cols, kEdge);
  inst.partition = make_single_area(inst.net);
  inst.config = single_request_config();
  inst.now = kNow;
  inst.passenger_history = PassengerHistory(1);

  // Row-interior home so the competitor sits west and the alternative east.
  const int r = static_cast<int>(pick(rng, static_cast<std::size_t>(rows)));
  const int c = 1 + static_cast<int>(pick(rng, static_cast<std::size_t>(cols - 2)));
  const auto home = static_cast<LocationId>(r * cols + c);
  const auto west = home - 1;
  const auto east = home + 1;

  enum class Role { target, rival, rich, extra };
  std::vector<std::pair<Role, LocationId>> roles{{Role::target, home}, {Role::rival, west}};
  std::vector<LocationId> taken{west, home, east};
  if (const auto at = far_location(rng, inst.net, taken)) {
    roles.emplace_back(Role::rich, *at);
    taken.push_back(*at);
  } else {
    throw ContractError("driver instance: no room for the reference driver");
  }
  const std::size_t extra = pick(rng, 3);
  for (std::size_t e = 0; e < extra; ++e) {
    const auto at = far_location(rng, inst.net, taken);
    if (!at) break;
    roles.emplace_back(Role::extra, *at);
    taken.push_back(*at);
  }
  std::shuffle(roles.begin(), roles.end(), rng);

  const std::size_t n = roles.size();
  std::vector<double> income(n);
  std::size_t target = 0;
  std::size_t rival = 0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) throw ContractError("driver instance: cannot place incomes");
    for (std::size_t i = 0; i < n; ++i) {
      switch (roles[i].first) {
        case Role::target: income[i] = uniform(rng, 0, 100); target = i; break;
        case Role::rival: income[i] = uniform(rng, 700, 900); rival = i; break;
        case Role::rich: income[i] = 1000; break;
        case Role::extra: income[i] = uniform(rng, 0, 1000); break;
      }
    }
    double mean = 0;
    for (const double x : income) mean += x / 1000.0;
    mean /= static_cast<double>(n);
    if (income[target] / 1000.0 < mean && income[rival] / 1000.0 > mean) break;
  }
  inst.driver_history = DriverHistory(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.fleet.push_back(idle_vehicle(static_cast<std::int64_t>(i), roles[i].second));
    inst.driver_history.set_income(i, income[i]);
  }
  inst.target = target;

  const auto& everywhere = inst.partition.locations_in(0);
  const double best_value = uniform(rng, 1.5, 3.0);
  inst.requests.push_back(
      make_request(inst, home, pick_other(rng, everywhere, home), kTightArrival, best_value));
  inst.requests.push_back(make_request(inst, east, pick_other(rng, everywhere, east),
                                       kTightArrival, uniform(rng, 0.5, best_value - 0.3)));
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i].first != Role::rich && roles[i].first != Role::extra) continue;
    const auto at = roles[i].second;
    inst.requests.push_back(make_request(inst, at, pick_other(rng, everywhere, at), kTightArrival,
                                         uniform(rng, 0.5, 2.0)));
  }

  const auto check = run_window(inst, {});
  const auto unfair = driver_min_unfair_drivers(inst, check.outcome);
  if (std::find(unfair.begin(), unfair.end(), target) == unfair.end()) {
    throw ContractError("driver instance for seed " + std::to_string(seed) +
                        " is not min-unfair at zero weight");
  }
  return inst;
}

bool is_passenger_min_unfair(const TheoremInstance& inst, const WindowOutcome& outcome) {
  const std::size_t worst = argmin_group(inst.passenger_history);
  if (worst == inst.passenger_history.num_groups()) return false;
  std::set<RequestId> worst_requests;
  for (const auto& r : inst.requests) {
    if (inst.passenger_history.group_index(r.group) == worst) worst_requests.insert(r.id);
  }
  const std::set<RequestId> served(outcome.served.begin(), outcome.served.end());
  for (const auto rf : worst_requests) {
    if (served.count(rf)) continue;
    for (std::size_t k = 0; k < outcome.problem.vehicles.size(); ++k) {
      if (!can_serve(outcome, k, rf)) continue;
      const auto& given = chosen_of(outcome, k).requests;
      const bool outside = std::none_of(given.begin(), given.end(),
                                        [&](RequestId r) { return worst_requests.count(r) > 0; });
      if (outside) return true;
    }
  }
  return false;
}

std::vector<std::size_t> driver_min_unfair_drivers(const TheoremInstance& inst,
                                                   const WindowOutcome& outcome) {
  const DriverHistory& h = inst.driver_history;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (!(h.scaled(j) < h.mean())) continue;
    const auto best = preferred_request(inst, outcome, j);
    if (!best) continue;
    const auto& given = chosen_of(outcome, j).requests;
    if (given.size() == 1 && given[0] == *best) continue;
    bool contested = false;
    for (std::size_t k = 0; k < h.size() && !contested; ++k) {
      contested = k != j && h.scaled(k) < h.mean() && can_serve(outcome, k, *best);
    }
    if (!contested) out.push_back(j);
  }
  return out;
}

TheoremResult check_passenger_theorem(std::uint64_t seed, std::span<const double> ladder,
                                      bool plus) {
  const auto inst = build_passenger_min_unfair_instance(seed);
  TheoremResult res;
  res.seed = seed;
  const auto base = run_window(inst, {0, 0, plus, false});
  res.precondition_holds = is_passenger_min_unfair(inst, base.outcome);
  res.baseline = base.passenger_after.rate(inst.target);
  res.dump = to_json(base.outcome.problem, base.outcome.matching);
  for (const double beta : ladder) {
    const auto run = run_window(inst, {beta, 0, plus, false});
    const double z = run.passenger_after.rate(inst.target);
    res.ladder.emplace_back(beta, z);
    res.improved = res.improved || z > res.baseline;
  }
  return res;
}

TheoremResult check_driver_theorem(std::uint64_t seed, std::span<const double> ladder) {
  const auto inst = build_driver_min_unfair_instance(seed);
  TheoremResult res;
  res.seed = seed;
  const auto base = run_window(inst, {0, 0, false, true});
  const auto unfair = driver_min_unfair_drivers(inst, base.outcome);
  res.precondition_holds = std::find(unfair.begin(), unfair.end(), inst.target) != unfair.end();
  res.baseline = base.driver_after.scaled(inst.target);
  res.dump = to_json(base.outcome.problem, base.outcome.matching);
  for (const double delta : ladder) {
    const auto run = run_window(inst, {0, delta, false, true});
    const double z = run.driver_after.scaled(inst.target);
    res.ladder.emplace_back(delta, z);
    res.improved = res.improved || z > res.baseline;
  }
  return res;
}

}  // namespace sifair
