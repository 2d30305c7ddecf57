#include "sifair/fleet.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sifair/error.hpp"
#include "sifair/io.hpp"

namespace sifair {

namespace {

// Tolerance on deadline comparisons.
constexpr Seconds kTimeSlack = 1e-6;

// Exact minimum-completion ordering of a small stop set by depth-first search.
// Stops are explored in index order, so among equally fast orderings the first
// one found (lexicographic in stop index) is kept.
class RouteSearch {
 public:
  RouteSearch(const StreetNetwork& net, std::vector<Stop> stops, int capacity, int initial_load)
      : net_(net), stops_(std::move(stops)), capacity_(capacity), initial_load_(initial_load) {
    const std::size_t n = stops_.size();
    partner_.assign(n, -1);
    std::unordered_map<RequestId, int> pickup_at;
    for (std::size_t i = 0; i < n; ++i) {
      if (stops_[i].kind == StopKind::pickup) pickup_at[stops_[i].request] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (stops_[i].kind != StopKind::dropoff) continue;
      if (const auto it = pickup_at.find(stops_[i].request); it != pickup_at.end()) {
        partner_[i] = it->second;
      }
    }
    times_.assign(n, 0);
    order_.reserve(n);
  }

  /// Returns false if no feasible ordering exists.
  bool solve(LocationId origin, Seconds ready_at) {
    best_ = kUnreachable;
    best_order_.clear();
    order_.clear();
    visit(origin, ready_at, initial_load_, 0);
    return best_ != kUnreachable;
  }

  Seconds completion() const { return best_; }

  std::vector<Stop> plan() const {
    std::vector<Stop> out;
    out.reserve(best_order_.size());
    for (const int i : best_order_) out.push_back(stops_[static_cast<std::size_t>(i)]);
    return out;
  }

 private:
  void visit(LocationId at, Seconds t, int load, std::uint64_t visited) {
    const std::size_t n = stops_.size();
    if (order_.size() == n) {
      if (t < best_) {
        best_ = t;
        best_order_ = order_;
      }
      return;
    }
    // Every unvisited stop is reached no earlier than t + d(at, stop).
    for (std::size_t i = 0; i < n; ++i) {
      if (visited >> i & 1U) continue;
      const Seconds earliest = t + net_.distance(at, stops_[i].location);
      if (earliest > stops_[i].deadline + kTimeSlack || earliest >= best_) return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (visited >> i & 1U) continue;
      const Stop& s = stops_[i];
      int next_load = load;
      if (s.kind == StopKind::pickup) {
        if (load + 1 > capacity_) continue;
        next_load = load + 1;
      } else {
        const int p = partner_[i];
        if (p >= 0 && !(visited >> p & 1U)) continue;
        next_load = load - 1;
      }
      const Seconds arrive = t + net_.distance(at, s.location);
      if (s.kind == StopKind::dropoff && partner_[i] >= 0 &&
          arrive > times_[static_cast<std::size_t>(partner_[i])] + s.ride_limit + kTimeSlack) {
        continue;
      }
      times_[i] = arrive;
      order_.push_back(static_cast<int>(i));
      visit(s.location, arrive, next_load, visited | (std::uint64_t{1} << i));
      order_.pop_back();
    }
  }

  const StreetNetwork& net_;
  std::vector<Stop> stops_;
  std::vector<int> partner_;
  int capacity_;
  int initial_load_;
  std::vector<Seconds> times_;
  std::vector<int> order_;
  std::vector<int> best_order_;
  Seconds best_ = kUnreachable;
};

void check_plan_structure(const VehicleState& v, std::span<const Stop> plan) {
  std::unordered_set<RequestId> onboard(v.onboard.begin(), v.onboard.end());
  std::unordered_set<RequestId> picked;
  std::unordered_set<RequestId> dropped;
  int load = static_cast<int>(v.onboard.size());
  for (const auto& s : plan) {
    if (s.kind == StopKind::pickup) {
      if (onboard.count(s.request) || !picked.insert(s.request).second) {
        throw ContractError("route plan picks up request " + std::to_string(s.request) +
                            " twice");
      }
      if (++load > v.capacity) throw ContractError("route plan exceeds vehicle capacity");
    } else {
      if (!onboard.count(s.request) && !picked.count(s.request)) {
        throw ContractError("route plan drops request " + std::to_string(s.request) +
                            " before picking it up");
      }
      if (!dropped.insert(s.request).second) {
        throw ContractError("route plan drops request " + std::to_string(s.request) + " twice");
      }
      --load;
    }
  }
  for (const auto r : onboard) {
    if (!dropped.count(r)) {
      throw ContractError("route plan abandons onboard request " + std::to_string(r));
    }
  }
  for (const auto r : picked) {
    if (!dropped.count(r)) {
      throw ContractError("route plan never drops request " + std::to_string(r));
    }
  }
  for (const auto& s : v.route) {
    const bool kept = std::any_of(plan.begin(), plan.end(), [&](const Stop& p) {
      return p.request == s.request && p.kind == s.kind;
    });
    if (!kept) {
      throw ContractError("route plan drops committed stop of request " +
                          std::to_string(s.request));
    }
  }
}

}  // namespace

PlanOrigin plan_origin(const VehicleState& v, Seconds now, const StreetNetwork& net) {
  if (v.heading != kNoLocation) {
    return {v.heading, now + (net.distance(v.location, v.heading) - v.progress)};
  }
  return {v.location, now};
}

std::pair<Stop, Stop> stops_for(const Request& r, const FeasibilityLimits& limits,
                                const StreetNetwork& net) {
  const Seconds pickup_deadline = r.arrival + limits.max_wait;
  const Seconds ride_limit = net.distance(r.pickup, r.dropoff) + limits.max_detour;
  Stop pickup{r.pickup, r.id, StopKind::pickup, pickup_deadline, kUnreachable};
  Stop dropoff{r.dropoff, r.id, StopKind::dropoff, pickup_deadline + ride_limit, ride_limit};
  return {pickup, dropoff};
}

Seconds plan_completion(const VehicleState& v, std::span<const Stop> plan, Seconds now,
                        const StreetNetwork& net) {
  const PlanOrigin origin = plan_origin(v, now, net);
  std::unordered_set<RequestId> onboard(v.onboard.begin(), v.onboard.end());
  std::unordered_map<RequestId, Seconds> picked_at;
  int load = static_cast<int>(v.onboard.size());
  LocationId at = origin.location;
  Seconds t = origin.ready_at;
  for (const auto& s : plan) {
    t += net.distance(at, s.location);
    at = s.location;
    if (t > s.deadline + kTimeSlack) return kUnreachable;
    if (s.kind == StopKind::pickup) {
      if (onboard.count(s.request) || picked_at.count(s.request)) return kUnreachable;
      if (++load > v.capacity) return kUnreachable;
      picked_at[s.request] = t;
    } else {
      const auto it = picked_at.find(s.request);
      if (it != picked_at.end()) {
        if (t > it->second + s.ride_limit + kTimeSlack) return kUnreachable;
        picked_at.erase(it);
      } else if (!onboard.erase(s.request)) {
        return kUnreachable;
      }
      --load;
    }
  }
  return t;
}

std::vector<Action> feasible_actions(const VehicleState& v, std::span<const Request> batch,
                                     Seconds now, const FeasibilityLimits& limits,
                                     const StreetNetwork& net) {
  std::vector<Action> actions;
  actions.push_back(Action{{}, v.route, 0});

  const Seconds base = plan_completion(v, v.route, now, net);
  if (base == kUnreachable) return actions;

  const int free_seats = v.capacity - static_cast<int>(v.onboard.size());
  const std::size_t max_size =
      free_seats > 0 ? std::min(limits.max_bundle, static_cast<std::size_t>(free_seats)) : 0;
  if (max_size == 0 || batch.empty()) return actions;

  const PlanOrigin origin = plan_origin(v, now, net);
  std::vector<std::pair<Stop, Stop>> new_stops;
  new_stops.reserve(batch.size());
  for (const auto& r : batch) new_stops.push_back(stops_for(r, limits, net));

  auto try_subset = [&](const std::vector<std::size_t>& subset) -> bool {
    std::vector<Stop> stops = v.route;
    for (const auto j : subset) {
      stops.push_back(new_stops[j].first);
      stops.push_back(new_stops[j].second);
    }
    if (stops.size() > 64) return false;
    RouteSearch search(net, std::move(stops), v.capacity, static_cast<int>(v.onboard.size()));
    if (!search.solve(origin.location, origin.ready_at)) return false;
    Action a;
    a.requests.reserve(subset.size());
    for (const auto j : subset) a.requests.push_back(batch[j]);
    a.route_plan = search.plan();
    a.added_delay = search.completion() - base;
    actions.push_back(std::move(a));
    return true;
  };

  std::vector<std::vector<std::size_t>> level;
  std::vector<char> single_ok(batch.size(), 0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Request& r = batch[j];
    const Seconds direct = net.distance(r.pickup, r.dropoff);
    if (direct == kUnreachable) continue;
    if (origin.ready_at + net.distance(origin.location, r.pickup) >
        new_stops[j].first.deadline + kTimeSlack) {
      continue;
    }
    if (try_subset({j})) {
      single_ok[j] = 1;
      level.push_back({j});
    }
  }

  // Larger subsets are only built from feasible smaller ones.
  for (std::size_t size = 2; size <= max_size && !level.empty(); ++size) {
    std::set<std::vector<std::size_t>> known(level.begin(), level.end());
    std::vector<std::vector<std::size_t>> next;
    for (const auto& base_subset : level) {
      for (std::size_t j = base_subset.back() + 1; j < batch.size(); ++j) {
        if (!single_ok[j]) continue;
        std::vector<std::size_t> candidate = base_subset;
        candidate.push_back(j);
        bool closed = true;
        for (std::size_t drop = 0; drop + 1 < candidate.size() && closed; ++drop) {
          std::vector<std::size_t> sub;
          for (std::size_t k = 0; k < candidate.size(); ++k) {
            if (k != drop) sub.push_back(candidate[k]);
          }
          closed = known.count(sub) > 0;
        }
        if (closed && try_subset(candidate)) next.push_back(std::move(candidate));
      }
    }
    level = std::move(next);
  }
  return actions;
}

void assign(VehicleState& v, const Action& chosen) {
  check_plan_structure(v, chosen.route_plan);
  v.route = chosen.route_plan;
}

AdvanceResult drive(VehicleState& v, Seconds now, Seconds dt, const StreetNetwork& net) {
  AdvanceResult result;
  Seconds t = now;
  Seconds remaining = dt;

  auto execute = [&](const Stop& s) {
    if (s.kind == StopKind::pickup) {
      v.onboard.push_back(s.request);
      result.picked_up.push_back(s.request);
      for (auto& later : v.route) {
        if (later.kind == StopKind::dropoff && later.request == s.request) {
          later.deadline = std::min(later.deadline, t + later.ride_limit);
        }
      }
    } else {
      std::erase(v.onboard, s.request);
      result.completed.push_back(s.request);
    }
  };

  while (true) {
    if (v.heading != kNoLocation) {
      const Seconds need = net.distance(v.location, v.heading) - v.progress;
      if (need <= remaining) {
        remaining -= need;
        t += need;
        v.location = v.heading;
        v.heading = kNoLocation;
        v.progress = 0;
      } else {
        v.progress += remaining;
        break;
      }
      continue;
    }
    while (!v.route.empty() && v.route.front().location == v.location) {
      const Stop s = v.route.front();
      v.route.erase(v.route.begin());
      execute(s);
    }
    if (v.route.empty() || remaining <= 0) break;
    const LocationId hop = net.next_hop(v.location, v.route.front().location);
    if (hop == kNoLocation) {
      throw ContractError("vehicle " + std::to_string(v.id) + " cannot reach its next stop");
    }
    v.heading = hop;
    v.progress = 0;
  }
  return result;
}

AdvanceResult advance(VehicleState& v, const Action& chosen, Seconds now, Seconds dt,
                      const StreetNetwork& net) {
  if (plan_completion(v, chosen.route_plan, now, net) == kUnreachable) {
    check_plan_structure(v, chosen.route_plan);
    throw ContractError("route plan misses a deadline");
  }
  assign(v, chosen);
  return drive(v, now, dt, net);
}

std::vector<VehicleState> load_fleet(const std::filesystem::path& path, const StreetNetwork& net) {
  const std::string file = path.string();
  std::vector<VehicleState> fleet;
  std::set<std::int64_t> ids;
  for (const auto& row : io::read_csv(path)) {
    if (row.fields.size() != 3) {
      throw ParseError(file, row.line, "expected vehicle_id,start_location,capacity");
    }
    VehicleState v;
    v.id = io::parse_int(row, 0, file);
    const auto loc = net.find(io::parse_int(row, 1, file));
    if (!loc) throw ParseError(file, row.line, "unknown start location " + row.fields[1]);
    v.location = *loc;
    const auto cap = io::parse_int(row, 2, file);
    if (cap < 1) throw ParseError(file, row.line, "capacity must be positive");
    v.capacity = static_cast<int>(cap);
    if (!ids.insert(v.id).second) throw ParseError(file, row.line, "duplicate vehicle id");
    fleet.push_back(std::move(v));
  }
  return fleet;
}

std::vector<VehicleState> random_fleet(std::size_t size, int capacity, const StreetNetwork& net,
                                       std::uint64_t seed) {
  if (capacity < 1) throw InputError("vehicle capacity must be positive");
  if (size > 0 && net.size() == 0) throw InputError("cannot place vehicles on an empty network");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, net.size() == 0 ? 0 : net.size() - 1);
  std::vector<VehicleState> fleet(size);
  for (std::size_t i = 0; i < size; ++i) {
    fleet[i].id = static_cast<std::int64_t>(i);
    fleet[i].location = static_cast<LocationId>(pick(rng));
    fleet[i].capacity = capacity;
  }
  return fleet;
}

}  // namespace sifair
