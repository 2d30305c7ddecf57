#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sifair/demand.hpp"
#include "sifair/network.hpp"

namespace sifair {

enum class StopKind : std::uint8_t { pickup, dropoff };

struct Stop {
  LocationId location = kNoLocation;
  RequestId request = 0;
  StopKind kind = StopKind::pickup;
  /// Latest time the stop may be executed.
  Seconds deadline = 0;
  /// Dropoffs only: maximum ride time (direct trip + detour allowance). Once
  /// the pickup is executed the deadline is tightened to pickup time + ride_limit.
  Seconds ride_limit = kUnreachable;

  friend bool operator==(const Stop&, const Stop&) = default;
};

struct VehicleState {
  std::int64_t id = 0;
  /// Last location the vehicle passed through.
  LocationId location = kNoLocation;
  /// Next location when the vehicle is part-way along an edge.
  LocationId heading = kNoLocation;
  /// Seconds already travelled from `location` towards `heading`.
  Seconds progress = 0;
  std::vector<Stop> route;
  int capacity = 1;
  std::vector<RequestId> onboard;
  double income = 0;

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// A subset of the batch assigned to one vehicle together with the route that
/// serves it and everything already committed. The empty subset is the null
/// action, whose route is the vehicle's current route.
struct Action {
  std::vector<Request> requests;
  std::vector<Stop> route_plan;
  /// Extra completion time of route_plan over the current route.
  Seconds added_delay = 0;

  bool is_null() const noexcept { return requests.empty(); }
};

struct FeasibilityLimits {
  Seconds max_wait = 300;
  std::size_t max_bundle = 2;
  Seconds max_detour = 300;
};

/// Where a vehicle can start a new plan from and when it gets there.
struct PlanOrigin {
  LocationId location = kNoLocation;
  Seconds ready_at = 0;
};
PlanOrigin plan_origin(const VehicleState& v, Seconds now, const StreetNetwork& net);

/// Pickup and dropoff stops for a new request under the given limits.
std::pair<Stop, Stop> stops_for(const Request& r, const FeasibilityLimits& limits,
                                const StreetNetwork& net);

/// Completion time of executing `plan` in order, or kUnreachable if it breaks
/// a deadline, ride-time limit, precedence or capacity constraint.
Seconds plan_completion(const VehicleState& v, std::span<const Stop> plan, Seconds now,
                        const StreetNetwork& net);

/// All feasible actions of `v` over `batch`: the null action first, then
/// subsets of increasing size (lexicographic in batch order) up to
/// min(max_bundle, capacity - |onboard|). Each route plan is the minimum
/// completion-time ordering of the existing and new stops.
std::vector<Action> feasible_actions(const VehicleState& v, std::span<const Request> batch,
                                     Seconds now, const FeasibilityLimits& limits,
                                     const StreetNetwork& net);

/// Replaces the vehicle's route by the action's plan. Throws ContractError if
/// the plan drops a committed stop, breaks pickup-before-dropoff order or
/// exceeds capacity.
void assign(VehicleState& v, const Action& chosen);

struct AdvanceResult {
  std::vector<RequestId> picked_up;
  std::vector<RequestId> completed;
};

/// Moves the vehicle along its route for `dt` seconds starting at `now`,
/// executing stops it reaches. Partial edge progress is retained.
AdvanceResult drive(VehicleState& v, Seconds now, Seconds dt, const StreetNetwork& net);

/// assign() followed by drive().
AdvanceResult advance(VehicleState& v, const Action& chosen, Seconds now, Seconds dt,
                      const StreetNetwork& net);

/// Reads `vehicle_id,start_location,capacity` rows.
std::vector<VehicleState> load_fleet(const std::filesystem::path& path, const StreetNetwork& net);

/// `size` idle vehicles with ids 0..size-1 at seeded uniform locations.
std::vector<VehicleState> random_fleet(std::size_t size, int capacity, const StreetNetwork& net,
                                       std::uint64_t seed);

}  // namespace sifair
