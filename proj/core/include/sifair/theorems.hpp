#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sifair/sim.hpp"

namespace sifair {

/// A single-window scenario with injected histories. Vehicles hold one
/// request at a time (capacity 1, bundles of 1).
struct TheoremInstance {
  StreetNetwork net;
  AreaPartition partition;
  std::vector<Request> requests;
  std::vector<VehicleState> fleet;
  PassengerHistory passenger_history;
  DriverHistory driver_history;
  SimConfig config;
  Seconds now = 0;
  /// Worst-off group index (passenger instances) or driver index (driver instances).
  std::size_t target = 0;
};

/// Weights tried when looking for a strict improvement of the worst-off metric.
inline constexpr std::array<double, 4> kWeightLadder{1.0, 10.0, 1e3, 1e6};

/// One decision window on a copy of the instance's state.
struct InstanceRun {
  WindowOutcome outcome;
  PassengerHistory passenger_after;
  DriverHistory driver_after;
};
InstanceRun run_window(const TheoremInstance& inst, const ScoreWeights& weights);

/// A vehicle that could serve an unserved request of the worst group is
/// assigned something outside that group, by construction of the scenario.
TheoremInstance build_passenger_min_unfair_instance(std::uint64_t seed);

/// A below-average driver's highest-reward request goes to a better-off
/// driver at zero weight and no other below-average driver can serve it.
TheoremInstance build_driver_min_unfair_instance(std::uint64_t seed);

/// Structural check of the passenger condition on a window outcome, using the
/// instance's pre-window history to find the worst group.
bool is_passenger_min_unfair(const TheoremInstance& inst, const WindowOutcome& outcome);

/// Below-average drivers for which the driver condition holds on the outcome.
std::vector<std::size_t> driver_min_unfair_drivers(const TheoremInstance& inst,
                                                   const WindowOutcome& outcome);

struct TheoremResult {
  std::uint64_t seed = 0;
  bool precondition_holds = false;
  double baseline = 0;
  std::vector<std::pair<double, double>> ladder;
  bool improved = false;
  /// Zero-weight problem and matching as a matcher debug document.
  std::string dump;
};

/// Worst-group service rate after one window at weight 0 versus each ladder
/// weight for beta.
TheoremResult check_passenger_theorem(std::uint64_t seed, std::span<const double> ladder,
                                      bool plus = false);

/// Target driver's scaled income after one window at delta 0 versus each
/// ladder weight, with clipped (plus) driver incentives.
TheoremResult check_driver_theorem(std::uint64_t seed, std::span<const double> ladder);

}  // namespace sifair
