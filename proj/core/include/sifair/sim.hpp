#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sifair/fleet.hpp"
#include "sifair/matcher.hpp"
#include "sifair/metrics.hpp"
#include "sifair/scoring.hpp"

namespace sifair {

enum class MatcherKind { ilp, async_greedy };

struct SimConfig {
  Seconds window_len = 60;
  Seconds horizon = 86400;
  Seconds max_wait = 300;
  Seconds max_detour = 300;
  std::size_t max_bundle = 2;
  /// Used by make_fleet(); run_simulation() takes the fleet explicitly.
  std::size_t fleet_size = 0;
  int capacity = 2;
  ValueFunction vfa;
  ScoreWeights weights;
  MatcherKind matcher = MatcherKind::ilp;
  std::uint64_t seed = 0;
  /// When false, scores are base scores and the incentive terms are never
  /// evaluated.
  bool fairness_enabled = true;
  /// Keep every window's per-vehicle served request ids in RunResult.
  bool record_matchings = false;

  FeasibilityLimits limits() const { return {max_wait, max_bundle, max_detour}; }
  /// Throws ConfigError unless durations are positive, window_len divides
  /// horizon, capacity and max_bundle are positive and weights are valid.
  void validate() const;
};

/// Seeded random fleet of cfg.fleet_size vehicles with cfg.capacity seats.
std::vector<VehicleState> make_fleet(const SimConfig& cfg, const StreetNetwork& net);

/// Served request ids per vehicle (fleet order) for one window.
using WindowMatching = std::vector<std::vector<RequestId>>;

struct RunResult {
  EquityReport passenger;
  EquityReport driver;
  std::vector<MetricsRow> log;
  std::uint64_t total_requests = 0;
  std::uint64_t total_served = 0;
  double wall_seconds = 0;
  std::vector<double> driver_income;
  std::vector<WindowMatching> matchings;

  double service_rate() const {
    return total_requests == 0 ? 1.0
                               : static_cast<double>(total_served) /
                                     static_cast<double>(total_requests);
  }
};

/// Everything decided in one window.
struct WindowOutcome {
  MatchProblem problem;
  Matching matching;
  /// Feasible actions per vehicle, aligned with problem.vehicles[k].actions.
  std::vector<std::vector<Action>> actions;
  std::vector<RequestId> served;
  std::vector<double> rewards;
};

/// Window-by-window driver of the dispatch loop. Histories are updated once
/// per window after matching, so every score in a window sees the same
/// snapshot.
class Simulator {
 public:
  Simulator(SimConfig cfg, const StreetNetwork& net, const AreaPartition& partition,
            std::vector<VehicleState> fleet);

  /// Enumerates, scores and matches `batch` at time `now`, updates both
  /// histories and assigns the chosen routes. Does not move vehicles.
  WindowOutcome decide(std::span<const Request> batch, Seconds now);

  /// Moves every vehicle along its route for dt seconds.
  void drive(Seconds now, Seconds dt);

  const SimConfig& config() const noexcept { return cfg_; }
  const std::vector<VehicleState>& vehicles() const noexcept { return fleet_; }
  std::vector<VehicleState>& vehicles() noexcept { return fleet_; }
  PassengerHistory& passenger_history() noexcept { return hist_p_; }
  const PassengerHistory& passenger_history() const noexcept { return hist_p_; }
  DriverHistory& driver_history() noexcept { return hist_d_; }
  const DriverHistory& driver_history() const noexcept { return hist_d_; }

 private:
  double score(std::size_t driver, const Action& a, Seconds now) const;

  SimConfig cfg_;
  const StreetNetwork& net_;
  const AreaPartition& partition_;
  std::vector<VehicleState> fleet_;
  PassengerHistory hist_p_;
  DriverHistory hist_d_;
  std::uint64_t window_counter_ = 0;
};

/// Runs horizon / window_len windows. Window w batches arrivals in
/// [w*len, (w+1)*len), matches at (w+1)*len, then drives every vehicle for
/// one window. Unmatched requests are dropped.
RunResult run_simulation(const SimConfig& cfg, const StreetNetwork& net,
                         const AreaPartition& partition, std::span<const Request> requests,
                         const std::vector<VehicleState>& fleet);

struct Variant {
  bool passenger_plus = false;
  bool driver_plus = false;

  friend auto operator<=>(const Variant&, const Variant&) = default;
};

struct SweepRow {
  double beta = 0;
  double delta = 0;
  Variant variant;
  RunResult result;
};

/// One run per (beta, delta, variant), all on the same demand and fleet.
/// Rows are sorted by (beta, delta, variant); duplicate grid values are
/// collapsed. Up to `jobs` runs execute concurrently.
std::vector<SweepRow> sweep(const SimConfig& cfg, const StreetNetwork& net,
                            const AreaPartition& partition, std::span<const Request> requests,
                            const std::vector<VehicleState>& fleet, std::vector<double> betas,
                            std::vector<double> deltas, std::vector<Variant> variants,
                            std::size_t jobs = 1);

}  // namespace sifair
