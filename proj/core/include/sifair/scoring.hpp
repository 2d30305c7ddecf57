#pragma once

#include <filesystem>
#include <map>

#include "sifair/fleet.hpp"
#include "sifair/metrics.hpp"

namespace sifair {

/// Fairness incentive weights. beta scales the passenger incentive, delta the
/// driver incentive; the plus flags clip each incentive at zero.
struct ScoreWeights {
  double beta = 0;
  double delta = 0;
  bool passenger_plus = false;
  bool driver_plus = false;

  /// Throws ConfigError for negative or non-finite weights.
  void validate() const;
};

enum class VfaKind { zero, delay, table };

struct VfaKey {
  AreaId area = 0;
  int onboard = 0;
  int hour_bucket = 0;

  friend auto operator<=>(const VfaKey&, const VfaKey&) = default;
};

/// Inputs the value estimate may depend on beyond the vehicle and action.
struct ScoringContext {
  const AreaPartition* partition = nullptr;
  Seconds now = 0;
};

/// Future-value estimate V(i, a).
///   zero:  V = 0 (myopic matching on immediate reward).
///   delay: V = -omega * added_delay.
///   table: V = table[(area, onboard, bucket)] of the post-action state; the
///          area is that of the plan's last stop (or the vehicle's origin for
///          an empty plan), onboard counts every committed passenger, and the
///          bucket is the time of day divided by bucket_seconds.
class ValueFunction {
 public:
  ValueFunction() = default;

  static ValueFunction zero();
  static ValueFunction delay(double omega = 1e-4);
  static ValueFunction table(std::map<VfaKey, double> values, Seconds bucket_seconds = 3600);

  VfaKind kind() const noexcept { return kind_; }
  double omega() const noexcept { return omega_; }
  Seconds bucket_seconds() const noexcept { return bucket_seconds_; }
  const std::map<VfaKey, double>& values() const noexcept { return table_; }

  /// Table lookup; unseen keys are worth 0.
  double lookup(const VfaKey& key) const;
  VfaKey key_after(const VehicleState& v, const Action& a, const ScoringContext& ctx) const;
  double estimate(const VehicleState& v, const Action& a, const ScoringContext& ctx) const;

 private:
  VfaKind kind_ = VfaKind::zero;
  double omega_ = 0;
  Seconds bucket_seconds_ = 3600;
  std::map<VfaKey, double> table_;
};

/// Reads `area_id,onboard_count,hour_bucket,value` rows.
ValueFunction load_value_table(const std::filesystem::path& path, Seconds bucket_seconds = 3600);

/// Sum of request values in the action.
double immediate_reward(const Action& a);

/// V(i, a) + R(i, a).
double base_score(const VehicleState& v, const Action& a, const ValueFunction& vfa,
                  const ScoringContext& ctx = {});

/// sum over requests of (mean rate - group rate), each term clipped at 0 when `plus`.
double passenger_incentive(const Action& a, const PassengerHistory& hist, bool plus);

/// (mean scaled income - scaled income of `driver`) * R(i, a), the disparity
/// clipped at 0 when `plus`.
double driver_incentive(std::size_t driver, const Action& a, const DriverHistory& hist, bool plus);

/// base_score + beta * passenger_incentive + delta * driver_incentive.
double total_score(std::size_t driver, const VehicleState& v, const Action& a,
                   const ValueFunction& vfa, const PassengerHistory& hist_p,
                   const DriverHistory& hist_d, const ScoreWeights& w,
                   const ScoringContext& ctx = {});

}  // namespace sifair
