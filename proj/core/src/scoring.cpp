#include "sifair/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "sifair/error.hpp"
#include "sifair/io.hpp"

namespace sifair {

void ScoreWeights::validate() const {
  if (!(beta >= 0) || !std::isfinite(beta)) throw ConfigError("beta must be a finite value >= 0");
  if (!(delta >= 0) || !std::isfinite(delta)) {
    throw ConfigError("delta must be a finite value >= 0");
  }
}

ValueFunction ValueFunction::zero() { return {}; }

ValueFunction ValueFunction::delay(double omega) {
  if (!(omega >= 0) || !std::isfinite(omega)) throw ConfigError("delay weight must be >= 0");
  ValueFunction f;
  f.kind_ = VfaKind::delay;
  f.omega_ = omega;
  return f;
}

ValueFunction ValueFunction::table(std::map<VfaKey, double> values, Seconds bucket_seconds) {
  if (!(bucket_seconds > 0)) throw ConfigError("table bucket length must be positive");
  ValueFunction f;
  f.kind_ = VfaKind::table;
  f.bucket_seconds_ = bucket_seconds;
  f.table_ = std::move(values);
  return f;
}

double ValueFunction::lookup(const VfaKey& key) const {
  const auto it = table_.find(key);
  return it == table_.end() ? 0.0 : it->second;
}

VfaKey ValueFunction::key_after(const VehicleState& v, const Action& a,
                                const ScoringContext& ctx) const {
  if (ctx.partition == nullptr) throw ContractError("table value function needs a partition");
  const auto& plan = a.route_plan;
  LocationId end = plan.empty() ? (v.heading != kNoLocation ? v.heading : v.location)
                                : plan.back().location;
  int committed = static_cast<int>(v.onboard.size());
  for (const auto& s : plan) {
    if (s.kind == StopKind::pickup) ++committed;
  }
  const auto buckets_per_day = std::max<long>(1, std::lround(86400.0 / bucket_seconds_));
  const long bucket = static_cast<long>(std::floor(ctx.now / bucket_seconds_)) % buckets_per_day;
  return {ctx.partition->area_of(end), committed, static_cast<int>(bucket)};
}

double ValueFunction::estimate(const VehicleState& v, const Action& a,
                               const ScoringContext& ctx) const {
  switch (kind_) {
    case VfaKind::zero:
      return 0.0;
    case VfaKind::delay:
      return -omega_ * a.added_delay;
    case VfaKind::table:
      return lookup(key_after(v, a, ctx));
  }
  return 0.0;
}

ValueFunction load_value_table(const std::filesystem::path& path, Seconds bucket_seconds) {
  const std::string file = path.string();
  std::map<VfaKey, double> values;
  for (const auto& row : io::read_csv(path)) {
    if (row.fields.size() != 4) {
      throw ParseError(file, row.line, "expected area_id,onboard_count,hour_bucket,value");
    }
    VfaKey key{static_cast<AreaId>(io::parse_int(row, 0, file)),
               static_cast<int>(io::parse_int(row, 1, file)),
               static_cast<int>(io::parse_int(row, 2, file))};
    if (!values.emplace(key, io::parse_real(row, 3, file)).second) {
      throw ParseError(file, row.line, "duplicate value-table key");
    }
  }
  return ValueFunction::table(std::move(values), bucket_seconds);
}

double immediate_reward(const Action& a) {
  double sum = 0;
  for (const auto& r : a.requests) sum += r.value;
  return sum;
}

double base_score(const VehicleState& v, const Action& a, const ValueFunction& vfa,
                  const ScoringContext& ctx) {
  return vfa.estimate(v, a, ctx) + immediate_reward(a);
}

double passenger_incentive(const Action& a, const PassengerHistory& hist, bool plus) {
  const double mean = hist.mean();
  double sum = 0;
  for (const auto& r : a.requests) {
    const double gap = mean - hist.rate_of(r);
    sum += plus ? std::max(gap, 0.0) : gap;
  }
  return sum;
}

double driver_incentive(std::size_t driver, const Action& a, const DriverHistory& hist, bool plus) {
  const double gap = hist.mean() - hist.scaled(driver);
  return (plus ? std::max(gap, 0.0) : gap) * immediate_reward(a);
}

double total_score(std::size_t driver, const VehicleState& v, const Action& a,
                   const ValueFunction& vfa, const PassengerHistory& hist_p,
                   const DriverHistory& hist_d, const ScoreWeights& w,
                   const ScoringContext& ctx) {
  return base_score(v, a, vfa, ctx) + w.beta * passenger_incentive(a, hist_p, w.passenger_plus) +
         w.delta * driver_incentive(driver, a, hist_d, w.driver_plus);
}

}  // namespace sifair
