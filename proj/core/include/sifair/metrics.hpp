#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sifair/demand.hpp"

namespace sifair {

/// Cumulative per-group requested/served counters. z_g = served/requested for
/// observed groups; unobserved groups report the mean, so their incentive is 0.
class PassengerHistory {
 public:
  PassengerHistory() = default;
  /// Tracks num_areas^2 origin/destination groups.
  explicit PassengerHistory(int num_areas);

  std::size_t num_groups() const noexcept { return requested_.size(); }
  std::size_t group_index(const GroupId& g) const noexcept {
    return static_cast<std::size_t>(g.origin) * static_cast<std::size_t>(num_areas_) +
           static_cast<std::size_t>(g.dest);
  }

  /// Overwrites a group's counters (theorem instances and replays).
  void seed(std::size_t group, std::uint64_t requested, std::uint64_t served);

  /// Counts every batch request as requested and every id in `served` as
  /// served. Throws ContractError if a served id is not in the batch.
  void update(std::span<const Request> batch, std::span<const RequestId> served);

  bool observed(std::size_t group) const { return requested_.at(group) > 0; }
  std::uint64_t requested(std::size_t group) const { return requested_.at(group); }
  std::uint64_t served(std::size_t group) const { return served_.at(group); }
  std::uint64_t total_requested() const noexcept { return total_requested_; }
  std::uint64_t total_served() const noexcept { return total_served_; }

  double rate(std::size_t group) const;
  /// z(r): the historical rate of the request's group.
  double rate_of(const Request& r) const { return rate(group_index(r.group)); }
  /// Group-uniform mean of z over observed groups; 0 when nothing is observed.
  double mean() const noexcept { return mean_; }
  std::vector<double> observed_rates() const;
  std::size_t observed_count() const noexcept;

 private:
  void refresh();

  int num_areas_ = 0;
  std::vector<std::uint64_t> requested_;
  std::vector<std::uint64_t> served_;
  std::uint64_t total_requested_ = 0;
  std::uint64_t total_served_ = 0;
  double mean_ = 0;
};

/// Cumulative raw income per driver; scaled income is income / max income.
class DriverHistory {
 public:
  DriverHistory() = default;
  explicit DriverHistory(std::size_t num_drivers);

  std::size_t size() const noexcept { return income_.size(); }
  void set_income(std::size_t driver, double income);
  /// Adds rewards[i] to driver i.
  void update(std::span<const double> rewards);

  double income(std::size_t driver) const { return income_.at(driver); }
  const std::vector<double>& incomes() const noexcept { return income_; }
  double max_income() const noexcept { return max_; }
  double scaled(std::size_t driver) const;
  std::vector<double> scaled_incomes() const;
  /// Mean scaled income; 0 when every income is 0.
  double mean() const noexcept { return mean_; }

 private:
  void refresh();

  std::vector<double> income_;
  double max_ = 0;
  double mean_ = 0;
};

/// Mean-absolute-difference Gini, sum_ij |v_i - v_j| / (2 n^2 mean), computed
/// over the sorted values. Returns 0 when every value is 0. Throws InputError
/// for an empty list or negative values.
double gini(std::span<const double> values);

/// Population variance.
double variance(std::span<const double> values);

struct EquityReport {
  double f_gini = 1;
  double min_value = 0;
  double variance = 0;
  /// Passenger side only.
  std::optional<double> overall_service_rate;
};

/// Over observed group service rates. Throws InputError when no group is observed.
EquityReport equity_report(const PassengerHistory& h);
/// Gini and variance over scaled incomes, min over raw income. Throws
/// InputError for an empty fleet.
EquityReport equity_report(const DriverHistory& h);

/// One row of the per-window metrics log.
struct MetricsRow {
  std::size_t window_index = 0;
  double overall_service_rate = 1;
  double passenger_f_gini = 1;
  double passenger_min = 1;
  double passenger_var = 0;
  double driver_f_gini = 1;
  double driver_min_raw = 0;
  double driver_var = 0;
};

/// Current metrics; a history with no observed groups reports service rate,
/// F_Gini and min of 1 and variance 0.
MetricsRow metrics_row(std::size_t window_index, const PassengerHistory& p, const DriverHistory& d);

std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row);
std::string metrics_csv(std::span<const MetricsRow> rows);

}  // namespace sifair
