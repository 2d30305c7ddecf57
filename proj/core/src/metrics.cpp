#include "sifair/metrics.hpp"

#include <algorithm>
#include <unordered_map>

#include "sifair/error.hpp"
#include "sifair/io.hpp"

namespace sifair {

PassengerHistory::PassengerHistory(int num_areas)
    : num_areas_(num_areas),
      requested_(static_cast<std::size_t>(num_areas) * static_cast<std::size_t>(num_areas), 0),
      served_(requested_.size(), 0) {}

void PassengerHistory::seed(std::size_t group, std::uint64_t requested, std::uint64_t served) {
  if (served > requested) throw InputError("served count exceeds requested count");
  total_requested_ = total_requested_ - requested_.at(group) + requested;
  total_served_ = total_served_ - served_.at(group) + served;
  requested_[group] = requested;
  served_[group] = served;
  refresh();
}

void PassengerHistory::update(std::span<const Request> batch, std::span<const RequestId> served) {
  if (batch.empty() && served.empty()) return;
  std::unordered_map<RequestId, std::size_t> group_of_request;
  for (const auto& r : batch) {
    if (r.group.origin < 0 || r.group.origin >= num_areas_ || r.group.dest < 0 ||
        r.group.dest >= num_areas_) {
      throw ContractError("request group outside the history");
    }
    group_of_request[r.id] = group_index(r.group);
  }
  for (const auto id : served) {
    if (!group_of_request.count(id)) {
      throw ContractError("served request " + std::to_string(id) + " is not in the batch");
    }
  }
  for (const auto& r : batch) {
    ++requested_[group_index(r.group)];
    ++total_requested_;
  }
  for (const auto id : served) {
    ++served_[group_of_request[id]];
    ++total_served_;
  }
  refresh();
}

double PassengerHistory::rate(std::size_t group) const {
  if (!observed(group)) return mean_;
  return static_cast<double>(served_[group]) / static_cast<double>(requested_[group]);
}

std::vector<double> PassengerHistory::observed_rates() const {
  std::vector<double> out;
  for (std::size_t g = 0; g < requested_.size(); ++g) {
    if (requested_[g] > 0) out.push_back(rate(g));
  }
  return out;
}

std::size_t PassengerHistory::observed_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(requested_.begin(), requested_.end(), [](auto n) { return n > 0; }));
}

void PassengerHistory::refresh() {
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t g = 0; g < requested_.size(); ++g) {
    if (requested_[g] == 0) continue;
    sum += static_cast<double>(served_[g]) / static_cast<double>(requested_[g]);
    ++n;
  }
  mean_ = n > 0 ? sum / static_cast<double>(n) : 0.0;
}

DriverHistory::DriverHistory(std::size_t num_drivers) : income_(num_drivers, 0.0) {}

void DriverHistory::set_income(std::size_t driver, double income) {
  if (!(income >= 0)) throw InputError("driver income must be nonnegative");
  income_.at(driver) = income;
  refresh();
}

void DriverHistory::update(std::span<const double> rewards) {
  if (rewards.size() != income_.size()) {
    throw ContractError("one reward per driver expected");
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) income_[i] += rewards[i];
  refresh();
}

double DriverHistory::scaled(std::size_t driver) const {
  const double x = income_.at(driver);
  return max_ > 0 ? x / max_ : 0.0;
}

std::vector<double> DriverHistory::scaled_incomes() const {
  std::vector<double> out(income_.size());
  for (std::size_t i = 0; i < income_.size(); ++i) out[i] = scaled(i);
  return out;
}

void DriverHistory::refresh() {
  max_ = income_.empty() ? 0.0 : *std::max_element(income_.begin(), income_.end());
  double sum = 0;
  for (std::size_t i = 0; i < income_.size(); ++i) sum += scaled(i);
  mean_ = income_.empty() ? 0.0 : sum / static_cast<double>(income_.size());
}

double gini(std::span<const double> values) {
  if (values.empty()) throw InputError("gini of an empty list");
  std::vector<double> sorted(values.begin(), values.end());
  for (const double v : sorted) {
    if (!(v >= 0)) throw InputError("gini needs nonnegative values");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double total = 0;
  double weighted = 0;
  // sum_ij |v_i - v_j| = 2 sum_i (2i - n + 1) v_(i) over ascending v_(i).
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += (2.0 * static_cast<double>(i) - n + 1.0) * sorted[i];
  }
  if (total == 0) return 0;
  return weighted / (n * total);
}

double variance(std::span<const double> values) {
  if (values.empty()) throw InputError("variance of an empty list");
  double mean = 0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0;
  for (const double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

EquityReport equity_report(const PassengerHistory& h) {
  const auto rates = h.observed_rates();
  if (rates.empty()) throw InputError("no observed passenger groups");
  EquityReport rep;
  rep.f_gini = 1.0 - gini(rates);
  rep.min_value = *std::min_element(rates.begin(), rates.end());
  rep.variance = variance(rates);
  rep.overall_service_rate =
      static_cast<double>(h.total_served()) / static_cast<double>(h.total_requested());
  return rep;
}

EquityReport equity_report(const DriverHistory& h) {
  if (h.size() == 0) throw InputError("no drivers");
  const auto scaled = h.scaled_incomes();
  EquityReport rep;
  rep.f_gini = 1.0 - gini(scaled);
  rep.min_value = *std::min_element(h.incomes().begin(), h.incomes().end());
  rep.variance = variance(scaled);
  return rep;
}

MetricsRow metrics_row(std::size_t window_index, const PassengerHistory& p, const DriverHistory& d) {
  MetricsRow row;
  row.window_index = window_index;
  if (p.observed_count() > 0) {
    const auto rep = equity_report(p);
    row.overall_service_rate = *rep.overall_service_rate;
    row.passenger_f_gini = rep.f_gini;
    row.passenger_min = rep.min_value;
    row.passenger_var = rep.variance;
  }
  if (d.size() > 0) {
    const auto rep = equity_report(d);
    row.driver_f_gini = rep.f_gini;
    row.driver_min_raw = rep.min_value;
    row.driver_var = rep.variance;
  }
  return row;
}

std::string metrics_csv_header() {
  return "window_index,overall_service_rate,passenger_f_gini,passenger_min,passenger_var,"
         "driver_f_gini,driver_min_raw,driver_var";
}

std::string metrics_csv_line(const MetricsRow& row) {
  using io::format_real;
  std::string out = std::to_string(row.window_index);
  for (const double v : {row.overall_service_rate, row.passenger_f_gini, row.passenger_min,
                         row.passenger_var, row.driver_f_gini, row.driver_min_raw,
                         row.driver_var}) {
    out += ',';
    out += format_real(v);
  }
  return out;
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out = metrics_csv_header() + "\n";
  for (const auto& r : rows) {
    out += metrics_csv_line(r);
    out += '\n';
  }
  return out;
}

}  // namespace sifair
