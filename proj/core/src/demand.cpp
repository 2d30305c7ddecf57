#include "sifair/demand.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "sifair/error.hpp"
#include "sifair/io.hpp"

namespace sifair {

namespace {

void sort_by_arrival(std::vector<Request>& requests) {
  std::stable_sort(requests.begin(), requests.end(),
                   [](const Request& a, const Request& b) { return a.arrival < b.arrival; });
}

}  // namespace

std::vector<Request> load_requests(const std::filesystem::path& path, const StreetNetwork& net,
                                   const AreaPartition& partition) {
  const std::string file = path.string();
  std::vector<Request> requests;
  for (const auto& row : io::read_csv(path)) {
    if (row.fields.size() < 3 || row.fields.size() > 4) {
      throw ParseError(file, row.line, "expected pickup_id,dropoff_id,arrival_seconds[,extra]");
    }
    const auto pickup_label = io::parse_int(row, 0, file);
    const auto dropoff_label = io::parse_int(row, 1, file);
    const auto arrival = io::parse_real(row, 2, file);
    const auto pickup = net.find(pickup_label);
    const auto dropoff = net.find(dropoff_label);
    if (!pickup) throw ParseError(file, row.line, "unknown pickup location " + row.fields[0]);
    if (!dropoff) throw ParseError(file, row.line, "unknown dropoff location " + row.fields[1]);
    if (*pickup == *dropoff) throw ParseError(file, row.line, "pickup equals dropoff");
    if (arrival < 0) throw ParseError(file, row.line, "arrival must be nonnegative");
    Request r;
    r.id = static_cast<RequestId>(requests.size());
    r.pickup = *pickup;
    r.dropoff = *dropoff;
    r.arrival = arrival;
    r.group = group_of(partition, r.pickup, r.dropoff);
    requests.push_back(r);
  }
  sort_by_arrival(requests);
  return requests;
}

void write_requests(const std::filesystem::path& path, std::span<const Request> requests,
                    const StreetNetwork& net) {
  std::ostringstream out;
  out << "# pickup_id,dropoff_id,arrival_seconds\n";
  for (const auto& r : requests) {
    out << net.label(r.pickup) << ',' << net.label(r.dropoff) << ','
        << io::format_real(r.arrival) << '\n';
  }
  io::write_file_atomic(path, out.str());
}

void apply_pricing(std::vector<Request>& requests, const std::filesystem::path& path) {
  const std::string file = path.string();
  std::unordered_map<RequestId, double> prices;
  for (const auto& row : io::read_csv(path)) {
    if (row.fields.size() != 2) throw ParseError(file, row.line, "expected request_id,value");
    const auto id = io::parse_int(row, 0, file);
    const auto value = io::parse_real(row, 1, file);
    if (value < 0) throw ParseError(file, row.line, "request value must be nonnegative");
    prices[id] = value;
  }
  for (auto& r : requests) {
    if (const auto it = prices.find(r.id); it != prices.end()) r.value = it->second;
  }
}

std::vector<Request> synth_requests(const DemandProfile& profile, const StreetNetwork& net,
                                    const AreaPartition& partition) {
  if (profile.rates.size() != partition.num_groups()) {
    throw ConfigError("demand profile needs one rate per group (" +
                      std::to_string(partition.num_groups()) + ")");
  }
  if (!(profile.horizon > 0) || !(profile.step > 0)) {
    throw ConfigError("demand horizon and step must be positive");
  }
  if (partition.num_locations() != net.size()) {
    throw ConfigError("partition does not cover the network");
  }
  for (std::size_t g = 0; g < profile.rates.size(); ++g) {
    const double rate = profile.rates[g];
    if (!(rate >= 0) || !std::isfinite(rate)) throw ConfigError("demand rates must be >= 0");
    if (rate == 0) continue;
    const GroupId group = partition.group_at(g);
    const bool same = group.origin == group.dest;
    if (same && partition.locations_in(group.origin).size() < 2) {
      throw ConfigError("group (" + std::to_string(group.origin) + "," +
                        std::to_string(group.dest) +
                        ") has a positive rate but no distinct pickup/dropoff pair");
    }
  }

  std::mt19937_64 rng(profile.seed);
  std::vector<Request> requests;
  const auto steps = static_cast<std::int64_t>(std::ceil(profile.horizon / profile.step));
  const auto step_whole = static_cast<std::int64_t>(std::floor(profile.step));
  for (std::int64_t s = 0; s < steps; ++s) {
    const Seconds start = static_cast<Seconds>(s) * profile.step;
    for (std::size_t g = 0; g < profile.rates.size(); ++g) {
      if (profile.rates[g] == 0) continue;
      std::poisson_distribution<int> count_dist(profile.rates[g]);
      const int count = count_dist(rng);
      const GroupId group = partition.group_at(g);
      const auto& origins = partition.locations_in(group.origin);
      const auto& dests = partition.locations_in(group.dest);
      std::uniform_int_distribution<std::size_t> pick_origin(0, origins.size() - 1);
      std::uniform_int_distribution<std::size_t> pick_dest(0, dests.size() - 1);
      std::uniform_int_distribution<std::int64_t> offset(0, std::max<std::int64_t>(step_whole - 1, 0));
      for (int k = 0; k < count; ++k) {
        Request r;
        r.pickup = origins[pick_origin(rng)];
        do {
          r.dropoff = dests[pick_dest(rng)];
        } while (r.dropoff == r.pickup);
        r.arrival = start + static_cast<Seconds>(offset(rng));
        if (r.arrival >= profile.horizon) continue;
        r.group = group;
        requests.push_back(r);
      }
    }
  }
  sort_by_arrival(requests);
  for (std::size_t i = 0; i < requests.size(); ++i) requests[i].id = static_cast<RequestId>(i);
  return requests;
}

std::span<const Request> batch(std::span<const Request> sorted, Seconds window_start,
                               Seconds window_len) {
  const Seconds window_end = window_start + window_len;
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), window_start,
                                   [](const Request& r, Seconds t) { return r.arrival < t; });
  const auto hi = std::lower_bound(lo, sorted.end(), window_end,
                                   [](const Request& r, Seconds t) { return r.arrival < t; });
  return sorted.subspan(static_cast<std::size_t>(lo - sorted.begin()),
                        static_cast<std::size_t>(hi - lo));
}

}  // namespace sifair
