#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sifair/network.hpp"

namespace sifair {

using RequestId = std::int64_t;

struct Request {
  RequestId id = 0;
  LocationId pickup = kNoLocation;
  LocationId dropoff = kNoLocation;
  Seconds arrival = 0;
  GroupId group;
  /// Immediate reward for serving the request.
  double value = 1.0;
};

/// Synthetic Poisson demand: `rates[g]` is the expected number of requests of
/// group g (indexed by AreaPartition::group_index) per `step` seconds.
struct DemandProfile {
  std::vector<double> rates;
  Seconds horizon = 86400;
  Seconds step = 60;
  std::uint64_t seed = 0;
};

/// Reads `pickup_id,dropoff_id,arrival_seconds[,ignored]`. Ids are assigned in
/// file order, then requests are stably sorted by arrival.
std::vector<Request> load_requests(const std::filesystem::path& path, const StreetNetwork& net,
                                   const AreaPartition& partition);

void write_requests(const std::filesystem::path& path, std::span<const Request> requests,
                    const StreetNetwork& net);

/// Overrides Request::value from a `request_id,value` file. Unlisted requests
/// keep their value.
void apply_pricing(std::vector<Request>& requests, const std::filesystem::path& path);

/// Per step and per group (in group-index order), draws a Poisson count and
/// uniform pickup/dropoff locations from the group's areas. Arrival times are
/// whole seconds uniform within the step. Output is sorted by arrival with
/// ids 0..n-1 in that order. Throws ConfigError if a positive-rate group has
/// no valid location pair.
std::vector<Request> synth_requests(const DemandProfile& profile, const StreetNetwork& net,
                                    const AreaPartition& partition);

/// Requests with window_start <= arrival < window_start + window_len.
/// `sorted` must be ordered by arrival.
std::span<const Request> batch(std::span<const Request> sorted, Seconds window_start,
                               Seconds window_len);

}  // namespace sifair
