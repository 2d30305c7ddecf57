#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

namespace sifair {

/// Dense location index in [0, StreetNetwork::size()).
using LocationId = std::int32_t;
/// External label of a location as it appears in input files.
using LocationLabel = std::int64_t;
using AreaId = std::int32_t;
using Seconds = double;

inline constexpr LocationId kNoLocation = -1;
inline constexpr Seconds kUnreachable = std::numeric_limits<Seconds>::infinity();

struct Edge {
  LocationId from = kNoLocation;
  LocationId to = kNoLocation;
  Seconds cost = 0;
};

/// Directed street graph with all-pairs travel times computed at construction.
///
/// Locations are addressed by dense indices; `label()` recovers the id used in
/// the input file. Instances are immutable and safe to share between threads.
class StreetNetwork {
 public:
  StreetNetwork() = default;

  /// `labels[i]` is the external id of location i; labels must be unique.
  /// Throws InputError when an edge endpoint is out of range or a cost is not
  /// strictly positive and finite.
  StreetNetwork(std::vector<LocationLabel> labels, std::vector<Edge> edges);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  LocationLabel label(LocationId loc) const;
  std::optional<LocationId> find(LocationLabel label) const;
  /// Like find() but throws InputError for unknown labels.
  LocationId index_of(LocationLabel label) const;
  bool contains(LocationId loc) const noexcept {
    return loc >= 0 && static_cast<std::size_t>(loc) < size();
  }

  /// Unchecked travel time; kUnreachable when no path exists.
  Seconds distance(LocationId from, LocationId to) const noexcept {
    return dist_[static_cast<std::size_t>(from) * size() + static_cast<std::size_t>(to)];
  }

  /// First location after `from` on the chosen shortest path to `to`;
  /// kNoLocation when from == to or `to` is unreachable.
  LocationId next_hop(LocationId from, LocationId to) const noexcept {
    return next_[static_cast<std::size_t>(from) * size() + static_cast<std::size_t>(to)];
  }

 private:
  void compute_all_pairs();

  std::vector<LocationLabel> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<LocationId, Seconds>>> out_;
  std::vector<Seconds> dist_;
  std::vector<LocationId> next_;
};

/// Minimum travel time between two locations, or nullopt when unreachable.
/// Throws InputError if either location is not part of the network.
std::optional<Seconds> shortest_travel_time(const StreetNetwork& net, LocationId from,
                                            LocationId to);

/// Bidirectional rows x cols grid. Location (r, c) has index and label r*cols + c.
StreetNetwork make_grid(int rows, int cols, Seconds edge_cost);

/// Reads `from_id,to_id,cost_seconds` rows; `#` lines are comments.
StreetNetwork load_network(const std::filesystem::path& path);

/// Writes the network in the format read by load_network().
void write_network(const std::filesystem::path& path, const StreetNetwork& net);

/// Origin/destination area pair identifying a passenger group.
struct GroupId {
  AreaId origin = 0;
  AreaId dest = 0;

  friend bool operator==(const GroupId&, const GroupId&) = default;
  friend auto operator<=>(const GroupId&, const GroupId&) = default;
};

/// Total map from locations to areas in [0, num_areas()).
class AreaPartition {
 public:
  AreaPartition() = default;
  /// Throws InputError if an area id is out of range or some area in
  /// [0, num_areas) has no location.
  AreaPartition(std::vector<AreaId> area_of, int num_areas);

  int num_areas() const noexcept { return num_areas_; }
  std::size_t num_groups() const noexcept {
    return static_cast<std::size_t>(num_areas_) * static_cast<std::size_t>(num_areas_);
  }
  std::size_t num_locations() const noexcept { return area_of_.size(); }

  AreaId area_of(LocationId loc) const;
  const std::vector<LocationId>& locations_in(AreaId area) const;

  std::size_t group_index(const GroupId& g) const noexcept {
    return static_cast<std::size_t>(g.origin) * static_cast<std::size_t>(num_areas_) +
           static_cast<std::size_t>(g.dest);
  }
  GroupId group_at(std::size_t index) const noexcept {
    return {static_cast<AreaId>(index / static_cast<std::size_t>(num_areas_)),
            static_cast<AreaId>(index % static_cast<std::size_t>(num_areas_))};
  }

 private:
  std::vector<AreaId> area_of_;
  std::vector<std::vector<LocationId>> members_;
  int num_areas_ = 0;
};

/// Rectangular tiling of a rows x cols grid into blocks of
/// rows_per_area x cols_per_area (edge blocks may be smaller).
AreaPartition make_grid_partition(int rows, int cols, int rows_per_area, int cols_per_area);

/// Every location of the network gets a single area from a single-area partition.
AreaPartition make_single_area(const StreetNetwork& net);

/// Reads `location_id,area_id` rows. Every network location must be mapped.
AreaPartition load_partition(const std::filesystem::path& path, const StreetNetwork& net);

void write_partition(const std::filesystem::path& path, const AreaPartition& partition,
                     const StreetNetwork& net);

/// Group of a trip; throws InputError for unmapped locations.
GroupId group_of(const AreaPartition& partition, LocationId origin, LocationId dest);

}  // namespace sifair
