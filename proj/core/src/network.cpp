#include "sifair/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "sifair/error.hpp"
#include "sifair/io.hpp"

namespace sifair {

StreetNetwork::StreetNetwork(std::vector<LocationLabel> labels, std::vector<Edge> edges)
    : labels_(std::move(labels)), edges_(std::move(edges)) {
  {
    std::set<LocationLabel> seen;
    for (const auto l : labels_) {
      if (!seen.insert(l).second) {
        throw InputError("duplicate location label " + std::to_string(l));
      }
    }
  }
  out_.resize(size());
  for (const auto& e : edges_) {
    if (!contains(e.from) || !contains(e.to)) {
      throw InputError("edge endpoint is not a declared location");
    }
    if (!(e.cost > 0) || !std::isfinite(e.cost)) {
      throw InputError("edge cost must be strictly positive and finite");
    }
    out_[static_cast<std::size_t>(e.from)].emplace_back(e.to, e.cost);
  }
  compute_all_pairs();
}

// One Dijkstra per source. The first hop of every settled node is inherited
// from its parent, so next_hop() walks the same tree distances were taken from.
void StreetNetwork::compute_all_pairs() {
  const std::size_t n = size();
  dist_.assign(n * n, kUnreachable);
  next_.assign(n * n, kNoLocation);
  using Entry = std::pair<Seconds, LocationId>;
  std::vector<char> done(n);
  for (std::size_t s = 0; s < n; ++s) {
    Seconds* dist = dist_.data() + s * n;
    LocationId* first = next_.data() + s * n;
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[s] = 0;
    heap.emplace(0.0, static_cast<LocationId>(s));
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      const auto ui = static_cast<std::size_t>(u);
      if (done[ui]) continue;
      done[ui] = 1;
      for (const auto& [v, c] : out_[ui]) {
        const auto vi = static_cast<std::size_t>(v);
        const Seconds nd = d + c;
        if (nd < dist[vi]) {
          dist[vi] = nd;
          first[vi] = (ui == s) ? v : first[ui];
          heap.emplace(nd, v);
        }
      }
    }
  }
}

LocationLabel StreetNetwork::label(LocationId loc) const {
  if (!contains(loc)) throw InputError("unknown location index " + std::to_string(loc));
  return labels_[static_cast<std::size_t>(loc)];
}

std::optional<LocationId> StreetNetwork::find(LocationLabel label) const {
  // Labels are usually dense and sorted (grids, loaded files).
  if (label >= 0 && static_cast<std::size_t>(label) < size() &&
      labels_[static_cast<std::size_t>(label)] == label) {
    return static_cast<LocationId>(label);
  }
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<LocationId>(it - labels_.begin());
}

LocationId StreetNetwork::index_of(LocationLabel label) const {
  const auto idx = find(label);
  if (!idx) throw InputError("unknown location id " + std::to_string(label));
  return *idx;
}

std::optional<Seconds> shortest_travel_time(const StreetNetwork& net, LocationId from,
                                            LocationId to) {
  if (!net.contains(from) || !net.contains(to)) {
    throw InputError("shortest_travel_time: unknown location");
  }
  const Seconds d = net.distance(from, to);
  if (d == kUnreachable) return std::nullopt;
  return d;
}

StreetNetwork make_grid(int rows, int cols, Seconds edge_cost) {
  if (rows < 1 || cols < 1) throw InputError("make_grid: dimensions must be positive");
  if (!(edge_cost > 0) || !std::isfinite(edge_cost)) {
    throw InputError("make_grid: edge cost must be positive");
  }
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<LocationLabel> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<LocationLabel>(i);
  std::vector<Edge> edges;
  auto at = [cols](int r, int c) { return static_cast<LocationId>(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        edges.push_back({at(r, c), at(r, c + 1), edge_cost});
        edges.push_back({at(r, c + 1), at(r, c), edge_cost});
      }
      if (r + 1 < rows) {
        edges.push_back({at(r, c), at(r + 1, c), edge_cost});
        edges.push_back({at(r + 1, c), at(r, c), edge_cost});
      }
    }
  }
  return StreetNetwork(std::move(labels), std::move(edges));
}

StreetNetwork load_network(const std::filesystem::path& path) {
  const std::string file = path.string();
  struct RawEdge {
    LocationLabel from, to;
    Seconds cost;
  };
  std::vector<RawEdge> raw;
  std::set<LocationLabel> labels;
  for (const auto& row : io::read_csv(path)) {
    if (row.fields.size() != 3) {
      throw ParseError(file, row.line, "expected 3 columns from_id,to_id,cost_seconds");
    }
    const auto from = io::parse_int(row, 0, file);
    const auto to = io::parse_int(row, 1, file);
    const auto cost = io::parse_int(row, 2, file);
    if (cost <= 0) throw ParseError(file, row.line, "edge cost must be a positive integer");
    raw.push_back({from, to, static_cast<Seconds>(cost)});
    labels.insert(from);
    labels.insert(to);
  }
  std::vector<LocationLabel> sorted(labels.begin(), labels.end());
  std::map<LocationLabel, LocationId> index;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    index[sorted[i]] = static_cast<LocationId>(i);
  }
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) edges.push_back({index[e.from], index[e.to], e.cost});
  return StreetNetwork(std::move(sorted), std::move(edges));
}

void write_network(const std::filesystem::path& path, const StreetNetwork& net) {
  std::ostringstream out;
  out << "# from_id,to_id,cost_seconds\n";
  for (const auto& e : net.edges()) {
    out << net.label(e.from) << ',' << net.label(e.to) << ','
        << static_cast<std::int64_t>(std::llround(e.cost)) << '\n';
  }
  io::write_file_atomic(path, out.str());
}

AreaPartition::AreaPartition(std::vector<AreaId> area_of, int num_areas)
    : area_of_(std::move(area_of)), num_areas_(num_areas) {
  if (num_areas_ < 1 && !area_of_.empty()) {
    throw InputError("partition needs at least one area");
  }
  members_.resize(static_cast<std::size_t>(std::max(num_areas_, 0)));
  for (std::size_t loc = 0; loc < area_of_.size(); ++loc) {
    const AreaId a = area_of_[loc];
    if (a < 0 || a >= num_areas_) {
      throw InputError("area id " + std::to_string(a) + " outside [0, " +
                       std::to_string(num_areas_) + ")");
    }
    members_[static_cast<std::size_t>(a)].push_back(static_cast<LocationId>(loc));
  }
  for (std::size_t a = 0; a < members_.size(); ++a) {
    if (members_[a].empty()) {
      throw InputError("area " + std::to_string(a) + " has no locations");
    }
  }
}

AreaId AreaPartition::area_of(LocationId loc) const {
  if (loc < 0 || static_cast<std::size_t>(loc) >= area_of_.size()) {
    throw InputError("location " + std::to_string(loc) + " is not mapped by the partition");
  }
  return area_of_[static_cast<std::size_t>(loc)];
}

const std::vector<LocationId>& AreaPartition::locations_in(AreaId area) const {
  if (area < 0 || area >= num_areas_) throw InputError("unknown area " + std::to_string(area));
  return members_[static_cast<std::size_t>(area)];
}

AreaPartition make_grid_partition(int rows, int cols, int rows_per_area, int cols_per_area) {
  if (rows < 1 || cols < 1 || rows_per_area < 1 || cols_per_area < 1) {
    throw InputError("make_grid_partition: dimensions must be positive");
  }
  const int area_cols = (cols + cols_per_area - 1) / cols_per_area;
  const int area_rows = (rows + rows_per_area - 1) / rows_per_area;
  std::vector<AreaId> area_of(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      area_of[static_cast<std::size_t>(r * cols + c)] =
          (r / rows_per_area) * area_cols + c / cols_per_area;
    }
  }
  return AreaPartition(std::move(area_of), area_rows * area_cols);
}

AreaPartition make_single_area(const StreetNetwork& net) {
  return AreaPartition(std::vector<AreaId>(net.size(), 0), net.size() > 0 ? 1 : 0);
}

AreaPartition load_partition(const std::filesystem::path& path, const StreetNetwork& net) {
  const std::string file = path.string();
  std::vector<AreaId> area_of(net.size(), -1);
  AreaId max_area = -1;
  for (const auto& row : io::read_csv(path)) {
    if (row.fields.size() != 2) {
      throw ParseError(file, row.line, "expected 2 columns location_id,area_id");
    }
    const auto label = io::parse_int(row, 0, file);
    const auto area = io::parse_int(row, 1, file);
    const auto loc = net.find(label);
    if (!loc) throw ParseError(file, row.line, "unknown location id " + std::to_string(label));
    if (area < 0) throw ParseError(file, row.line, "area id must be nonnegative");
    auto& slot = area_of[static_cast<std::size_t>(*loc)];
    if (slot != -1) throw ParseError(file, row.line, "location mapped twice");
    slot = static_cast<AreaId>(area);
    max_area = std::max(max_area, slot);
  }
  for (std::size_t i = 0; i < area_of.size(); ++i) {
    if (area_of[i] == -1) {
      throw InputError(file + ": location " + std::to_string(net.label(static_cast<LocationId>(i))) +
                       " has no area");
    }
  }
  return AreaPartition(std::move(area_of), max_area + 1);
}

void write_partition(const std::filesystem::path& path, const AreaPartition& partition,
                     const StreetNetwork& net) {
  std::ostringstream out;
  out << "# location_id,area_id\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto loc = static_cast<LocationId>(i);
    out << net.label(loc) << ',' << partition.area_of(loc) << '\n';
  }
  io::write_file_atomic(path, out.str());
}

GroupId group_of(const AreaPartition& partition, LocationId origin, LocationId dest) {
  return {partition.area_of(origin), partition.area_of(dest)};
}

}  // namespace sifair
