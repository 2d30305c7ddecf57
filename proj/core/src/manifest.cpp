#include "sifair/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sifair/error.hpp"

namespace sifair {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t line_at(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

class Reader {
 public:
  Reader(std::string_view text, fs::path base, std::string name)
      : text_(text), base_(std::move(base)), name_(std::move(name)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(name_ + ":" + std::to_string(line_of(path)) + ": " + path + ": " + msg);
  }

  // Line of the last key in a dotted path, found by scanning the keys in order.
  std::size_t line_of(const std::string& path) const {
    std::size_t pos = 0;
    std::string rest = path;
    while (!rest.empty()) {
      const auto dot = rest.find('.');
      const std::string key = rest.substr(0, dot);
      rest = dot == std::string::npos ? "" : rest.substr(dot + 1);
      const auto found = text_.find("\"" + key + "\"", pos);
      if (found == std::string_view::npos) break;
      pos = found;
    }
    return line_at(text_, pos);
  }

  void only_keys(const json& obj, const std::string& path, std::set<std::string> allowed) const {
    if (!obj.is_object()) fail(path.empty() ? "(root)" : path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) {
        fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
      }
    }
  }

  double real(const json& obj, const std::string& key, const std::string& path, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const json& obj, const std::string& key, const std::string& path,
                       std::int64_t fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const json& obj, const std::string& key, const std::string& path,
                                 std::uint64_t fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(path, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& obj, const std::string& key, const std::string& path, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  fs::path file(const json& obj, const std::string& key, const std::string& path) const {
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(path, "expected a path string");
    fs::path p = v.get<std::string>();
    return p.is_absolute() ? p : base_ / p;
  }

  int positive_int(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) fail(path, "missing");
    const auto v = integer(obj, key, path, 0);
    if (v <= 0 || v > 100000) fail(path, "must be a positive integer");
    return static_cast<int>(v);
  }

  RunSetup read(const json& root) const {
    only_keys(root, "",
              {"window_len", "horizon", "max_wait", "max_detour", "max_bundle", "fleet", "fleet_file",
               "network", "partition", "demand", "pricing_file", "vfa", "weights", "matcher", "seed",
               "fairness_enabled"});
    RunSetup s;
    SimConfig& c = s.config;
    c.window_len = real(root, "window_len", "window_len", c.window_len);
    c.horizon = real(root, "horizon", "horizon", c.horizon);
    c.max_wait = real(root, "max_wait", "max_wait", c.max_wait);
    c.max_detour = real(root, "max_detour", "max_detour", c.max_detour);
    c.max_bundle = unsigned_integer(root, "max_bundle", "max_bundle", c.max_bundle);
    c.seed = unsigned_integer(root, "seed", "seed", c.seed);
    c.fairness_enabled = boolean(root, "fairness_enabled", "fairness_enabled", true);

    if (root.contains("weights")) {
      const auto& w = root.at("weights");
      only_keys(w, "weights", {"beta", "delta", "passenger_plus", "driver_plus"});
      c.weights.beta = real(w, "beta", "weights.beta", 0);
      c.weights.delta = real(w, "delta", "weights.delta", 0);
      c.weights.passenger_plus = boolean(w, "passenger_plus", "weights.passenger_plus", false);
      c.weights.driver_plus = boolean(w, "driver_plus", "weights.driver_plus", false);
      if (!(c.weights.beta >= 0) || !std::isfinite(c.weights.beta)) {
        fail("weights.beta", "must be a nonnegative finite number");
      }
      if (!(c.weights.delta >= 0) || !std::isfinite(c.weights.delta)) {
        fail("weights.delta", "must be a nonnegative finite number");
      }
    }

    if (root.contains("matcher")) {
      const auto& m = root.at("matcher");
      if (m == "ilp") {
        c.matcher = MatcherKind::ilp;
      } else if (m == "async_greedy") {
        c.matcher = MatcherKind::async_greedy;
      } else {
        fail("matcher", "expected \"ilp\" or \"async_greedy\"");
      }
    }

    try {
      c.validate();
    } catch (const ConfigError& e) {
      fail("(root)", e.what());
    }

    read_network(root, s);
    read_fleet(root, s);
    read_demand(root, s);
    read_vfa(root, s);
    return s;
  }

  void read_network(const json& root, RunSetup& s) const {
    if (!root.contains("network")) fail("network", "missing");
    const auto& n = root.at("network");
    only_keys(n, "network", {"grid", "file"});
    int rows = 0;
    int cols = 0;
    if (n.contains("grid") == n.contains("file")) fail("network", "needs exactly one of grid or file");
    if (n.contains("grid")) {
      const auto& g = n.at("grid");
      only_keys(g, "network.grid", {"rows", "cols", "edge_cost"});
      rows = positive_int(g, "rows", "network.grid.rows");
      cols = positive_int(g, "cols", "network.grid.cols");
      const double cost = real(g, "edge_cost", "network.grid.edge_cost", 60);
      if (!(cost > 0) || !std::isfinite(cost)) fail("network.grid.edge_cost", "must be positive");
      s.net = make_grid(rows, cols, cost);
    } else {
      s.net = load_network(file(n, "file", "network.file"));
    }

    if (!root.contains("partition")) {
      s.partition = make_single_area(s.net);
      return;
    }
    const auto& p = root.at("partition");
    only_keys(p, "partition", {"grid", "file", "single"});
    if (p.contains("file")) {
      s.partition = load_partition(file(p, "file", "partition.file"), s.net);
    } else if (p.contains("grid")) {
      if (rows == 0) fail("partition.grid", "requires a grid network");
      const auto& g = p.at("grid");
      only_keys(g, "partition.grid", {"rows_per_area", "cols_per_area"});
      s.partition = make_grid_partition(rows, cols, positive_int(g, "rows_per_area", "partition.grid.rows_per_area"),
                                        positive_int(g, "cols_per_area", "partition.grid.cols_per_area"));
    } else {
      s.partition = make_single_area(s.net);
    }
  }

  void read_fleet(const json& root, RunSetup& s) const {
    SimConfig& c = s.config;
    if (root.contains("fleet_file")) {
      if (root.contains("fleet")) fail("fleet", "give either fleet or fleet_file");
      s.fleet = load_fleet(file(root, "fleet_file", "fleet_file"), s.net);
      c.fleet_size = s.fleet.size();
      return;
    }
    if (!root.contains("fleet")) fail("fleet", "missing");
    const auto& f = root.at("fleet");
    only_keys(f, "fleet", {"size", "capacity"});
    c.fleet_size = unsigned_integer(f, "size", "fleet.size", 0);
    const auto cap = integer(f, "capacity", "fleet.capacity", c.capacity);
    if (cap <= 0 || cap > 64) fail("fleet.capacity", "must be a positive integer");
    c.capacity = static_cast<int>(cap);
    s.fleet = make_fleet(c, s.net);
  }

  void read_demand(const json& root, RunSetup& s) const {
    if (!root.contains("demand")) fail("demand", "missing");
    const auto& d = root.at("demand");
    only_keys(d, "demand", {"file", "synthetic"});
    if (d.contains("file") == d.contains("synthetic")) fail("demand", "needs exactly one of file or synthetic");
    if (d.contains("file")) {
      s.requests = load_requests(file(d, "file", "demand.file"), s.net, s.partition);
    } else {
      const auto& syn = d.at("synthetic");
      only_keys(syn, "demand.synthetic", {"rates", "step", "seed"});
      DemandProfile prof;
      prof.horizon = s.config.horizon;
      prof.step = real(syn, "step", "demand.synthetic.step", prof.step);
      prof.seed = unsigned_integer(syn, "seed", "demand.synthetic.seed", s.config.seed);
      if (!(prof.step > 0)) fail("demand.synthetic.step", "must be positive");
      if (!syn.contains("rates") || !syn.at("rates").is_array()) {
        fail("demand.synthetic.rates", "expected an array");
      }
      for (const auto& r : syn.at("rates")) {
        if (!r.is_number() || !(r.get<double>() >= 0) || !std::isfinite(r.get<double>())) {
          fail("demand.synthetic.rates", "rates must be nonnegative numbers");
        }
        prof.rates.push_back(r.get<double>());
      }
      if (prof.rates.size() != s.partition.num_groups()) {
        fail("demand.synthetic.rates", "expected " + std::to_string(s.partition.num_groups()) +
                                           " rates (one per origin/destination group)");
      }
      try {
        s.requests = synth_requests(prof, s.net, s.partition);
      } catch (const ConfigError& e) {
        fail("demand.synthetic.rates", e.what());
      }
    }
    if (root.contains("pricing_file")) apply_pricing(s.requests, file(root, "pricing_file", "pricing_file"));
  }

  void read_vfa(const json& root, RunSetup& s) const {
    if (!root.contains("vfa")) return;
    const auto& v = root.at("vfa");
    only_keys(v, "vfa", {"kind", "omega", "file", "bucket_seconds"});
    const std::string kind = v.value("kind", "zero");
    if (kind == "zero") {
      s.config.vfa = ValueFunction::zero();
    } else if (kind == "delay") {
      const double omega = real(v, "omega", "vfa.omega", 1e-4);
      if (!(omega >= 0) || !std::isfinite(omega)) fail("vfa.omega", "must be nonnegative");
      s.config.vfa = ValueFunction::delay(omega);
    } else if (kind == "table") {
      if (!v.contains("file")) fail("vfa.file", "missing for a table value function");
      const double bucket = real(v, "bucket_seconds", "vfa.bucket_seconds", 3600);
      if (!(bucket > 0)) fail("vfa.bucket_seconds", "must be positive");
      s.config.vfa = load_value_table(file(v, "file", "vfa.file"), bucket);
    } else {
      fail("vfa.kind", "expected zero, delay or table");
    }
  }

 private:
  std::string_view text_;
  fs::path base_;
  std::string name_;
};

json report_json(const EquityReport& r) {
  json j{{"f_gini", r.f_gini}, {"min", r.min_value}, {"variance", r.variance}};
  if (r.overall_service_rate) j["overall_service_rate"] = *r.overall_service_rate;
  return j;
}

}  // namespace

RunSetup parse_manifest(std::string_view text, const fs::path& base_dir, const std::string& name) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(name, line_at(text, e.byte == 0 ? 0 : e.byte - 1),
                     "invalid JSON: " + std::string(e.what()));
  }
  return Reader(text, base_dir, name).read(root);
}

RunSetup load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path(), path.string());
}

std::string result_to_json(const RunResult& result) {
  json j{{"total_requests", result.total_requests},
         {"total_served", result.total_served},
         {"service_rate", result.service_rate()},
         {"windows", result.log.size()},
         {"passenger", report_json(result.passenger)},
         {"driver", report_json(result.driver)},
         {"driver_income", result.driver_income}};
  return j.dump(2) + "\n";
}

}  // namespace sifair
