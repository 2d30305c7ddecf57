#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "sifair/manifest.hpp"
#include "sifair/theorems.hpp"
#include "testing.hpp"

using namespace sifair;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t = Clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%s; %.2fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), seconds_since(t));
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// 6x6 grid, 3x3-tile areas, 20 two-seat vehicles, one day of 60 s windows.
// Trips among areas 0 and 1 arrive four times as often as the rest.
struct DeskScenario {
  StreetNetwork net = make_grid(6, 6, 120);
  AreaPartition part = make_grid_partition(6, 6, 3, 3);
  SimConfig cfg;
  std::vector<Request> requests;
  std::vector<VehicleState> fleet;

  explicit DeskScenario(std::uint64_t seed) {
    cfg.fleet_size = 20;
    cfg.capacity = 2;
    cfg.vfa = ValueFunction::delay(1e-4);
    cfg.seed = seed;
    DemandProfile prof;
    const double w = 0.124;
    for (std::size_t g = 0; g < part.num_groups(); ++g) {
      const auto grp = part.group_at(g);
      prof.rates.push_back(grp.origin <= 1 && grp.dest <= 1 ? 4 * w : w);
    }
    prof.horizon = cfg.horizon;
    prof.seed = seed;
    requests = synth_requests(prof, net, part);
    fleet = make_fleet(cfg, net);
  }
};

MatchProblem random_problem(std::mt19937_64& rng) {
  MatchProblem p;
  const std::size_t nreq = rng() % 7;
  for (std::size_t r = 0; r < nreq; ++r) p.batch.push_back(static_cast<RequestId>(r));
  const std::size_t nveh = 1 + rng() % 5;
  std::uniform_real_distribution<double> u(0, 3);
  for (std::size_t v = 0; v < nveh; ++v) {
    VehicleCandidates vc;
    vc.vehicle_id = static_cast<std::int64_t>(v);
    vc.actions.push_back({{}, u(rng)});
    std::set<std::vector<RequestId>> seen;
    for (std::size_t a = 0; a < 6 && nreq > 0; ++a) {
      std::vector<RequestId> rs{p.batch[rng() % nreq]};
      if (rng() % 2 && nreq > 1) {
        const auto other = p.batch[rng() % nreq];
        if (other != rs[0]) rs.push_back(other);
      }
      std::sort(rs.begin(), rs.end());
      if (seen.insert(rs).second) vc.actions.push_back({rs, u(rng)});
    }
    p.vehicles.push_back(vc);
  }
  return p;
}

Outcome ilp_oracle() {
  std::mt19937_64 rng(500);
  const auto t = Clock::now();
  int equal = 0;
  for (int i = 0; i < 500; ++i) {
    const auto p = random_problem(rng);
    if (solve_ilp(p).total_score == brute_force_match(p).total_score) ++equal;
  }
  const double s = seconds_since(t);
  return {equal == 500 && s < 10, std::to_string(equal) + "/500 exact, " + fmt(s) + "s"};
}

Outcome zero_weight_reduction() {
  std::mt19937_64 rng(20);
  int identical = 0;
  for (int i = 0; i < 20; ++i) {
    const int rows = 3 + static_cast<int>(rng() % 4);
    const int cols = 3 + static_cast<int>(rng() % 4);
    const auto net = make_grid(rows, cols, static_cast<Seconds>(30 + rng() % 90));
    const auto part = make_grid_partition(rows, cols, 2, 2);
    SimConfig cfg;
    cfg.horizon = 3600;
    cfg.fleet_size = 2 + rng() % 8;
    cfg.capacity = 1 + static_cast<int>(rng() % 3);
    cfg.max_bundle = 1 + rng() % 2;
    cfg.seed = rng();
    cfg.vfa = rng() % 2 ? ValueFunction::delay(1e-3) : ValueFunction::zero();
    cfg.matcher = rng() % 4 == 0 ? MatcherKind::async_greedy : MatcherKind::ilp;
    cfg.weights = {0, 0, static_cast<bool>(rng() % 2), static_cast<bool>(rng() % 2)};
    cfg.record_matchings = true;
    DemandProfile prof;
    std::uniform_real_distribution<double> u(0, 0.4);
    for (std::size_t g = 0; g < part.num_groups(); ++g) {
      const auto grp = part.group_at(g);
      const bool possible = grp.origin != grp.dest || part.locations_in(grp.origin).size() > 1;
      prof.rates.push_back(possible ? u(rng) : 0.0);
    }
    prof.horizon = cfg.horizon;
    prof.seed = cfg.seed;
    const auto reqs = synth_requests(prof, net, part);
    const auto fleet = make_fleet(cfg, net);
    SimConfig off = cfg;
    off.fairness_enabled = false;
    const auto a = run_simulation(cfg, net, part, reqs, fleet);
    const auto b = run_simulation(off, net, part, reqs, fleet);
    if (a.matchings == b.matchings && a.service_rate() == b.service_rate()) ++identical;
  }
  return {identical == 20, std::to_string(identical) + "/20 configs identical"};
}

Outcome theorem(bool passenger) {
  const auto t = Clock::now();
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = passenger ? check_passenger_theorem(seed, kWeightLadder)
                             : check_driver_theorem(seed, kWeightLadder);
    if (r.precondition_holds && r.improved) ++ok;
  }
  const double s = seconds_since(t);
  return {ok == 50 && s < 30, std::to_string(ok) + "/50 seeds, " + fmt(s) + "s"};
}

struct TrendPoint {
  double sr = 0;
  double p_gini = 0;
  double p_min = 0;
  double d_gini = 0;
};

struct Trend {
  // key: (side, plus, weight); side 0 = beta sweep, 1 = delta sweep.
  std::map<std::tuple<int, bool, double>, TrendPoint> mean;
  double seconds = 0;
};

const std::vector<double> kGrid{0, 0.5, 1, 2, 5, 10, 20};
constexpr int kSeeds = 5;

const Trend& trend() {
  static const Trend cached = [] {
    Trend t;
    const auto start = Clock::now();
    for (int seed = 1; seed <= kSeeds; ++seed) {
      const DeskScenario s(static_cast<std::uint64_t>(seed));
      const auto by_beta = sweep(s.cfg, s.net, s.part, s.requests, s.fleet, kGrid, {0},
                                 {{false, false}, {true, false}});
      const auto by_delta = sweep(s.cfg, s.net, s.part, s.requests, s.fleet, {0}, kGrid,
                                  {{false, false}, {false, true}});
      auto add = [&](int side, bool plus, double w, const RunResult& r) {
        auto& p = t.mean[{side, plus, w}];
        p.sr += r.service_rate() / kSeeds;
        p.p_gini += r.passenger.f_gini / kSeeds;
        p.p_min += r.passenger.min_value / kSeeds;
        p.d_gini += r.driver.f_gini / kSeeds;
      };
      for (const auto& row : by_beta) add(0, row.variant.passenger_plus, row.beta, row.result);
      for (const auto& row : by_delta) add(1, row.variant.driver_plus, row.delta, row.result);
    }
    t.seconds = seconds_since(start);
    return t;
  }();
  return cached;
}

Outcome fairness_trend() {
  const auto& t = trend();
  const auto& base = t.mean.at({0, false, 0.0});
  const auto& sip20 = t.mean.at({0, true, 20.0});
  const auto& sid20 = t.mean.at({1, true, 20.0});
  const bool a = sip20.p_gini >= base.p_gini && sip20.p_min >= base.p_min;
  const bool b = sid20.d_gini >= base.d_gini;
  std::string frontier = "none";
  for (const auto& [key, p] : t.mean) {
    const auto [side, plus, w] = key;
    if (w == 0 || p.sr < 0.95 * base.sr) continue;
    const bool better = side == 0 ? p.p_gini > base.p_gini : p.d_gini > base.d_gini;
    if (better && frontier == "none") {
      frontier = std::string(side == 0 ? "beta=" : "delta=") + fmt(w) + (plus ? "(+)" : "") +
                 " sr=" + fmt(p.sr);
    }
  }
  const bool c = frontier != "none";
  std::ostringstream d;
  d << "base sr=" << fmt(base.sr) << " pF=" << fmt(base.p_gini) << " pmin=" << fmt(base.p_min)
    << " dF=" << fmt(base.d_gini) << "; SIP(+)20 pF=" << fmt(sip20.p_gini) << " pmin=" << fmt(sip20.p_min)
    << "; SID(+)20 dF=" << fmt(sid20.d_gini) << "; frontier " << frontier << "; sweep " << fmt(t.seconds)
    << "s";
  return {a && b && c && t.seconds < 300, d.str()};
}

Outcome plus_dominance() {
  const auto& t = trend();
  std::ostringstream d;
  int ok = 0;
  int total = 0;
  for (int side = 0; side < 2; ++side) {
    for (const double w : kGrid) {
      if (w == 0) continue;
      const double plain = t.mean.at({side, false, w}).sr;
      const double plus = t.mean.at({side, true, w}).sr;
      ++total;
      if (plus >= plain) {
        ++ok;
      } else {
        d << (side == 0 ? " SIP" : " SID") << " w=" << fmt(w) << " plain=" << fmt(plain)
          << " plus=" << fmt(plus);
      }
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " matched weights" +
                           (ok == total ? "" : "; violations:" + d.str())};
}

Outcome gini_units() {
  bool ok = std::abs(gini(std::vector<double>{0, 1}) - 0.5) <= 1e-12;
  for (std::size_t n = 1; n <= 100; ++n) {
    std::vector<double> v(n, 0.0);
    v.back() = 1;
    ok = ok && std::abs(gini(v) - static_cast<double>(n - 1) / static_cast<double>(n)) <= 1e-12;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 100);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(2 + rng() % 50);
    for (auto& x : v) x = u(rng);
    const double c = 1e-3 + u(rng);
    std::vector<double> s = v;
    for (auto& x : s) x *= c;
    worst = std::max(worst, std::abs(gini(s) - gini(v)));
  }
  ok = ok && worst <= 1e-12;
  return {ok, "max scale deviation " + std::to_string(worst)};
}

Outcome determinism() {
  sifair::testing::TempDir dir("accept");
  const std::string manifest = std::string(SIFAIR_CONFIG_DIR) + "/grid6x6.json";
  std::ostringstream sink;
  const auto a = (dir.path() / "a").string();
  const auto b = (dir.path() / "b").string();
  const int ca = cli::run_main({"run", "--manifest", manifest, "--out", a}, sink, sink);
  const int cb = cli::run_main({"run", "--manifest", manifest, "--out", b}, sink, sink);
  const auto ma = sifair::testing::slurp(std::filesystem::path(a) / "metrics.csv");
  const auto mb = sifair::testing::slurp(std::filesystem::path(b) / "metrics.csv");
  const bool same = ca == 0 && cb == 0 && !ma.empty() && ma == mb;
  return {same, std::to_string(ma.size()) + " bytes, " + (same ? "identical" : "differ")};
}

Outcome performance() {
  const DeskScenario s(1);
  const auto t = Clock::now();
  const auto r = run_simulation(s.cfg, s.net, s.part, s.requests, s.fleet);
  const double sec = seconds_since(t);
  return {sec < 60 && r.log.size() == 1440,
          std::to_string(r.log.size()) + " windows, " + std::to_string(r.total_requests) + " requests, " +
              fmt(sec) + "s"};
}

}  // namespace

int main() {
  report(1, "exact matcher equals brute force on 500 random problems", ilp_oracle);
  report(2, "zero weights reproduce the incentive-free matchings", zero_weight_reduction);
  report(3, "passenger improvement on 50 worst-group instances", [] { return theorem(true); });
  report(4, "driver improvement on 50 worst-driver instances (clipped)", [] { return theorem(false); });
  report(5, "fairness-efficiency trend on the 6x6 desk scenario", fairness_trend);
  report(6, "clipped variants keep at least the plain service rate", plus_dominance);
  report(7, "gini unit values and scale invariance", gini_units);
  report(8, "identical runs give byte-identical metrics", determinism);
  report(9, "desk scenario single run under 60 s", performance);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
