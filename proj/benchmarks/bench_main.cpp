#include <benchmark/benchmark.h>

#include <random>
#include <set>

#include "sifair/sim.hpp"

using namespace sifair;

namespace {

MatchProblem dense_problem(std::size_t vehicles, std::size_t requests, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 3);
  MatchProblem p;
  for (std::size_t r = 0; r < requests; ++r) p.batch.push_back(static_cast<RequestId>(r));
  for (std::size_t v = 0; v < vehicles; ++v) {
    VehicleCandidates vc{static_cast<std::int64_t>(v), {{{}, 0}}};
    std::set<std::vector<RequestId>> seen;
    for (int a = 0; a < 8; ++a) {
      std::vector<RequestId> rs{static_cast<RequestId>(rng() % requests)};
      if (rng() % 2) {
        const auto other = static_cast<RequestId>(rng() % requests);
        if (other != rs[0]) rs.push_back(other);
      }
      std::sort(rs.begin(), rs.end());
      if (seen.insert(rs).second) vc.actions.push_back({rs, u(rng)});
    }
    std::sort(vc.actions.begin() + 1, vc.actions.end(),
              [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    p.vehicles.push_back(vc);
  }
  return p;
}

struct Desk {
  StreetNetwork net = make_grid(6, 6, 120);
  AreaPartition part = make_grid_partition(6, 6, 3, 3);
  SimConfig cfg;
  std::vector<Request> requests;
  std::vector<VehicleState> fleet;

  Desk() {
    cfg.fleet_size = 20;
    cfg.vfa = ValueFunction::delay(1e-4);
    cfg.seed = 1;
    DemandProfile prof;
    for (std::size_t g = 0; g < part.num_groups(); ++g) {
      const auto grp = part.group_at(g);
      prof.rates.push_back(grp.origin <= 1 && grp.dest <= 1 ? 0.496 : 0.124);
    }
    prof.seed = 1;
    requests = synth_requests(prof, net, part);
    fleet = make_fleet(cfg, net);
  }
};

}  // namespace

static void BM_SolveIlp(benchmark::State& state) {
  const auto p = dense_problem(static_cast<std::size_t>(state.range(0)),
                               static_cast<std::size_t>(state.range(1)), 42);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ilp(p));
}
BENCHMARK(BM_SolveIlp)->Args({5, 6})->Args({10, 8})->Args({20, 10});

static void BM_AsyncGreedy(benchmark::State& state) {
  const auto p = dense_problem(20, 10, 42);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(async_greedy_match(p, seed++));
}
BENCHMARK(BM_AsyncGreedy);

static void BM_FeasibleActions(benchmark::State& state) {
  const auto net = make_grid(6, 6, 120);
  const auto part = make_single_area(net);
  std::mt19937_64 rng(3);
  std::vector<Request> b;
  for (RequestId id = 0; id < state.range(0); ++id) {
    Request r;
    r.id = id;
    r.pickup = static_cast<LocationId>(rng() % 36);
    r.dropoff = static_cast<LocationId>((r.pickup + 1 + rng() % 35) % 36);
    r.group = group_of(part, r.pickup, r.dropoff);
    b.push_back(r);
  }
  VehicleState v;
  v.location = 14;
  v.capacity = 2;
  for (auto _ : state) benchmark::DoNotOptimize(feasible_actions(v, b, 0, {300, 2, 300}, net));
}
BENCHMARK(BM_FeasibleActions)->Arg(4)->Arg(8)->Arg(16);

static void BM_DeskRun(benchmark::State& state) {
  const Desk d;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_simulation(d.cfg, d.net, d.part, d.requests, d.fleet));
  }
}
BENCHMARK(BM_DeskRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
