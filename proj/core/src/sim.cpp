#include "sifair/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "sifair/error.hpp"

namespace sifair {

void SimConfig::validate() const {
  auto positive = [](Seconds s) { return s > 0 && std::isfinite(s); };
  if (!positive(window_len)) throw ConfigError("window_len must be positive");
  if (!positive(horizon)) throw ConfigError("horizon must be positive");
  if (!positive(max_wait)) throw ConfigError("max_wait must be positive");
  if (!(max_detour >= 0) || !std::isfinite(max_detour)) {
    throw ConfigError("max_detour must be nonnegative");
  }
  const double windows = horizon / window_len;
  if (std::abs(windows - std::round(windows)) > 1e-9) {
    throw ConfigError("window_len must divide horizon");
  }
  if (capacity < 1) throw ConfigError("capacity must be positive");
  if (max_bundle < 1) throw ConfigError("max_bundle must be positive");
  weights.validate();
}

std::vector<VehicleState> make_fleet(const SimConfig& cfg, const StreetNetwork& net) {
  return random_fleet(cfg.fleet_size, cfg.capacity, net, cfg.seed);
}

Simulator::Simulator(SimConfig cfg, const StreetNetwork& net, const AreaPartition& partition,
                     std::vector<VehicleState> fleet)
    : cfg_(std::move(cfg)),
      net_(net),
      partition_(partition),
      fleet_(std::move(fleet)),
      hist_p_(partition.num_areas()),
      hist_d_(fleet_.size()) {
  cfg_.validate();
  for (std::size_t i = 0; i < fleet_.size(); ++i) {
    if (fleet_[i].income > 0) hist_d_.set_income(i, fleet_[i].income);
  }
}

double Simulator::score(std::size_t driver, const Action& a, Seconds now) const {
  const ScoringContext ctx{&partition_, now};
  const VehicleState& v = fleet_[driver];
  if (!cfg_.fairness_enabled) return base_score(v, a, cfg_.vfa, ctx);
  return total_score(driver, v, a, cfg_.vfa, hist_p_, hist_d_, cfg_.weights, ctx);
}

WindowOutcome Simulator::decide(std::span<const Request> batch, Seconds now) {
  WindowOutcome out;
  out.problem.batch.reserve(batch.size());
  for (const auto& r : batch) out.problem.batch.push_back(r.id);

  const FeasibilityLimits limits = cfg_.limits();
  out.actions.resize(fleet_.size());
  out.problem.vehicles.resize(fleet_.size());
  for (std::size_t i = 0; i < fleet_.size(); ++i) {
    auto actions = feasible_actions(fleet_[i], batch, now, limits, net_);
    std::vector<double> scores(actions.size());
    for (std::size_t a = 0; a < actions.size(); ++a) scores[a] = score(i, actions[a], now);
    // Candidates best-first.
    std::vector<std::size_t> order(actions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
    auto& cand = out.problem.vehicles[i];
    cand.vehicle_id = fleet_[i].id;
    cand.actions.reserve(actions.size());
    out.actions[i].reserve(actions.size());
    for (const auto a : order) {
      Candidate c;
      c.score = scores[a];
      c.requests.reserve(actions[a].requests.size());
      for (const auto& r : actions[a].requests) c.requests.push_back(r.id);
      cand.actions.push_back(std::move(c));
      out.actions[i].push_back(std::move(actions[a]));
    }
  }

  if (cfg_.matcher == MatcherKind::ilp) {
    out.matching = solve_ilp(out.problem);
  } else {
    const std::uint64_t seed = cfg_.seed ^ (0x9E3779B97F4A7C15ULL * (window_counter_ + 1));
    out.matching = async_greedy_match(out.problem, seed);
  }
  ++window_counter_;
  check_matching(out.problem, out.matching);

  out.served = served_requests(out.problem, out.matching);
  out.rewards.assign(fleet_.size(), 0.0);
  for (std::size_t i = 0; i < fleet_.size(); ++i) {
    const Action& chosen = out.actions[i][out.matching.chosen[i]];
    out.rewards[i] = immediate_reward(chosen);
  }
  hist_p_.update(batch, out.served);
  hist_d_.update(out.rewards);
  for (std::size_t i = 0; i < fleet_.size(); ++i) {
    fleet_[i].income += out.rewards[i];
    assign(fleet_[i], out.actions[i][out.matching.chosen[i]]);
  }
  return out;
}

void Simulator::drive(Seconds now, Seconds dt) {
  for (auto& v : fleet_) sifair::drive(v, now, dt, net_);
}

RunResult run_simulation(const SimConfig& cfg, const StreetNetwork& net,
                         const AreaPartition& partition, std::span<const Request> requests,
                         const std::vector<VehicleState>& fleet) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  if (partition.num_locations() != net.size()) {
    throw ConfigError("partition does not cover the network");
  }
  Simulator sim(cfg, net, partition, fleet);
  RunResult result;
  const auto windows = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.window_len));
  result.log.reserve(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    const Seconds start = static_cast<Seconds>(w) * cfg.window_len;
    const Seconds now = start + cfg.window_len;
    const auto b = batch(requests, start, cfg.window_len);
    auto outcome = sim.decide(b, now);
    if (cfg.record_matchings) {
      WindowMatching wm(fleet.size());
      for (std::size_t i = 0; i < fleet.size(); ++i) {
        wm[i] = outcome.problem.vehicles[i].actions[outcome.matching.chosen[i]].requests;
      }
      result.matchings.push_back(std::move(wm));
    }
    result.log.push_back(metrics_row(w, sim.passenger_history(), sim.driver_history()));
    sim.drive(now, cfg.window_len);
  }

  const MetricsRow last = metrics_row(windows, sim.passenger_history(), sim.driver_history());
  result.passenger = {last.passenger_f_gini, last.passenger_min, last.passenger_var,
                      last.overall_service_rate};
  result.driver = {last.driver_f_gini, last.driver_min_raw, last.driver_var, std::nullopt};
  result.total_requests = sim.passenger_history().total_requested();
  result.total_served = sim.passenger_history().total_served();
  result.driver_income = sim.driver_history().incomes();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<SweepRow> sweep(const SimConfig& cfg, const StreetNetwork& net,
                            const AreaPartition& partition, std::span<const Request> requests,
                            const std::vector<VehicleState>& fleet, std::vector<double> betas,
                            std::vector<double> deltas, std::vector<Variant> variants,
                            std::size_t jobs) {
  if (betas.empty() || deltas.empty() || variants.empty()) {
    throw ConfigError("sweep grids must be nonempty");
  }
  auto tidy = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  tidy(betas);
  tidy(deltas);
  tidy(variants);

  std::vector<SweepRow> rows;
  for (const double b : betas) {
    for (const double d : deltas) {
      for (const auto& var : variants) rows.push_back({b, d, var, {}});
    }
  }
  for (auto& row : rows) {
    SimConfig probe = cfg;
    probe.weights = {row.beta, row.delta, row.variant.passenger_plus, row.variant.driver_plus};
    probe.validate();
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      try {
        SimConfig run_cfg = cfg;
        run_cfg.weights = {rows[i].beta, rows[i].delta, rows[i].variant.passenger_plus,
                           rows[i].variant.driver_plus};
        rows[i].result = run_simulation(run_cfg, net, partition, requests, fleet);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, rows.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace sifair
