#include "sifair/matcher.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "sifair/error.hpp"

namespace sifair {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::size_t> canonical_order(const MatchProblem& p) {
  std::vector<std::size_t> order(p.vehicles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p.vehicles[a].vehicle_id < p.vehicles[b].vehicle_id;
  });
  return order;
}

// Candidates of every vehicle with request ids replaced by dense batch indices.
struct DenseProblem {
  std::vector<std::vector<std::vector<std::size_t>>> requests;
  std::size_t batch_size = 0;
};

DenseProblem densify(const MatchProblem& p) {
  std::unordered_map<RequestId, std::size_t> index;
  for (std::size_t i = 0; i < p.batch.size(); ++i) index.emplace(p.batch[i], i);
  DenseProblem d;
  d.batch_size = p.batch.size();
  d.requests.resize(p.vehicles.size());
  for (std::size_t k = 0; k < p.vehicles.size(); ++k) {
    for (const auto& a : p.vehicles[k].actions) {
      std::vector<std::size_t> ids;
      ids.reserve(a.requests.size());
      for (const auto r : a.requests) {
        const auto it = index.find(r);
        if (it == index.end()) {
          throw ContractError("action references request " + std::to_string(r) +
                              " outside the batch");
        }
        ids.push_back(it->second);
      }
      d.requests[k].push_back(std::move(ids));
    }
  }
  return d;
}

bool available(const std::vector<std::size_t>& ids, const std::vector<char>& claimed) {
  return std::none_of(ids.begin(), ids.end(), [&](std::size_t i) { return claimed[i] != 0; });
}

void set_claim(const std::vector<std::size_t>& ids, std::vector<char>& claimed, char value) {
  for (const auto i : ids) claimed[i] = value;
}

// Depth-first branch and bound over vehicles in canonical order, actions in
// index order. The first optimum reached is the lexicographically smallest,
// so a branch is cut as soon as it cannot strictly beat the incumbent.
//
// Two upper bounds on the remaining vehicles are combined:
//  - vehicle bound: each vehicle's best action among those still available;
//  - request bound: null scores plus, per unclaimed request, the largest gain
//    over null per served request of any available action covering it.
// The request bound stays tight when many vehicles compete for the same few
// requests, where the vehicle bound counts every request once per vehicle.
class BranchAndBound {
 public:
  BranchAndBound(const MatchProblem& p, DenseProblem d)
      : p_(p), d_(std::move(d)), order_(canonical_order(p)), claimed_(d_.batch_size, 0),
        gain_(d_.batch_size, 0.0) {
    current_.assign(p.vehicles.size(), 0);
    null_score_.resize(p.vehicles.size());
    for (std::size_t k = 0; k < p.vehicles.size(); ++k) {
      const auto& actions = p.vehicles[k].actions;
      const auto it = std::find_if(actions.begin(), actions.end(),
                                   [](const Candidate& a) { return a.requests.empty(); });
      null_score_[k] = it->score;
    }
  }

  Matching run() {
    best_total_ = kNegInf;
    visit(0, 0.0);
    Matching m;
    m.chosen = best_;
    m.total_score = best_total_;
    return m;
  }

 private:
  double upper_bound(std::size_t depth, double prefix) {
    std::fill(gain_.begin(), gain_.end(), 0.0);
    double by_vehicle = prefix;
    double nulls = prefix;
    for (std::size_t j = depth; j < order_.size(); ++j) {
      const std::size_t k = order_[j];
      const auto& actions = p_.vehicles[k].actions;
      double best = kNegInf;
      for (std::size_t a = 0; a < actions.size(); ++a) {
        const auto& ids = d_.requests[k][a];
        if (!available(ids, claimed_)) continue;
        best = std::max(best, actions[a].score);
        if (ids.empty()) continue;
        const double per_request =
            (actions[a].score - null_score_[k]) / static_cast<double>(ids.size());
        for (const auto i : ids) gain_[i] = std::max(gain_[i], per_request);
      }
      by_vehicle += best;
      nulls += null_score_[k];
    }
    double by_request = nulls;
    for (std::size_t i = 0; i < gain_.size(); ++i) {
      if (!claimed_[i]) by_request += gain_[i];
    }
    return std::min(by_vehicle, by_request);
  }

  void visit(std::size_t depth, double prefix) {
    if (depth == order_.size()) {
      if (prefix > best_total_) {
        best_total_ = prefix;
        best_ = current_;
      }
      return;
    }
    if (best_total_ != kNegInf && upper_bound(depth, prefix) <= best_total_) return;
    const std::size_t k = order_[depth];
    const auto& actions = p_.vehicles[k].actions;
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const auto& ids = d_.requests[k][a];
      if (!available(ids, claimed_)) continue;
      set_claim(ids, claimed_, 1);
      current_[k] = a;
      visit(depth + 1, prefix + actions[a].score);
      set_claim(ids, claimed_, 0);
    }
  }

  const MatchProblem& p_;
  DenseProblem d_;
  std::vector<std::size_t> order_;
  std::vector<char> claimed_;
  std::vector<double> gain_;
  std::vector<double> null_score_;
  std::vector<std::size_t> current_;
  std::vector<std::size_t> best_;
  double best_total_ = kNegInf;
};

}  // namespace

void MatchProblem::validate() const {
  std::set<RequestId> in_batch(batch.begin(), batch.end());
  if (in_batch.size() != batch.size()) throw ContractError("batch repeats a request id");
  std::set<std::int64_t> ids;
  for (const auto& v : vehicles) {
    if (!ids.insert(v.vehicle_id).second) {
      throw ContractError("vehicle id " + std::to_string(v.vehicle_id) + " repeats");
    }
    bool has_null = false;
    for (const auto& a : v.actions) {
      has_null = has_null || a.requests.empty();
      std::set<RequestId> seen;
      for (const auto r : a.requests) {
        if (!in_batch.count(r)) {
          throw ContractError("action references request " + std::to_string(r) +
                              " outside the batch");
        }
        if (!seen.insert(r).second) throw ContractError("action repeats a request");
      }
    }
    if (!has_null) {
      throw ContractError("vehicle " + std::to_string(v.vehicle_id) + " has no null action");
    }
  }
}

double canonical_total(const MatchProblem& p, std::span<const std::size_t> chosen) {
  double total = 0;
  for (const auto k : canonical_order(p)) total += p.vehicles[k].actions[chosen[k]].score;
  return total;
}

Matching solve_ilp(const MatchProblem& p) {
  p.validate();
  if (p.vehicles.empty()) return {};
  BranchAndBound bb(p, densify(p));
  return bb.run();
}

Matching brute_force_match(const MatchProblem& p, std::uint64_t limit) {
  p.validate();
  std::uint64_t product = 1;
  for (const auto& v : p.vehicles) {
    const auto n = static_cast<std::uint64_t>(v.actions.size());
    if (product > limit / std::max<std::uint64_t>(n, 1)) {
      throw InputError("brute_force_match: instance too large");
    }
    product *= n;
  }
  if (p.vehicles.empty()) return {};

  const auto d = densify(p);
  const auto order = canonical_order(p);
  std::vector<std::size_t> choice(p.vehicles.size(), 0);
  std::vector<std::size_t> best;
  double best_total = kNegInf;
  std::vector<int> uses(d.batch_size, 0);
  // Odometer over choice vectors with the first vehicle (canonical order) as
  // the most significant digit, i.e. lexicographic order.
  while (true) {
    std::fill(uses.begin(), uses.end(), 0);
    bool ok = true;
    double total = 0;
    for (const auto k : order) {
      for (const auto i : d.requests[k][choice[k]]) ok = ok && ++uses[i] == 1;
      total += p.vehicles[k].actions[choice[k]].score;
    }
    if (ok && total > best_total) {
      best_total = total;
      best = choice;
    }
    std::size_t pos = order.size();
    while (pos > 0) {
      const auto k = order[pos - 1];
      if (++choice[k] < p.vehicles[k].actions.size()) break;
      choice[k] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return {best, best_total};
}

Matching greedy_match_in_order(const MatchProblem& p, std::span<const std::size_t> order) {
  p.validate();
  const auto d = densify(p);
  std::vector<char> claimed(d.batch_size, 0);
  Matching m;
  m.chosen.assign(p.vehicles.size(), 0);
  std::vector<char> done(p.vehicles.size(), 0);
  auto pick = [&](std::size_t k) {
    const auto& actions = p.vehicles[k].actions;
    std::size_t best = actions.size();
    for (std::size_t a = 0; a < actions.size(); ++a) {
      if (!available(d.requests[k][a], claimed)) continue;
      if (best == actions.size() || actions[a].score > actions[best].score) best = a;
    }
    m.chosen[k] = best;
    set_claim(d.requests[k][best], claimed, 1);
    done[k] = 1;
  };
  for (const auto k : order) {
    if (k >= p.vehicles.size() || done[k]) throw ContractError("invalid greedy vehicle order");
    pick(k);
  }
  for (std::size_t k = 0; k < p.vehicles.size(); ++k) {
    if (!done[k]) pick(k);
  }
  m.total_score = canonical_total(p, m.chosen);
  return m;
}

Matching async_greedy_match(const MatchProblem& p, std::uint64_t seed) {
  std::vector<std::size_t> order = canonical_order(p);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return greedy_match_in_order(p, order);
}

void check_matching(const MatchProblem& p, const Matching& m) {
  if (m.chosen.size() != p.vehicles.size()) {
    throw ContractError("matching must choose exactly one action per vehicle");
  }
  std::set<RequestId> served;
  for (std::size_t k = 0; k < p.vehicles.size(); ++k) {
    if (m.chosen[k] >= p.vehicles[k].actions.size()) {
      throw ContractError("matching chooses a nonexistent action");
    }
    for (const auto r : p.vehicles[k].actions[m.chosen[k]].requests) {
      if (!served.insert(r).second) {
        throw ContractError("request " + std::to_string(r) + " served by two vehicles");
      }
    }
  }
  if (canonical_total(p, m.chosen) != m.total_score) {
    throw ContractError("matching total does not equal the sum of chosen scores");
  }
}

std::vector<RequestId> served_requests(const MatchProblem& p, const Matching& m) {
  std::vector<RequestId> out;
  for (std::size_t k = 0; k < p.vehicles.size(); ++k) {
    const auto& reqs = p.vehicles[k].actions[m.chosen[k]].requests;
    out.insert(out.end(), reqs.begin(), reqs.end());
  }
  return out;
}

namespace {

nlohmann::json problem_json(const MatchProblem& p) {
  nlohmann::json doc;
  doc["batch"] = p.batch;
  doc["vehicles"] = nlohmann::json::array();
  for (const auto& v : p.vehicles) {
    nlohmann::json jv;
    jv["id"] = v.vehicle_id;
    jv["actions"] = nlohmann::json::array();
    for (const auto& a : v.actions) {
      jv["actions"].push_back({{"requests", a.requests}, {"score", a.score}});
    }
    doc["vehicles"].push_back(std::move(jv));
  }
  return doc;
}

}  // namespace

std::string to_json(const MatchProblem& p) { return problem_json(p).dump(2); }

std::string to_json(const MatchProblem& p, const Matching& m) {
  auto doc = problem_json(p);
  doc["matching"] = {{"chosen", m.chosen}, {"total_score", m.total_score}};
  return doc.dump(2);
}

MatchProblem match_problem_from_json(std::string_view text) {
  MatchProblem p;
  try {
    const auto doc = nlohmann::json::parse(text);
    p.batch = doc.at("batch").get<std::vector<RequestId>>();
    for (const auto& jv : doc.at("vehicles")) {
      VehicleCandidates v;
      v.vehicle_id = jv.at("id").get<std::int64_t>();
      for (const auto& ja : jv.at("actions")) {
        v.actions.push_back(
            {ja.at("requests").get<std::vector<RequestId>>(), ja.at("score").get<double>()});
      }
      p.vehicles.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed match problem document: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace sifair
