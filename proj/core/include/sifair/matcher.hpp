#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sifair/demand.hpp"

namespace sifair {

struct Candidate {
  /// Request ids served by the action; empty for the null action.
  std::vector<RequestId> requests;
  double score = 0;
};

struct VehicleCandidates {
  std::int64_t vehicle_id = 0;
  std::vector<Candidate> actions;
};

/// One window's assignment problem: pick one candidate per vehicle so that no
/// request is served twice, maximising the total score.
struct MatchProblem {
  std::vector<RequestId> batch;
  std::vector<VehicleCandidates> vehicles;

  /// Throws ContractError if a vehicle lacks the null action, a request id is
  /// not in the batch, vehicle ids repeat, or an action repeats a request.
  void validate() const;
};

struct Matching {
  /// chosen[k] indexes vehicles[k].actions.
  std::vector<std::size_t> chosen;
  double total_score = 0;
};

/// Sum of chosen scores, accumulated in ascending vehicle-id order. Every
/// solver reports and compares totals computed this way.
double canonical_total(const MatchProblem& p, std::span<const std::size_t> chosen);

/// Exact maximiser. Among equal totals the lexicographically smallest choice
/// vector (vehicles by ascending id) wins.
Matching solve_ilp(const MatchProblem& p);

/// Exhaustive enumeration with the same objective and tie rule as solve_ilp.
/// Throws InputError when the product of candidate counts exceeds `limit`.
Matching brute_force_match(const MatchProblem& p, std::uint64_t limit = 10'000'000);

/// Vehicles in a seed-shuffled order each take their best action whose
/// requests are still unclaimed (lowest index on ties).
Matching async_greedy_match(const MatchProblem& p, std::uint64_t seed);

/// Greedy pass over vehicles in the given order (indices into p.vehicles).
Matching greedy_match_in_order(const MatchProblem& p, std::span<const std::size_t> order);

/// Throws ContractError unless every vehicle has one valid choice, no request
/// is served twice and total_score matches canonical_total.
void check_matching(const MatchProblem& p, const Matching& m);

/// Request ids served by the matching, in vehicle order.
std::vector<RequestId> served_requests(const MatchProblem& p, const Matching& m);

/// Debug dump: {"batch": [...], "vehicles": [{"id", "actions": [{"requests", "score"}]}]}.
std::string to_json(const MatchProblem& p);
MatchProblem match_problem_from_json(std::string_view text);
std::string to_json(const MatchProblem& p, const Matching& m);

}  // namespace sifair
