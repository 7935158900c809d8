#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ideq/strategy.hpp"

namespace ideq {

/// Exact expected payoffs E^sigma(phi_i | s), indexed [player][state].
struct PayoffVector {
  std::vector<std::vector<Rational>> values;

  const Rational& at(PlayerId i, StateId s) const { return values[i][s]; }
};

/// One-step successor distribution at s when player i plays action a and
/// everyone else follows the profile.
Distribution<StateId> action_outcome(const Game& game, const StationaryProfile& profile, PlayerId i,
                                     StateId s, ActionId a);

/// One-step successor distribution at s under the full profile.
Distribution<StateId> profile_outcome(const Game& game, const StationaryProfile& profile, StateId s);

/// A Markov chain over an arbitrary node space: one-step distribution per node
/// (finals self-loop). Shared by profile evaluation and turn-based solving.
struct MarkovChain {
  std::vector<Distribution<StateId>> step;
  std::vector<bool> final_node;
};

/// Nodes from which no final node is reachable in the support graph.
std::vector<bool> chain_zero_reach(const MarkovChain& chain);

/// Exact expected terminal rewards, one result row per reward function.
/// rewards[r][node] is read at final nodes only; zero-reach nodes get 0.
std::vector<std::vector<Rational>> chain_expected_terminal(const MarkovChain& chain,
                                                           const std::vector<std::vector<Rational>>& rewards);

/// States with P^sigma(reach finals | s) = 0, by backward reachability on the
/// support graph of the profile.
std::vector<StateId> zero_reach_states(const Game& game, const StationaryProfile& profile);

/// Exact solution of the Bellman system: value = nu at finals, 0 on the
/// zero-reach set, one-step expectation elsewhere.
PayoffVector evaluate_profile(const Game& game, const StationaryProfile& profile);

/// Expected reward restricted to runs absorbed in a final state within
/// `horizon` steps.
PayoffVector bounded_horizon_payoff(const Game& game, const StationaryProfile& profile, unsigned horizon);

struct McEstimate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95% normal interval
};

/// Seed-deterministic Monte-Carlo estimate of the expected payoffs from s0.
/// Runs truncated at `horizon` score 0. Per-sample counter-based seeding, so
/// any evaluation order gives identical results.
std::vector<McEstimate> monte_carlo_estimate(const Game& game, const StationaryProfile& profile, StateId s0,
                                             std::uint64_t samples, unsigned horizon, std::uint64_t seed);

/// Per-state menus of mixed actions the controlled player may pick from:
/// full-simplex vertices for Nash deviations, ball vertices for imprecise
/// ones, or the vertices of a Delta_epsilon-restricted simplex.
struct ConstrainedActionSet {
  std::vector<std::vector<Distribution<ActionId>>> menus;  // by state id, non-empty
};

ConstrainedActionSet simplex_actions(const Game& game, PlayerId i);
ConstrainedActionSet ball_actions(const Game& game, PlayerId i, const BallSpec& ball);
ConstrainedActionSet delta_restricted_actions(const Game& game, PlayerId i, const DeltaEpsilonSpec& spec);

enum class OptMode { Max, Min };

struct BestResponse {
  std::vector<Rational> value;  // player i's value, by state id
  StationaryStrategy witness;   // attains value at every state
};

inline constexpr std::size_t kPolicyEnumerationCap = std::size_t{1} << 16;

/// Optimal value of the one-controller decision process where player i picks
/// one menu vertex per state and the co-players follow the profile. Below the
/// enumeration cap this is exact over all vertex policies; above it, greedy
/// policy iteration from the first vertex in canonical order.
BestResponse constrained_best_response(const Game& game, const StationaryProfile& profile, PlayerId i,
                                       const ConstrainedActionSet& actions, OptMode mode);

std::string serialize_payoffs_json(const Game& game, const PayoffVector& payoffs);
std::string serialize_payoffs_csv(const Game& game, const PayoffVector& payoffs);

}  // namespace ideq
