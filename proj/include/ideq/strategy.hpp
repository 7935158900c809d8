#pragma once

#include <tuple>
#include <vector>

#include "ideq/game.hpp"

namespace ideq {

/// Per-state distribution over the player's allowed actions, defined on every
/// state (choices at final states are payoff-irrelevant but kept for
/// uniformity).
struct StationaryStrategy {
  PlayerId player = -1;
  std::vector<Distribution<ActionId>> choice;  // by state id

  bool is_pure() const {
    for (const auto& d : choice)
      if (!d.is_dirac()) return false;
    return true;
  }
  bool operator==(const StationaryStrategy& o) const { return player == o.player && choice == o.choice; }
};

struct StationaryProfile {
  std::vector<StationaryStrategy> strategies;  // by player id

  StationaryProfile with(PlayerId i, StationaryStrategy replacement) const {
    StationaryProfile out = *this;
    out.strategies[i] = std::move(replacement);
    return out;
  }
  bool operator==(const StationaryProfile& o) const { return strategies == o.strategies; }
};

/// Lower-bound constraints sigma_i(s)(a) >= epsilon collected from the exit
/// actions of all strong components.
struct DeltaEpsilonSpec {
  Rational epsilon;
  std::vector<std::tuple<PlayerId, StateId, ActionId>> constraints;  // sorted, unique
};

struct BallSpec {
  StationaryStrategy center;
  Rational radius;
};

/// Checks support and arity against the game's allow sets; throws SemanticError.
void validate_strategy(const Game& game, const StationaryStrategy& strategy);
void validate_profile(const Game& game, const StationaryProfile& profile);

StationaryStrategy uniform_strategy(const Game& game, PlayerId i);
StationaryProfile uniform_profile(const Game& game);
StationaryStrategy dirac_strategy(const Game& game, PlayerId i, const std::vector<ActionId>& action_by_state);

/// Supremum distance, which for stationary strategies is the max over states
/// of the L-infinity distance between the two action distributions.
Rational distance(const StationaryStrategy& a, const StationaryStrategy& b);

bool in_ball(const StationaryStrategy& candidate, const BallSpec& ball);

bool in_delta_epsilon(const StationaryProfile& profile, const DeltaEpsilonSpec& spec);

/// Per-state Euclidean projection of each player's distribution onto
/// {delta in simplex over allow(s,i) : delta(a) >= epsilon for constrained a}.
/// Throws SemanticError if some state's constraints are infeasible.
StationaryProfile project_to_delta_epsilon(const Game& game, const StationaryProfile& profile,
                                           const DeltaEpsilonSpec& spec);

/// All Dirac strategies of player i, varying only at non-final states (final
/// states are fixed to the first allowed action). Canonical mixed-radix order.
std::vector<StationaryStrategy> enumerate_pure_memoryless(const Game& game, PlayerId i);

/// Vertex set of {delta in simplex over allow(s,i) : |delta(a) - center(s)(a)| <= radius}.
/// Exact; capped at 6 actions per state (vertex count grows combinatorially).
std::vector<Distribution<ActionId>> ball_vertices(const Game& game, StateId s, PlayerId i, const BallSpec& ball);

inline constexpr int kBallVertexActionCap = 6;

/// Profile file: JSON player -> state -> action -> rational string. Missing
/// actions mean probability 0; missing final states default to uniform.
StationaryProfile parse_profile(const Game& game, const std::string& text);
std::string serialize_profile(const Game& game, const StationaryProfile& profile);

}  // namespace ideq
