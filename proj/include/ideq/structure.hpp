#pragma once

#include <vector>

#include "ideq/strategy.hpp"

namespace ideq {

/// Per-state product support: one non-empty action subset per player.
struct ProductSupport {
  std::vector<std::vector<ActionId>> per_player;

  bool operator==(const ProductSupport& o) const { return per_player == o.per_player; }
};

/// A state set C stabilized by some stationary profile: under the profile's
/// supports, the reachable set from every member is exactly C.
struct StrongComponent {
  std::vector<StateId> states;  // sorted

  // stabilizers[k]: the maximal closed product supports at states[k] that
  // occur in at least one stabilizing selection (exit actions quantify over
  // all stabilizers, so all of them are kept)
  std::vector<std::vector<ProductSupport>> stabilizers;

  // one stabilizing selection, aligned with states
  std::vector<ProductSupport> witness;
};

/// (action, player, state) triples that leave a strong component with
/// positive probability against some stabilizer.
struct ExitTriple {
  ActionId action;
  PlayerId player;
  StateId state;

  auto operator<=>(const ExitTriple&) const = default;
};

struct TerminationBound {
  unsigned k = 0;
  Rational p;
};

/// Greatest fixpoint of: s stays iff some joint action keeps the support of
/// every unilateral one-step deviation inside the set. Sorted output.
std::vector<StateId> cycling_states(const Game& game);

struct CycleFreeReduction {
  Game reduced;
  std::vector<StateId> state_map;               // old state -> new state (same ids here)
  std::vector<StateId> cycling;                 // states collapsed to 0-reward finals
  std::vector<std::vector<ActionId>> trap_choice;  // witness joint action per state (cycling states only)
};

/// Replace every cycling state by a fresh 0-reward final; the result has no
/// cycling states and a cycle-free input comes back unchanged.
CycleFreeReduction make_cycle_free(const Game& game);

/// Profile on the original game that copies the reduced profile outside the
/// cycling states and plays the trap witness inside them, preserving payoffs
/// at non-cycling states.
StationaryProfile lift_profile(const StationaryProfile& reduced_profile, const CycleFreeReduction& reduction,
                               const Game& original);

inline constexpr int kStrongComponentStateCap = 12;

/// Exhaustive enumeration of all strong components, with every feasible
/// maximal stabilizer support recorded per state. Desk-scale only.
std::vector<StrongComponent> strong_components(const Game& game, int state_cap = kStrongComponentStateCap);

/// Exit(C): all (a, i, s) such that replacing player i's move at s by a in
/// some stabilizer leaves C with positive probability in one step.
std::vector<ExitTriple> exit_actions(const Game& game, const StrongComponent& component);

/// Lower-bound constraints sigma_i(s)(a) >= epsilon for every exiting action
/// of every strong component. Requires a cycle-free game and epsilon in
/// (0, 1/|Act|].
DeltaEpsilonSpec delta_epsilon_spec(const Game& game, const Rational& epsilon, int state_cap = kStrongComponentStateCap);

/// k = |States| and p = 1 - (epsilon * tau_min)^|States| with tau_min the
/// least positive transition probability; a conservative instantiation of the
/// absorption bound P(final within k*n steps) >= 1 - p^n.
TerminationBound termination_bound(const Game& game, const Rational& epsilon);

}  // namespace ideq
