#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ideq/distribution.hpp"
#include "ideq/rational.hpp"

namespace ideq {

using StateId = int;
using PlayerId = int;
using ActionId = int;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SemanticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Joint actions at a state are indexed in mixed radix over the per-player
/// allowed sets, player 0 most significant.
struct Arena {
  std::vector<std::string> states;
  std::vector<std::string> players;
  std::vector<std::string> actions;

  // allow[s][i]: sorted, non-empty action ids available to player i at s
  std::vector<std::vector<std::vector<ActionId>>> allow;
  // tab[s][joint]: successor distribution, joint in mixed-radix order
  std::vector<std::vector<Distribution<StateId>>> tab;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_players() const { return static_cast<int>(players.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }

  std::size_t joint_count(StateId s) const {
    std::size_t n = 1;
    for (auto& acts : allow[s]) n *= acts.size();
    return n;
  }

  /// Mixed-radix index of a joint action given per-player positions into
  /// allow[s][i] (not raw action ids).
  std::size_t joint_index(StateId s, const std::vector<int>& pos) const {
    std::size_t idx = 0;
    for (PlayerId i = 0; i < num_players(); ++i) idx = idx * allow[s][i].size() + pos[i];
    return idx;
  }

  /// Inverse of joint_index: per-player positions for a mixed-radix index.
  std::vector<int> joint_positions(StateId s, std::size_t idx) const {
    std::vector<int> pos(num_players());
    for (PlayerId i = num_players() - 1; i >= 0; --i) {
      pos[i] = static_cast<int>(idx % allow[s][i].size());
      idx /= allow[s][i].size();
    }
    return pos;
  }

  StateId state_id(const std::string& name) const;
  PlayerId player_id(const std::string& name) const;
  ActionId action_id(const std::string& name) const;
};

struct Game {
  Arena arena;
  std::vector<bool> final_state;          // by state id
  std::vector<std::vector<Rational>> reward;  // reward[s][i], populated at finals

  bool is_final(StateId s) const;
  std::vector<StateId> finals() const;

  bool operator==(const Game& other) const;
};

/// Parse and fully validate the JSON game format. Probabilities and rewards
/// are parsed as exact rationals; any rounding-prone form is rejected.
Game parse_game(const std::string& text);

/// Canonical JSON serialization; parse_game(serialize_game(g)) == g.
std::string serialize_game(const Game& game);

/// Tab(s, A) for a joint action given as per-player action ids. Throws
/// SemanticError if some component is not allowed at s.
const Distribution<StateId>& successors(const Game& game, StateId s, const std::vector<ActionId>& joint);

}  // namespace ideq
