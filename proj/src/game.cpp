#include "ideq/game.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ideq {

using nlohmann::ordered_json;

namespace {

int index_of(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return -1;
  return static_cast<int>(it - names.begin());
}

std::vector<std::string> split_tuple(const std::string& key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

void require_unique(const std::vector<std::string>& names, const char* what) {
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size()) throw SemanticError(std::string("duplicate ") + what + " name");
  if (names.empty()) throw SemanticError(std::string("empty ") + what + " list");
}

}  // namespace

StateId Arena::state_id(const std::string& name) const {
  int id = index_of(states, name);
  if (id < 0) throw SemanticError("unknown state '" + name + "'");
  return id;
}

PlayerId Arena::player_id(const std::string& name) const {
  int id = index_of(players, name);
  if (id < 0) throw SemanticError("unknown player '" + name + "'");
  return id;
}

ActionId Arena::action_id(const std::string& name) const {
  int id = index_of(actions, name);
  if (id < 0) throw SemanticError("unknown action '" + name + "'");
  return id;
}

bool Game::is_final(StateId s) const {
  if (s < 0 || s >= arena.num_states()) throw SemanticError("state id out of range");
  return final_state[s];
}

std::vector<StateId> Game::finals() const {
  std::vector<StateId> out;
  for (StateId s = 0; s < arena.num_states(); ++s)
    if (final_state[s]) out.push_back(s);
  return out;
}

bool Game::operator==(const Game& other) const {
  return arena.states == other.arena.states && arena.players == other.arena.players &&
         arena.actions == other.arena.actions && arena.allow == other.arena.allow &&
         arena.tab == other.arena.tab && final_state == other.final_state && reward == other.reward;
}

const Distribution<StateId>& successors(const Game& game, StateId s, const std::vector<ActionId>& joint) {
  const Arena& a = game.arena;
  if (s < 0 || s >= a.num_states()) throw SemanticError("state id out of range");
  if (static_cast<int>(joint.size()) != a.num_players())
    throw SemanticError("joint action has wrong arity");
  std::vector<int> pos(a.num_players());
  for (PlayerId i = 0; i < a.num_players(); ++i) {
    auto& acts = a.allow[s][i];
    auto it = std::find(acts.begin(), acts.end(), joint[i]);
    if (it == acts.end())
      throw SemanticError("action '" + a.actions[joint[i]] + "' not allowed for player '" +
                          a.players[i] + "' at state '" + a.states[s] + "'");
    pos[i] = static_cast<int>(it - acts.begin());
  }
  return a.tab[s][a.joint_index(s, pos)];
}

Game parse_game(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw SemanticError("top-level value must be an object");
  for (const char* key : {"states", "players", "actions", "allow", "tab", "finals", "rewards"})
    if (!doc.contains(key)) throw SemanticError(std::string("missing key '") + key + "'");

  Game game;
  Arena& a = game.arena;
  a.states = doc["states"].get<std::vector<std::string>>();
  a.players = doc["players"].get<std::vector<std::string>>();
  a.actions = doc["actions"].get<std::vector<std::string>>();
  require_unique(a.states, "state");
  require_unique(a.players, "player");
  require_unique(a.actions, "action");

  // allow sets, stored sorted by action id
  a.allow.assign(a.num_states(), {});
  const auto& allow_doc = doc["allow"];
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (!allow_doc.contains(a.states[s]))
      throw SemanticError("allow: missing state '" + a.states[s] + "'");
    a.allow[s].resize(a.num_players());
    const auto& per_state = allow_doc[a.states[s]];
    for (PlayerId i = 0; i < a.num_players(); ++i) {
      if (!per_state.contains(a.players[i]))
        throw SemanticError("allow: missing player '" + a.players[i] + "' at state '" + a.states[s] + "'");
      std::vector<ActionId> acts;
      for (const auto& name : per_state[a.players[i]])
        acts.push_back(a.action_id(name.get<std::string>()));
      std::sort(acts.begin(), acts.end());
      if (acts.empty())
        throw SemanticError("allow: empty action set for player '" + a.players[i] + "' at state '" +
                            a.states[s] + "'");
      if (std::adjacent_find(acts.begin(), acts.end()) != acts.end())
        throw SemanticError("allow: duplicate action at state '" + a.states[s] + "'");
      a.allow[s][i] = std::move(acts);
    }
  }

  // transition table: every joint action of the allow product, nothing else
  a.tab.assign(a.num_states(), {});
  const auto& tab_doc = doc["tab"];
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (!tab_doc.contains(a.states[s]))
      throw SemanticError("tab: missing state '" + a.states[s] + "'");
    std::size_t n = a.joint_count(s);
    a.tab[s].resize(n);
    std::vector<bool> seen(n, false);
    for (const auto& [key, rows] : tab_doc[a.states[s]].items()) {
      std::vector<std::string> parts = split_tuple(key);
      if (static_cast<int>(parts.size()) != a.num_players())
        throw SemanticError("tab: joint action '" + key + "' has wrong arity at state '" + a.states[s] + "'");
      std::vector<int> pos(a.num_players());
      for (PlayerId i = 0; i < a.num_players(); ++i) {
        ActionId act = a.action_id(parts[i]);
        auto& acts = a.allow[s][i];
        auto it = std::find(acts.begin(), acts.end(), act);
        if (it == acts.end())
          throw SemanticError("tab: action '" + parts[i] + "' not allowed for player '" + a.players[i] +
                              "' at state '" + a.states[s] + "'");
        pos[i] = static_cast<int>(it - acts.begin());
      }
      std::size_t idx = a.joint_index(s, pos);
      if (seen[idx]) throw SemanticError("tab: duplicate joint action '" + key + "' at state '" + a.states[s] + "'");
      seen[idx] = true;
      std::vector<Distribution<StateId>::Entry> entries;
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != 2)
          throw SemanticError("tab: expected [state, probability] pair at state '" + a.states[s] + "'");
        StateId target = a.state_id(row[0].get<std::string>());
        entries.emplace_back(target, parse_rational(row[1].get<std::string>()));
      }
      try {
        a.tab[s][idx] = Distribution<StateId>(std::move(entries));
      } catch (const std::invalid_argument& e) {
        throw SemanticError("tab: " + std::string(e.what()) + " for joint action '" + key + "' at state '" +
                            a.states[s] + "'");
      }
    }
    for (std::size_t idx = 0; idx < n; ++idx)
      if (!seen[idx]) throw SemanticError("tab: missing joint action at state '" + a.states[s] + "'");
  }

  // declared finals must coincide with the sink test
  game.final_state.assign(a.num_states(), false);
  for (const auto& name : doc["finals"]) {
    StateId s = a.state_id(name.get<std::string>());
    if (game.final_state[s]) throw SemanticError("duplicate final state '" + a.states[s] + "'");
    game.final_state[s] = true;
  }
  for (StateId s = 0; s < a.num_states(); ++s) {
    bool sink = true;
    for (const auto& dist : a.tab[s])
      if (!dist.is_dirac() || dist.entries()[0].first != s) {
        sink = false;
        break;
      }
    if (game.final_state[s] && !sink)
      throw SemanticError("declared final state '" + a.states[s] + "' is not a sink");
    if (!game.final_state[s] && sink)
      throw SemanticError("sink state '" + a.states[s] + "' is not declared final");
  }

  // rewards: exactly the finals, every player
  game.reward.assign(a.num_states(), {});
  for (const auto& [name, per_player] : doc["rewards"].items()) {
    StateId s = a.state_id(name);
    if (!game.final_state[s]) throw SemanticError("reward given for non-final state '" + name + "'");
    game.reward[s].assign(a.num_players(), Rational(0));
    for (PlayerId i = 0; i < a.num_players(); ++i) {
      if (!per_player.contains(a.players[i]))
        throw SemanticError("missing reward for player '" + a.players[i] + "' at final state '" + name + "'");
      game.reward[s][i] = parse_rational(per_player[a.players[i]].get<std::string>());
    }
  }
  for (StateId s = 0; s < a.num_states(); ++s)
    if (game.final_state[s] && game.reward[s].empty())
      throw SemanticError("missing rewards for final state '" + a.states[s] + "'");

  return game;
}

std::string serialize_game(const Game& game) {
  const Arena& a = game.arena;
  ordered_json doc;
  doc["states"] = a.states;
  doc["players"] = a.players;
  doc["actions"] = a.actions;

  ordered_json allow_doc = ordered_json::object();
  for (StateId s = 0; s < a.num_states(); ++s) {
    ordered_json per_state = ordered_json::object();
    for (PlayerId i = 0; i < a.num_players(); ++i) {
      std::vector<std::string> names;
      for (ActionId act : a.allow[s][i]) names.push_back(a.actions[act]);
      per_state[a.players[i]] = names;
    }
    allow_doc[a.states[s]] = per_state;
  }
  doc["allow"] = allow_doc;

  ordered_json tab_doc = ordered_json::object();
  for (StateId s = 0; s < a.num_states(); ++s) {
    ordered_json per_state = ordered_json::object();
    std::size_t n = a.joint_count(s);
    for (std::size_t idx = 0; idx < n; ++idx) {
      std::vector<int> pos = a.joint_positions(s, idx);
      std::string key;
      for (PlayerId i = 0; i < a.num_players(); ++i) {
        if (i > 0) key += ',';
        key += a.actions[a.allow[s][i][pos[i]]];
      }
      ordered_json rows = ordered_json::array();
      for (const auto& [target, p] : a.tab[s][idx].entries())
        rows.push_back({a.states[target], rational_string(p)});
      per_state[key] = rows;
    }
    tab_doc[a.states[s]] = per_state;
  }
  doc["tab"] = tab_doc;

  std::vector<std::string> final_names;
  for (StateId s : game.finals()) final_names.push_back(a.states[s]);
  doc["finals"] = final_names;

  ordered_json rewards_doc = ordered_json::object();
  for (StateId s : game.finals()) {
    ordered_json per_player = ordered_json::object();
    for (PlayerId i = 0; i < a.num_players(); ++i) per_player[a.players[i]] = rational_string(game.reward[s][i]);
    rewards_doc[a.states[s]] = per_player;
  }
  doc["rewards"] = rewards_doc;

  return doc.dump(2) + "\n";
}

}  // namespace ideq
