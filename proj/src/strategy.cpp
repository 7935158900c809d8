#include "ideq/strategy.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace ideq {

using nlohmann::ordered_json;

void validate_strategy(const Game& game, const StationaryStrategy& strategy) {
  const Arena& a = game.arena;
  if (strategy.player < 0 || strategy.player >= a.num_players())
    throw SemanticError("strategy has no valid player");
  if (static_cast<int>(strategy.choice.size()) != a.num_states())
    throw SemanticError("strategy not defined on every state");
  for (StateId s = 0; s < a.num_states(); ++s) {
    const auto& acts = a.allow[s][strategy.player];
    for (ActionId act : strategy.choice[s].support())
      if (!std::binary_search(acts.begin(), acts.end(), act))
        throw SemanticError("strategy for player '" + a.players[strategy.player] + "' plays disallowed action '" +
                            a.actions[act] + "' at state '" + a.states[s] + "'");
  }
}

void validate_profile(const Game& game, const StationaryProfile& profile) {
  if (static_cast<int>(profile.strategies.size()) != game.arena.num_players())
    throw SemanticError("profile must contain one strategy per player");
  for (PlayerId i = 0; i < game.arena.num_players(); ++i) {
    if (profile.strategies[i].player != i) throw SemanticError("profile strategies out of order");
    validate_strategy(game, profile.strategies[i]);
  }
}

StationaryStrategy uniform_strategy(const Game& game, PlayerId i) {
  StationaryStrategy out;
  out.player = i;
  out.choice.reserve(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s) {
    const auto& acts = game.arena.allow[s][i];
    std::vector<Distribution<ActionId>::Entry> entries;
    Rational p(1, static_cast<unsigned long>(acts.size()));
    for (ActionId act : acts) entries.emplace_back(act, p);
    out.choice.emplace_back(std::move(entries));
  }
  return out;
}

StationaryProfile uniform_profile(const Game& game) {
  StationaryProfile out;
  for (PlayerId i = 0; i < game.arena.num_players(); ++i) out.strategies.push_back(uniform_strategy(game, i));
  return out;
}

StationaryStrategy dirac_strategy(const Game& game, PlayerId i, const std::vector<ActionId>& action_by_state) {
  StationaryStrategy out;
  out.player = i;
  for (StateId s = 0; s < game.arena.num_states(); ++s)
    out.choice.push_back(Distribution<ActionId>::dirac(action_by_state[s]));
  validate_strategy(game, out);
  return out;
}

Rational distance(const StationaryStrategy& a, const StationaryStrategy& b) {
  if (a.player != b.player) throw SemanticError("distance between strategies of different players");
  if (a.choice.size() != b.choice.size()) throw SemanticError("distance between strategies of different arenas");
  Rational best(0);
  for (std::size_t s = 0; s < a.choice.size(); ++s) {
    std::set<ActionId> acts;
    for (ActionId act : a.choice[s].support()) acts.insert(act);
    for (ActionId act : b.choice[s].support()) acts.insert(act);
    for (ActionId act : acts) {
      Rational gap = abs(a.choice[s].prob(act) - b.choice[s].prob(act));
      if (gap > best) best = gap;
    }
  }
  return best;
}

bool in_ball(const StationaryStrategy& candidate, const BallSpec& ball) {
  return distance(candidate, ball.center) <= ball.radius;
}

bool in_delta_epsilon(const StationaryProfile& profile, const DeltaEpsilonSpec& spec) {
  for (const auto& [i, s, a] : spec.constraints) {
    if (i < 0 || i >= static_cast<int>(profile.strategies.size()) ||
        s >= static_cast<int>(profile.strategies[i].choice.size()))
      throw SemanticError("delta-epsilon constraint refers to a different arena");
    if (profile.strategies[i].choice[s].prob(a) < spec.epsilon) return false;
  }
  return true;
}

namespace {

// Euclidean projection of y onto {z >= 0, sum z = mass}, exact water-filling.
std::vector<Rational> project_scaled_simplex(const std::vector<Rational>& y, const Rational& mass) {
  std::size_t n = y.size();
  if (mass == 0) return std::vector<Rational>(n, Rational(0));
  std::vector<Rational> sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<Rational>());
  // theta for the largest j with sorted[j-1] > (prefix_j - mass)/j; such a j
  // exists because mass > 0 makes j = 1 qualify.
  Rational prefix(0);
  Rational theta(0);
  for (std::size_t j = 1; j <= n; ++j) {
    prefix += sorted[j - 1];
    Rational candidate = (prefix - mass) / Rational(static_cast<unsigned long>(j));
    if (sorted[j - 1] > candidate) theta = candidate;
  }
  std::vector<Rational> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = std::max(y[j] - theta, Rational(0));
  return z;
}

}  // namespace

StationaryProfile project_to_delta_epsilon(const Game& game, const StationaryProfile& profile,
                                           const DeltaEpsilonSpec& spec) {
  const Arena& arena = game.arena;
  StationaryProfile out = profile;
  for (PlayerId i = 0; i < arena.num_players(); ++i) {
    for (StateId s = 0; s < arena.num_states(); ++s) {
      const auto& acts = arena.allow[s][i];
      std::vector<Rational> lower(acts.size(), Rational(0));
      bool constrained = false;
      for (const auto& [ci, cs, ca] : spec.constraints) {
        if (ci != i || cs != s) continue;
        auto it = std::find(acts.begin(), acts.end(), ca);
        if (it == acts.end()) throw SemanticError("delta-epsilon constraint on disallowed action");
        lower[it - acts.begin()] = spec.epsilon;
        constrained = true;
      }
      Rational mass(1);
      for (const auto& l : lower) mass -= l;
      if (mass < 0)
        throw SemanticError("delta-epsilon constraints infeasible at state '" + arena.states[s] + "'");
      // Fast path: already feasible (projection is the identity there).
      if (!constrained) continue;
      bool feasible = true;
      for (std::size_t j = 0; j < acts.size(); ++j)
        if (profile.strategies[i].choice[s].prob(acts[j]) < lower[j]) feasible = false;
      if (feasible) continue;

      std::vector<Rational> shifted(acts.size());
      for (std::size_t j = 0; j < acts.size(); ++j)
        shifted[j] = profile.strategies[i].choice[s].prob(acts[j]) - lower[j];
      std::vector<Rational> z = project_scaled_simplex(shifted, mass);
      std::vector<Distribution<ActionId>::Entry> entries;
      for (std::size_t j = 0; j < acts.size(); ++j) {
        Rational p = z[j] + lower[j];
        if (p > 0) entries.emplace_back(acts[j], p);
      }
      out.strategies[i].choice[s] = Distribution<ActionId>(std::move(entries));
    }
  }
  return out;
}

std::vector<StationaryStrategy> enumerate_pure_memoryless(const Game& game, PlayerId i) {
  const Arena& arena = game.arena;
  std::vector<StateId> varying;
  for (StateId s = 0; s < arena.num_states(); ++s)
    if (!game.is_final(s)) varying.push_back(s);

  std::vector<ActionId> base(arena.num_states());
  for (StateId s = 0; s < arena.num_states(); ++s) base[s] = arena.allow[s][i][0];

  std::vector<StationaryStrategy> out;
  std::vector<std::size_t> pos(varying.size(), 0);
  while (true) {
    std::vector<ActionId> pick = base;
    for (std::size_t j = 0; j < varying.size(); ++j) pick[varying[j]] = arena.allow[varying[j]][i][pos[j]];
    out.push_back(dirac_strategy(game, i, pick));
    // mixed-radix increment, last varying state fastest
    std::size_t j = varying.size();
    while (j > 0) {
      --j;
      if (++pos[j] < arena.allow[varying[j]][i].size()) break;
      pos[j] = 0;
      if (j == 0) return out;
    }
    if (varying.empty()) return out;
  }
}

std::vector<Distribution<ActionId>> ball_vertices(const Game& game, StateId s, PlayerId i, const BallSpec& ball) {
  const auto& acts = game.arena.allow[s][i];
  std::size_t n = acts.size();
  if (n > kBallVertexActionCap)
    throw SemanticError("ball vertex enumeration capped at " + std::to_string(kBallVertexActionCap) + " actions");

  const auto& center = ball.center.choice[s];
  if (ball.radius == 0) return {center};

  std::vector<Rational> lo(n), hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    Rational c = center.prob(acts[j]);
    lo[j] = std::max(Rational(0), c - ball.radius);
    hi[j] = std::min(Rational(1), c + ball.radius);
  }

  // A vertex fixes every coordinate but one at a box bound; the free
  // coordinate absorbs the remaining mass and must respect its own bounds.
  std::vector<std::vector<Distribution<ActionId>::Entry>> found;
  for (std::size_t free = 0; free < n; ++free) {
    std::size_t combos = std::size_t{1} << (n - 1);
    for (std::size_t mask = 0; mask < combos; ++mask) {
      Rational rest(0);
      std::vector<Rational> value(n);
      std::size_t bit = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == free) continue;
        value[j] = (mask >> bit & 1) ? hi[j] : lo[j];
        rest += value[j];
        ++bit;
      }
      Rational freev = 1 - rest;
      if (freev < lo[free] || freev > hi[free]) continue;
      value[free] = freev;
      std::vector<Distribution<ActionId>::Entry> entries;
      for (std::size_t j = 0; j < n; ++j)
        if (value[j] > 0) entries.emplace_back(acts[j], value[j]);
      found.push_back(std::move(entries));
    }
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());

  std::vector<Distribution<ActionId>> out;
  out.reserve(found.size());
  for (auto& entries : found) out.emplace_back(std::move(entries));
  return out;
}

StationaryProfile parse_profile(const Game& game, const std::string& text) {
  const Arena& arena = game.arena;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw SemanticError("profile must be a JSON object");

  StationaryProfile out;
  for (PlayerId i = 0; i < arena.num_players(); ++i) {
    if (!doc.contains(arena.players[i]))
      throw SemanticError("profile: missing player '" + arena.players[i] + "'");
    const auto& per_player = doc[arena.players[i]];
    StationaryStrategy strat;
    strat.player = i;
    strat.choice.resize(arena.num_states());
    std::vector<bool> given(arena.num_states(), false);
    for (const auto& [state_name, dist_doc] : per_player.items()) {
      StateId s = arena.state_id(state_name);
      std::vector<Distribution<ActionId>::Entry> entries;
      for (const auto& [action_name, prob] : dist_doc.items())
        entries.emplace_back(arena.action_id(action_name), parse_rational(prob.get<std::string>()));
      try {
        strat.choice[s] = Distribution<ActionId>(std::move(entries));
      } catch (const std::invalid_argument& e) {
        throw SemanticError("profile: " + std::string(e.what()) + " for player '" + arena.players[i] +
                            "' at state '" + state_name + "'");
      }
      given[s] = true;
    }
    for (StateId s = 0; s < arena.num_states(); ++s) {
      if (given[s]) continue;
      if (!game.is_final(s))
        throw SemanticError("profile: missing state '" + arena.states[s] + "' for player '" + arena.players[i] + "'");
      strat.choice[s] = uniform_strategy(game, i).choice[s];
    }
    out.strategies.push_back(std::move(strat));
  }
  validate_profile(game, out);
  return out;
}

std::string serialize_profile(const Game& game, const StationaryProfile& profile) {
  const Arena& arena = game.arena;
  ordered_json doc = ordered_json::object();
  for (PlayerId i = 0; i < arena.num_players(); ++i) {
    ordered_json per_player = ordered_json::object();
    for (StateId s = 0; s < arena.num_states(); ++s) {
      ordered_json dist = ordered_json::object();
      for (const auto& [act, p] : profile.strategies[i].choice[s].entries())
        dist[arena.actions[act]] = rational_string(p);
      per_player[arena.states[s]] = dist;
    }
    doc[arena.players[i]] = per_player;
  }
  return doc.dump(2) + "\n";
}

}  // namespace ideq
