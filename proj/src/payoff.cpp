#include "ideq/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "ideq/linear.hpp"

namespace ideq {

namespace {

// product over the co-players' support sets, yielding (joint index, weight)
void for_each_coplayer_combo(const Game& game, const StationaryProfile& profile, PlayerId i, StateId s,
                             int fixed_pos, const std::function<void(std::size_t, const Rational&)>& fn) {
  const Arena& arena = game.arena;
  int players = arena.num_players();
  std::vector<std::vector<std::pair<int, Rational>>> options(players);
  for (PlayerId j = 0; j < players; ++j) {
    if (j == i) {
      options[j] = {{fixed_pos, Rational(1)}};
      continue;
    }
    const auto& acts = arena.allow[s][j];
    for (const auto& [act, p] : profile.strategies[j].choice[s].entries()) {
      auto it = std::find(acts.begin(), acts.end(), act);
      if (it == acts.end()) throw SemanticError("profile plays disallowed action");
      options[j].emplace_back(static_cast<int>(it - acts.begin()), p);
    }
  }
  std::vector<std::size_t> pick(players, 0);
  while (true) {
    Rational weight(1);
    std::vector<int> pos(players);
    for (PlayerId j = 0; j < players; ++j) {
      pos[j] = options[j][pick[j]].first;
      weight *= options[j][pick[j]].second;
    }
    fn(arena.joint_index(s, pos), weight);
    int j = players;
    while (j > 0) {
      --j;
      if (++pick[j] < options[j].size()) break;
      pick[j] = 0;
      if (j == 0) return;
    }
  }
}

Distribution<StateId> mix_outcomes(const Game& game, StateId s,
                                   const std::vector<std::pair<std::size_t, Rational>>& weighted_joints) {
  std::map<StateId, Rational> acc;
  for (const auto& [idx, w] : weighted_joints)
    for (const auto& [target, p] : game.arena.tab[s][idx].entries()) acc[target] += w * p;
  std::vector<Distribution<StateId>::Entry> entries(acc.begin(), acc.end());
  return Distribution<StateId>(std::move(entries));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Distribution<StateId> action_outcome(const Game& game, const StationaryProfile& profile, PlayerId i,
                                     StateId s, ActionId a) {
  const auto& acts = game.arena.allow[s][i];
  auto it = std::find(acts.begin(), acts.end(), a);
  if (it == acts.end()) throw SemanticError("action not allowed at state");
  std::vector<std::pair<std::size_t, Rational>> joints;
  for_each_coplayer_combo(game, profile, i, s, static_cast<int>(it - acts.begin()),
                          [&](std::size_t idx, const Rational& w) { joints.emplace_back(idx, w); });
  return mix_outcomes(game, s, joints);
}

Distribution<StateId> profile_outcome(const Game& game, const StationaryProfile& profile, StateId s) {
  // mix player 0's actions over action_outcome of the rest
  std::map<StateId, Rational> acc;
  for (const auto& [act, p] : profile.strategies[0].choice[s].entries())
    for (const auto& [target, q] : action_outcome(game, profile, 0, s, act).entries()) acc[target] += p * q;
  std::vector<Distribution<StateId>::Entry> entries(acc.begin(), acc.end());
  return Distribution<StateId>(std::move(entries));
}

std::vector<bool> chain_zero_reach(const MarkovChain& chain) {
  std::size_t n = chain.step.size();
  std::vector<bool> reaches(n, false);
  for (std::size_t s = 0; s < n; ++s) reaches[s] = chain.final_node[s];
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (reaches[s]) continue;
      for (StateId target : chain.step[s].support()) {
        if (reaches[target]) {
          reaches[s] = true;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<bool> zero(n);
  for (std::size_t s = 0; s < n; ++s) zero[s] = !reaches[s];
  return zero;
}

std::vector<std::vector<Rational>> chain_expected_terminal(const MarkovChain& chain,
                                                           const std::vector<std::vector<Rational>>& rewards) {
  std::size_t n = chain.step.size();
  std::vector<bool> zero = chain_zero_reach(chain);

  std::vector<int> row_of(n, -1);
  std::vector<std::size_t> transient;
  for (std::size_t s = 0; s < n; ++s) {
    if (chain.final_node[s] || zero[s]) continue;
    row_of[s] = static_cast<int>(transient.size());
    transient.push_back(s);
  }

  std::size_t nt = transient.size();
  std::size_t m = rewards.size();
  std::vector<std::vector<Rational>> a(nt, std::vector<Rational>(nt, Rational(0)));
  std::vector<std::vector<Rational>> b(nt, std::vector<Rational>(m, Rational(0)));
  for (std::size_t r = 0; r < nt; ++r) {
    std::size_t s = transient[r];
    a[r][r] = 1;
    for (const auto& [target, p] : chain.step[s].entries()) {
      if (chain.final_node[target]) {
        for (std::size_t k = 0; k < m; ++k) b[r][k] += p * rewards[k][target];
      } else if (row_of[target] >= 0) {
        a[r][row_of[target]] -= p;
      }
      // zero-reach successors contribute nothing
    }
  }
  std::vector<std::vector<Rational>> x = solve_linear(std::move(a), std::move(b));

  std::vector<std::vector<Rational>> out(m, std::vector<Rational>(n, Rational(0)));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t s = 0; s < n; ++s) {
      if (chain.final_node[s])
        out[k][s] = rewards[k][s];
      else if (row_of[s] >= 0)
        out[k][s] = x[row_of[s]][k];
    }
  }
  return out;
}

namespace {

MarkovChain profile_chain(const Game& game, const StationaryProfile& profile) {
  MarkovChain chain;
  chain.final_node = game.final_state;
  chain.step.reserve(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s) {
    if (game.is_final(s))
      chain.step.push_back(Distribution<StateId>::dirac(s));
    else
      chain.step.push_back(profile_outcome(game, profile, s));
  }
  return chain;
}

std::vector<std::vector<Rational>> reward_rows(const Game& game) {
  std::vector<std::vector<Rational>> rows(game.arena.num_players(),
                                          std::vector<Rational>(game.arena.num_states(), Rational(0)));
  for (StateId s = 0; s < game.arena.num_states(); ++s)
    if (game.is_final(s))
      for (PlayerId i = 0; i < game.arena.num_players(); ++i) rows[i][s] = game.reward[s][i];
  return rows;
}

}  // namespace

std::vector<StateId> zero_reach_states(const Game& game, const StationaryProfile& profile) {
  validate_profile(game, profile);
  std::vector<bool> zero = chain_zero_reach(profile_chain(game, profile));
  std::vector<StateId> out;
  for (StateId s = 0; s < game.arena.num_states(); ++s)
    if (zero[s]) out.push_back(s);
  return out;
}

PayoffVector evaluate_profile(const Game& game, const StationaryProfile& profile) {
  validate_profile(game, profile);
  PayoffVector out;
  out.values = chain_expected_terminal(profile_chain(game, profile), reward_rows(game));
  return out;
}

PayoffVector bounded_horizon_payoff(const Game& game, const StationaryProfile& profile, unsigned horizon) {
  validate_profile(game, profile);
  MarkovChain chain = profile_chain(game, profile);
  std::vector<std::vector<Rational>> rewards = reward_rows(game);
  int n = game.arena.num_states();
  int players = game.arena.num_players();

  std::vector<std::vector<Rational>> h(players, std::vector<Rational>(n, Rational(0)));
  for (StateId s = 0; s < n; ++s)
    if (game.is_final(s))
      for (PlayerId i = 0; i < players; ++i) h[i][s] = rewards[i][s];

  for (unsigned t = 0; t < horizon; ++t) {
    std::vector<std::vector<Rational>> next(players, std::vector<Rational>(n, Rational(0)));
    for (StateId s = 0; s < n; ++s) {
      if (game.is_final(s)) {
        for (PlayerId i = 0; i < players; ++i) next[i][s] = rewards[i][s];
        continue;
      }
      for (const auto& [target, p] : chain.step[s].entries())
        for (PlayerId i = 0; i < players; ++i) next[i][s] += p * h[i][target];
    }
    h = std::move(next);
  }
  return PayoffVector{std::move(h)};
}

std::vector<McEstimate> monte_carlo_estimate(const Game& game, const StationaryProfile& profile, StateId s0,
                                             std::uint64_t samples, unsigned horizon, std::uint64_t seed) {
  validate_profile(game, profile);
  if (samples == 0) throw SemanticError("monte_carlo_estimate requires samples >= 1");
  MarkovChain chain = profile_chain(game, profile);
  int n = game.arena.num_states();
  int players = game.arena.num_players();

  // double cumulative tables for fast sampling
  std::vector<std::vector<std::pair<double, StateId>>> cdf(n);
  for (StateId s = 0; s < n; ++s) {
    double acc = 0;
    for (const auto& [target, p] : chain.step[s].entries()) {
      acc += to_double(p);
      cdf[s].emplace_back(acc, target);
    }
    cdf[s].back().first = 1.0;
  }
  std::vector<std::vector<double>> reward_d(players, std::vector<double>(n, 0.0));
  for (StateId s = 0; s < n; ++s)
    if (game.is_final(s))
      for (PlayerId i = 0; i < players; ++i) reward_d[i][s] = to_double(game.reward[s][i]);

  std::vector<double> sum(players, 0.0), sumsq(players, 0.0);
  for (std::uint64_t k = 0; k < samples; ++k) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(k + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    StateId s = s0;
    for (unsigned t = 0; t < horizon && !game.is_final(s); ++t) {
      double u = unif(rng);
      for (const auto& [acc, target] : cdf[s]) {
        if (u <= acc) {
          s = target;
          break;
        }
      }
    }
    for (PlayerId i = 0; i < players; ++i) {
      double r = game.is_final(s) ? reward_d[i][s] : 0.0;
      sum[i] += r;
      sumsq[i] += r * r;
    }
  }
  std::vector<McEstimate> out(players);
  double nd = static_cast<double>(samples);
  for (PlayerId i = 0; i < players; ++i) {
    double mean = sum[i] / nd;
    double var = samples > 1 ? std::max(0.0, (sumsq[i] - nd * mean * mean) / (nd - 1)) : 0.0;
    out[i] = {mean, 1.96 * std::sqrt(var / nd)};
  }
  return out;
}

ConstrainedActionSet simplex_actions(const Game& game, PlayerId i) {
  ConstrainedActionSet out;
  out.menus.resize(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s)
    for (ActionId a : game.arena.allow[s][i]) out.menus[s].push_back(Distribution<ActionId>::dirac(a));
  return out;
}

ConstrainedActionSet ball_actions(const Game& game, PlayerId i, const BallSpec& ball) {
  ConstrainedActionSet out;
  out.menus.resize(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s) out.menus[s] = ball_vertices(game, s, i, ball);
  return out;
}

ConstrainedActionSet delta_restricted_actions(const Game& game, PlayerId i, const DeltaEpsilonSpec& spec) {
  ConstrainedActionSet out;
  out.menus.resize(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s) {
    const auto& acts = game.arena.allow[s][i];
    std::vector<Rational> lower(acts.size(), Rational(0));
    for (const auto& [ci, cs, ca] : spec.constraints) {
      if (ci != i || cs != s) continue;
      auto it = std::find(acts.begin(), acts.end(), ca);
      if (it == acts.end()) throw SemanticError("delta-epsilon constraint on disallowed action");
      lower[it - acts.begin()] = spec.epsilon;
    }
    Rational mass(1);
    for (const auto& l : lower) mass -= l;
    if (mass < 0) throw SemanticError("delta-epsilon constraints infeasible at state '" + game.arena.states[s] + "'");
    std::vector<std::vector<Distribution<ActionId>::Entry>> found;
    for (std::size_t carrier = 0; carrier < acts.size(); ++carrier) {
      std::vector<Distribution<ActionId>::Entry> entries;
      for (std::size_t j = 0; j < acts.size(); ++j) {
        Rational p = lower[j] + (j == carrier ? mass : Rational(0));
        if (p > 0) entries.emplace_back(acts[j], p);
      }
      found.push_back(std::move(entries));
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (auto& entries : found) out.menus[s].emplace_back(std::move(entries));
  }
  return out;
}

namespace {

struct PolicySpace {
  std::vector<StateId> varying;          // non-final states
  std::vector<std::size_t> menu_sizes;   // aligned with varying
  std::size_t count = 1;
  bool overflow = false;
};

PolicySpace policy_space(const Game& game, const ConstrainedActionSet& actions) {
  PolicySpace ps;
  for (StateId s = 0; s < game.arena.num_states(); ++s) {
    if (game.is_final(s)) continue;
    if (actions.menus[s].empty()) throw SemanticError("empty action menu at state '" + game.arena.states[s] + "'");
    ps.varying.push_back(s);
    ps.menu_sizes.push_back(actions.menus[s].size());
    if (ps.count > kPolicyEnumerationCap / actions.menus[s].size() + 1) ps.overflow = true;
    ps.count *= actions.menus[s].size();
    if (ps.count > kPolicyEnumerationCap) ps.overflow = true;
  }
  return ps;
}

StationaryStrategy policy_strategy(const Game& game, const ConstrainedActionSet& actions, PlayerId i,
                                   const PolicySpace& ps, const std::vector<std::size_t>& pick) {
  StationaryStrategy strat;
  strat.player = i;
  strat.choice.resize(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s) strat.choice[s] = actions.menus[s][0];
  for (std::size_t j = 0; j < ps.varying.size(); ++j) strat.choice[ps.varying[j]] = actions.menus[ps.varying[j]][pick[j]];
  return strat;
}

// value vector of one policy: exact absorption values for player i
std::vector<Rational> policy_value(const Game& game, const std::vector<std::vector<Distribution<StateId>>>& outcome,
                                   PlayerId i, const PolicySpace& ps, const std::vector<std::size_t>& pick) {
  MarkovChain chain;
  chain.final_node = game.final_state;
  chain.step.resize(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s) chain.step[s] = Distribution<StateId>::dirac(s);
  for (std::size_t j = 0; j < ps.varying.size(); ++j) chain.step[ps.varying[j]] = outcome[ps.varying[j]][pick[j]];

  std::vector<Rational> reward_row(game.arena.num_states(), Rational(0));
  for (StateId s = 0; s < game.arena.num_states(); ++s)
    if (game.is_final(s)) reward_row[s] = game.reward[s][i];
  return chain_expected_terminal(chain, {reward_row})[0];
}

}  // namespace

BestResponse constrained_best_response(const Game& game, const StationaryProfile& profile, PlayerId i,
                                       const ConstrainedActionSet& actions, OptMode mode) {
  const Arena& arena = game.arena;
  PolicySpace ps = policy_space(game, actions);
  bool maximize = mode == OptMode::Max;

  // vertex -> one-step distribution, with the co-players fixed to the profile
  std::vector<std::vector<Distribution<StateId>>> outcome(arena.num_states());
  for (StateId s = 0; s < arena.num_states(); ++s) {
    if (game.is_final(s)) continue;
    std::vector<Distribution<StateId>> per_action;
    const auto& acts = arena.allow[s][i];
    for (ActionId a : acts) per_action.push_back(action_outcome(game, profile, i, s, a));
    for (const auto& vertex : actions.menus[s]) {
      std::map<StateId, Rational> acc;
      for (const auto& [a, p] : vertex.entries()) {
        auto it = std::find(acts.begin(), acts.end(), a);
        if (it == acts.end()) throw SemanticError("menu vertex supported outside allow set");
        for (const auto& [target, q] : per_action[it - acts.begin()].entries()) acc[target] += p * q;
      }
      std::vector<Distribution<StateId>::Entry> entries(acc.begin(), acc.end());
      outcome[s].emplace_back(std::move(entries));
    }
  }

  if (!ps.overflow) {
    // exhaustive: componentwise envelope over all vertex policies, then the
    // first policy attaining it everywhere (one exists: the decision process
    // has a uniformly optimal memoryless policy)
    std::vector<std::vector<Rational>> values;
    values.reserve(ps.count);
    std::vector<std::size_t> pick(ps.varying.size(), 0);
    for (std::size_t idx = 0; idx < ps.count; ++idx) {
      values.push_back(policy_value(game, outcome, i, ps, pick));
      std::size_t j = ps.varying.size();
      while (j > 0) {
        --j;
        if (++pick[j] < ps.menu_sizes[j]) break;
        pick[j] = 0;
      }
    }
    std::vector<Rational> envelope = values[0];
    for (const auto& v : values)
      for (std::size_t s = 0; s < envelope.size(); ++s)
        if (maximize ? v[s] > envelope[s] : v[s] < envelope[s]) envelope[s] = v[s];

    std::fill(pick.begin(), pick.end(), 0);
    for (std::size_t idx = 0; idx < ps.count; ++idx) {
      if (values[idx] == envelope) {
        return BestResponse{std::move(envelope), policy_strategy(game, actions, i, ps, pick)};
      }
      std::size_t j = ps.varying.size();
      while (j > 0) {
        --j;
        if (++pick[j] < ps.menu_sizes[j]) break;
        pick[j] = 0;
      }
    }
    throw std::runtime_error("internal error: no single policy attains the optimal envelope");
  }

  // Greedy policy iteration; switches only on strict one-step improvement, so
  // it terminates, and it starts from the first vertex in canonical order.
  std::vector<std::size_t> pick(ps.varying.size(), 0);
  for (int round = 0; round < 10000; ++round) {
    std::vector<Rational> x = policy_value(game, outcome, i, ps, pick);
    bool switched = false;
    for (std::size_t j = 0; j < ps.varying.size(); ++j) {
      StateId s = ps.varying[j];
      auto backup = [&](std::size_t v) {
        Rational q(0);
        for (const auto& [target, p] : outcome[s][v].entries()) q += p * x[target];
        return q;
      };
      Rational current = backup(pick[j]);
      std::size_t best = pick[j];
      Rational best_q = current;
      for (std::size_t v = 0; v < ps.menu_sizes[j]; ++v) {
        Rational q = backup(v);
        if (maximize ? q > best_q : q < best_q) {
          best_q = q;
          best = v;
        }
      }
      if (best != pick[j]) {
        pick[j] = best;
        switched = true;
      }
    }
    if (!switched) return BestResponse{std::move(x), policy_strategy(game, actions, i, ps, pick)};
  }
  throw std::runtime_error("policy iteration failed to converge");
}

std::string serialize_payoffs_json(const Game& game, const PayoffVector& payoffs) {
  std::ostringstream out;
  out << "{\n";
  for (PlayerId i = 0; i < game.arena.num_players(); ++i) {
    out << "  \"" << game.arena.players[i] << "\": {";
    for (StateId s = 0; s < game.arena.num_states(); ++s) {
      if (s > 0) out << ", ";
      out << "\"" << game.arena.states[s] << "\": \"" << rational_string(payoffs.at(i, s)) << "\"";
    }
    out << "}" << (i + 1 < game.arena.num_players() ? "," : "") << "\n";
  }
  out << "}\n";
  return out.str();
}

std::string serialize_payoffs_csv(const Game& game, const PayoffVector& payoffs) {
  std::ostringstream out;
  out << "state,player,value\n";
  for (StateId s = 0; s < game.arena.num_states(); ++s)
    for (PlayerId i = 0; i < game.arena.num_players(); ++i)
      out << game.arena.states[s] << "," << game.arena.players[i] << "," << rational_string(payoffs.at(i, s)) << "\n";
  return out.str();
}

}  // namespace ideq
