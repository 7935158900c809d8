#include "ideq/structure.hpp"

#include <algorithm>
#include <set>

namespace ideq {

namespace {

using Mask = std::uint64_t;

Mask support_mask(const Distribution<StateId>& dist) {
  Mask m = 0;
  for (StateId s : dist.support()) m |= Mask{1} << s;
  return m;
}

// per-state witness search for the cycling fixpoint: a joint action whose
// every unilateral replacement keeps all successors inside `inside`
bool find_trap_choice(const Game& game, StateId s, Mask inside, std::vector<ActionId>* choice) {
  const Arena& arena = game.arena;
  int players = arena.num_players();
  std::size_t n = arena.joint_count(s);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::vector<int> pos = arena.joint_positions(s, idx);
    bool good = true;
    for (PlayerId i = 0; i < players && good; ++i) {
      std::vector<int> alt = pos;
      for (std::size_t q = 0; q < arena.allow[s][i].size() && good; ++q) {
        alt[i] = static_cast<int>(q);
        if (support_mask(arena.tab[s][arena.joint_index(s, alt)]) & ~inside) good = false;
      }
    }
    if (good) {
      if (choice) {
        choice->clear();
        for (PlayerId i = 0; i < players; ++i) choice->push_back(arena.allow[s][i][pos[i]]);
      }
      return true;
    }
  }
  return false;
}

std::vector<StateId> cycling_fixpoint(const Game& game, std::vector<std::vector<ActionId>>* witness) {
  const Arena& arena = game.arena;
  if (arena.num_states() > 63) throw SemanticError("cycling-state analysis supports at most 63 states");
  Mask w = 0;
  for (StateId s = 0; s < arena.num_states(); ++s)
    if (!game.is_final(s)) w |= Mask{1} << s;

  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId s = 0; s < arena.num_states(); ++s) {
      if (!(w >> s & 1)) continue;
      if (!find_trap_choice(game, s, w, nullptr)) {
        w &= ~(Mask{1} << s);
        changed = true;
      }
    }
  }

  std::vector<StateId> out;
  if (witness) witness->assign(arena.num_states(), {});
  for (StateId s = 0; s < arena.num_states(); ++s) {
    if (!(w >> s & 1)) continue;
    out.push_back(s);
    if (witness) find_trap_choice(game, s, w, &(*witness)[s]);
  }
  return out;
}

}  // namespace

std::vector<StateId> cycling_states(const Game& game) {
  return cycling_fixpoint(game, nullptr);
}

CycleFreeReduction make_cycle_free(const Game& game) {
  CycleFreeReduction red;
  std::vector<std::vector<ActionId>> witness;
  red.cycling = cycling_fixpoint(game, &witness);
  red.state_map.resize(game.arena.num_states());
  for (StateId s = 0; s < game.arena.num_states(); ++s) red.state_map[s] = s;
  red.trap_choice.assign(game.arena.num_states(), {});

  red.reduced = game;
  for (StateId c : red.cycling) {
    red.trap_choice[c] = witness[c];
    for (auto& dist : red.reduced.arena.tab[c]) dist = Distribution<StateId>::dirac(c);
    red.reduced.final_state[c] = true;
    red.reduced.reward[c].assign(game.arena.num_players(), Rational(0));
  }
  return red;
}

StationaryProfile lift_profile(const StationaryProfile& reduced_profile, const CycleFreeReduction& reduction,
                               const Game& original) {
  StationaryProfile out = reduced_profile;
  for (StateId c : reduction.cycling)
    for (PlayerId i = 0; i < original.arena.num_players(); ++i)
      out.strategies[i].choice[c] = Distribution<ActionId>::dirac(reduction.trap_choice[c][i]);
  validate_profile(original, out);
  return out;
}

namespace {

struct StateProducts {
  // every product support at a state, as per-player position masks, with the
  // union of one-step successor supports precomputed
  std::vector<std::vector<unsigned>> masks;  // [product][player] bitmask over allow positions
  std::vector<Mask> successors;              // [product]
};

StateProducts enumerate_products(const Game& game, StateId s) {
  const Arena& arena = game.arena;
  int players = arena.num_players();

  std::vector<Mask> joint_supp(arena.joint_count(s));
  for (std::size_t idx = 0; idx < joint_supp.size(); ++idx) joint_supp[idx] = support_mask(arena.tab[s][idx]);

  StateProducts out;
  std::vector<unsigned> mask(players, 1);
  std::vector<unsigned> limit(players);
  for (PlayerId i = 0; i < players; ++i) limit[i] = 1u << arena.allow[s][i].size();

  std::vector<unsigned> cur(players, 1);
  // iterate every combination of non-empty per-player masks
  while (true) {
    Mask succ = 0;
    // all joint positions within the product
    std::vector<int> pos(players, -1);
    std::vector<std::vector<int>> choices(players);
    for (PlayerId i = 0; i < players; ++i)
      for (std::size_t q = 0; q < arena.allow[s][i].size(); ++q)
        if (cur[i] >> q & 1) choices[i].push_back(static_cast<int>(q));
    std::vector<std::size_t> pick(players, 0);
    while (true) {
      std::vector<int> p(players);
      for (PlayerId i = 0; i < players; ++i) p[i] = choices[i][pick[i]];
      succ |= joint_supp[arena.joint_index(s, p)];
      int j = players;
      bool done = false;
      while (j > 0) {
        --j;
        if (++pick[j] < choices[j].size()) break;
        pick[j] = 0;
        if (j == 0) done = true;
      }
      if (done) break;
    }
    out.masks.push_back(cur);
    out.successors.push_back(succ);

    int j = players;
    bool done = false;
    while (j > 0) {
      --j;
      if (++cur[j] < limit[j]) break;
      cur[j] = 1;
      if (j == 0) done = true;
    }
    if (done) break;
  }
  return out;
}

ProductSupport to_product_support(const Game& game, StateId s, const std::vector<unsigned>& mask) {
  ProductSupport ps;
  ps.per_player.resize(game.arena.num_players());
  for (PlayerId i = 0; i < game.arena.num_players(); ++i)
    for (std::size_t q = 0; q < game.arena.allow[s][i].size(); ++q)
      if (mask[i] >> q & 1) ps.per_player[i].push_back(game.arena.allow[s][i][q]);
  return ps;
}

bool mask_subset(const std::vector<unsigned>& a, const std::vector<unsigned>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

constexpr std::size_t kStabilizerComboCap = std::size_t{1} << 20;

}  // namespace

std::vector<StrongComponent> strong_components(const Game& game, int state_cap) {
  const Arena& arena = game.arena;
  int n = arena.num_states();
  if (n > state_cap)
    throw SemanticError("strong-component enumeration capped at " + std::to_string(state_cap) + " states");

  std::vector<StateProducts> products;
  products.reserve(n);
  for (StateId s = 0; s < n; ++s) products.push_back(enumerate_products(game, s));

  std::vector<StrongComponent> out;
  for (Mask c = 1; c < (Mask{1} << n); ++c) {
    // menu per member state: maximal product supports closed within C
    std::vector<StateId> members;
    for (StateId s = 0; s < n; ++s)
      if (c >> s & 1) members.push_back(s);

    std::vector<std::vector<std::size_t>> menu(members.size());
    bool viable = true;
    for (std::size_t k = 0; k < members.size() && viable; ++k) {
      StateId s = members[k];
      std::vector<std::size_t> closed;
      for (std::size_t pi = 0; pi < products[s].masks.size(); ++pi)
        if (!(products[s].successors[pi] & ~c)) closed.push_back(pi);
      for (std::size_t x : closed) {
        bool maximal = true;
        for (std::size_t y : closed)
          if (x != y && mask_subset(products[s].masks[x], products[s].masks[y]) &&
              products[s].masks[x] != products[s].masks[y])
            maximal = false;
        if (maximal) menu[k].push_back(x);
      }
      if (menu[k].empty()) viable = false;
    }
    if (!viable) continue;

    std::size_t combos = 1;
    for (const auto& m : menu) {
      if (combos > kStabilizerComboCap / m.size()) throw SemanticError("stabilizer search too large");
      combos *= m.size();
    }

    // all combinations; no early exit because every feasible support matters
    std::vector<std::set<std::size_t>> feasible(members.size());
    std::vector<std::size_t> witness_pick;
    std::vector<std::size_t> pick(members.size(), 0);
    for (std::size_t combo = 0; combo < combos; ++combo) {
      // strong connectivity over the members under the chosen supports
      bool connected = true;
      for (std::size_t from = 0; from < members.size() && connected; ++from) {
        Mask reach = Mask{1} << members[from];
        bool grew = true;
        while (grew) {
          grew = false;
          for (std::size_t k = 0; k < members.size(); ++k) {
            if (!(reach >> members[k] & 1)) continue;
            Mask succ = products[members[k]].successors[menu[k][pick[k]]];
            if (succ & ~reach) {
              reach |= succ;
              grew = true;
            }
          }
        }
        if ((reach & c) != c) connected = false;
      }
      if (connected) {
        if (witness_pick.empty()) witness_pick = pick;
        for (std::size_t k = 0; k < members.size(); ++k) feasible[k].insert(menu[k][pick[k]]);
      }
      std::size_t j = members.size();
      while (j > 0) {
        --j;
        if (++pick[j] < menu[j].size()) break;
        pick[j] = 0;
      }
    }
    if (witness_pick.empty()) continue;

    StrongComponent sc;
    sc.states = members;
    sc.stabilizers.resize(members.size());
    sc.witness.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (std::size_t pi : feasible[k])
        sc.stabilizers[k].push_back(to_product_support(game, members[k], products[members[k]].masks[pi]));
      sc.witness[k] = to_product_support(game, members[k], products[members[k]].masks[menu[k][witness_pick[k]]]);
    }
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<ExitTriple> exit_actions(const Game& game, const StrongComponent& component) {
  const Arena& arena = game.arena;
  if (component.states.empty() || component.stabilizers.size() != component.states.size())
    throw SemanticError("exit_actions: not a strong component");
  Mask c = 0;
  for (StateId s : component.states) c |= Mask{1} << s;

  std::set<ExitTriple> out;
  for (std::size_t k = 0; k < component.states.size(); ++k) {
    StateId s = component.states[k];
    for (const ProductSupport& stab : component.stabilizers[k]) {
      for (PlayerId i = 0; i < arena.num_players(); ++i) {
        for (ActionId a : arena.allow[s][i]) {
          // co-player tuples drawn from the stabilizer's supports
          std::vector<std::vector<ActionId>> options(arena.num_players());
          for (PlayerId j = 0; j < arena.num_players(); ++j)
            options[j] = (j == i) ? std::vector<ActionId>{a} : stab.per_player[j];
          std::vector<std::size_t> pick(arena.num_players(), 0);
          bool exits = false;
          while (!exits) {
            std::vector<ActionId> joint(arena.num_players());
            for (PlayerId j = 0; j < arena.num_players(); ++j) joint[j] = options[j][pick[j]];
            if (support_mask(successors(game, s, joint)) & ~c) exits = true;
            int j = arena.num_players();
            bool done = false;
            while (j > 0) {
              --j;
              if (++pick[j] < options[j].size()) break;
              pick[j] = 0;
              if (j == 0) done = true;
            }
            if (done) break;
          }
          if (exits) out.insert({a, i, s});
        }
      }
    }
  }
  return std::vector<ExitTriple>(out.begin(), out.end());
}

DeltaEpsilonSpec delta_epsilon_spec(const Game& game, const Rational& epsilon, int state_cap) {
  if (!cycling_states(game).empty()) throw SemanticError("delta_epsilon_spec requires a cycle-free game");
  Rational limit(1, static_cast<unsigned long>(game.arena.num_actions()));
  if (epsilon <= 0 || epsilon > limit)
    throw SemanticError("epsilon must lie in (0, 1/|Act|]");

  DeltaEpsilonSpec spec;
  spec.epsilon = epsilon;
  std::set<std::tuple<PlayerId, StateId, ActionId>> constraints;
  for (const StrongComponent& sc : strong_components(game, state_cap))
    for (const ExitTriple& e : exit_actions(game, sc)) constraints.insert({e.player, e.state, e.action});
  spec.constraints.assign(constraints.begin(), constraints.end());
  return spec;
}

TerminationBound termination_bound(const Game& game, const Rational& epsilon) {
  if (!cycling_states(game).empty()) throw SemanticError("termination_bound requires a cycle-free game");
  Rational limit(1, static_cast<unsigned long>(game.arena.num_actions()));
  if (epsilon <= 0 || epsilon > limit) throw SemanticError("epsilon must lie in (0, 1/|Act|]");

  Rational tau_min(1);
  for (StateId s = 0; s < game.arena.num_states(); ++s)
    for (const auto& dist : game.arena.tab[s])
      for (const auto& [target, p] : dist.entries())
        if (p < tau_min) tau_min = p;

  TerminationBound bound;
  bound.k = static_cast<unsigned>(game.arena.num_states());
  Rational base = epsilon * tau_min;
  Rational power(1);
  for (unsigned j = 0; j < bound.k; ++j) power *= base;
  bound.p = 1 - power;
  // degenerate deterministic single-action case: any p in (0,1) keeps the
  // contract valid since absorption is then certain within k steps
  if (bound.p == 0) bound.p = Rational(1, 2);
  return bound;
}

}  // namespace ideq
