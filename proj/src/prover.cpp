#include "kbox/prover.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace kbox {

namespace {

struct Budget {
  std::uint64_t used = 0;
  std::uint64_t limit;

  explicit Budget(std::uint64_t limit) : limit(limit) {}

  void tick(std::uint64_t amount = 1) {
    used += amount;
    if (used > limit)
      throw ResourceLimitError("node budget of " + std::to_string(limit) + " exceeded");
  }
};

// ---------------------------------------------------------------------------
// Tableau

using Signed = std::pair<bool, Formula>;

// Countermodel under construction; world names are assigned once the branch
// closes successfully.
struct CounterTree {
  std::set<unsigned> atoms;
  std::vector<CounterTree> children;
};

struct WorldState {
  std::set<Signed> seen;
  std::vector<Signed> todo;
  std::map<unsigned, bool> literals;
  std::vector<Formula> box_true;
  std::vector<Formula> demands;  // one successor required per entry
};

class Tableau {
public:
  explicit Tableau(Budget& budget) : budget_(budget) {}

  // Satisfiability of a signed-formula set; returns a witnessing tree model
  // fragment or nothing when every branch closes.
  std::optional<CounterTree> solve(WorldState st) {
    while (!st.todo.empty()) {
      Signed sf = st.todo.back();
      st.todo.pop_back();
      if (!st.seen.insert(sf).second) continue;
      budget_.tick();
      const auto& [sign, f] = sf;
      switch (f.kind()) {
        case Kind::Atom: {
          auto [it, fresh] = st.literals.try_emplace(f.atom_index(), sign);
          if (!fresh && it->second != sign) return std::nullopt;
          break;
        }
        case Kind::Bottom:
          if (sign) return std::nullopt;
          break;
        case Kind::Top:
          if (!sign) return std::nullopt;
          break;
        case Kind::Not:
          st.todo.push_back({!sign, f.lhs()});
          break;
        case Kind::And:
          if (sign) {
            st.todo.push_back({true, f.lhs()});
            st.todo.push_back({true, f.rhs()});
            break;
          }
          return branch(st, {{false, f.lhs()}}, {{false, f.rhs()}});
        case Kind::Or:
          if (!sign) {
            st.todo.push_back({false, f.lhs()});
            st.todo.push_back({false, f.rhs()});
            break;
          }
          return branch(st, {{true, f.lhs()}}, {{true, f.rhs()}});
        case Kind::Implies:
          if (!sign) {
            st.todo.push_back({true, f.lhs()});
            st.todo.push_back({false, f.rhs()});
            break;
          }
          return branch(st, {{false, f.lhs()}}, {{true, f.rhs()}});
        case Kind::Iff:
          if (sign)
            return branch(st, {{true, f.lhs()}, {true, f.rhs()}},
                          {{false, f.lhs()}, {false, f.rhs()}});
          return branch(st, {{true, f.lhs()}, {false, f.rhs()}},
                        {{false, f.lhs()}, {true, f.rhs()}});
        case Kind::Box:
          (sign ? st.box_true : st.demands).push_back(f.lhs());
          break;
      }
    }
    // Propositionally saturated and open: every demand needs a successor.
    CounterTree node;
    for (const auto& [atom, value] : st.literals)
      if (value) node.atoms.insert(atom);
    for (const Formula& demand : st.demands) {
      budget_.tick();
      WorldState child;
      child.todo.push_back({false, demand});
      for (const Formula& boxed : st.box_true) child.todo.push_back({true, boxed});
      auto sub = solve(std::move(child));
      if (!sub) return std::nullopt;
      node.children.push_back(std::move(*sub));
    }
    return node;
  }

private:
  std::optional<CounterTree> branch(const WorldState& st, std::vector<Signed> first,
                                    std::vector<Signed> second) {
    WorldState left = st;
    for (auto& sf : first) left.todo.push_back(std::move(sf));
    if (auto r = solve(std::move(left))) return r;
    WorldState right = st;
    for (auto& sf : second) right.todo.push_back(std::move(sf));
    return solve(std::move(right));
  }

  Budget& budget_;
};

void build_model(const CounterTree& node, const KripkeModel::World& name,
                 std::set<KripkeModel::World>& worlds, std::set<KripkeModel::Edge>& edges,
                 std::map<KripkeModel::World, std::set<unsigned>>& val) {
  worlds.insert(name);
  val[name] = node.atoms;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    KripkeModel::World child = name + "." + std::to_string(i);
    edges.insert({name, child});
    build_model(node.children[i], child, worlds, edges, val);
  }
}

ProverVerdict prove_impl(const Formula& f, Budget& budget) {
  Tableau tableau(budget);
  WorldState root;
  root.todo.push_back({false, f});
  auto tree = tableau.solve(std::move(root));
  if (!tree) return Proved{budget.used};
  std::set<KripkeModel::World> worlds;
  std::set<KripkeModel::Edge> edges;
  std::map<KripkeModel::World, std::set<unsigned>> val;
  build_model(*tree, "w", worlds, edges, val);
  return Refuted{TreeModel(KripkeModel(worlds, edges, val), "w")};
}

}  // namespace

ProverVerdict prove(const Formula& f, const ProverOptions& opts) {
  Budget budget(opts.max_nodes);
  return prove_impl(f, budget);
}

// ---------------------------------------------------------------------------
// Type elimination

namespace {

struct TypeSpace {
  std::vector<Formula> base;               // atoms and boxes of the closure
  std::map<Formula, std::size_t> base_index;
  std::vector<std::size_t> box_positions;  // indices into base of box formulas

  bool holds(const Formula& f, std::uint64_t mask) const {
    switch (f.kind()) {
      case Kind::Atom:
      case Kind::Box:
        return (mask >> base_index.at(f)) & 1u;
      case Kind::Bottom:
        return false;
      case Kind::Top:
        return true;
      case Kind::Not:
        return !holds(f.lhs(), mask);
      case Kind::And:
        return holds(f.lhs(), mask) && holds(f.rhs(), mask);
      case Kind::Or:
        return holds(f.lhs(), mask) || holds(f.rhs(), mask);
      case Kind::Implies:
        return !holds(f.lhs(), mask) || holds(f.rhs(), mask);
      case Kind::Iff:
        return holds(f.lhs(), mask) == holds(f.rhs(), mask);
    }
    return false;
  }
};

struct TypeRow {
  std::uint64_t base_mask = 0;
  std::uint64_t boxes_true = 0;  // bit i: box_positions[i] holds
  std::uint64_t args_false = 0;  // bit i: the argument of box i fails here
  bool goal_true = false;
};

// t -> t' iff every box true in t has its argument true in t'.
bool type_edge(const TypeRow& t, const TypeRow& succ) {
  return (t.boxes_true & succ.args_false) == 0;
}

std::uint64_t default_deduction_cap(std::size_t closure_size) {
  if (closure_size >= 63) return UINT64_MAX;
  return (std::uint64_t{1} << closure_size) + 1;
}

}  // namespace

ConsequenceVerdict global_consequence(const std::set<Formula>& premises, const Formula& goal,
                                      const ConsequenceOptions& opts) {
  std::set<Formula> seeds = premises;
  seeds.insert(goal);
  std::set<Formula> closure = subformula_closure(seeds);
  if (closure.size() > opts.max_closure)
    throw ResourceLimitError("closure of " + std::to_string(closure.size()) +
                             " formulas exceeds the limit of " +
                             std::to_string(opts.max_closure));

  TypeSpace space;
  for (const Formula& f : closure) {
    if (f.kind() == Kind::Atom || f.kind() == Kind::Box) {
      space.base_index[f] = space.base.size();
      space.base.push_back(f);
    }
  }
  for (std::size_t i = 0; i < space.base.size(); ++i)
    if (space.base[i].kind() == Kind::Box) space.box_positions.push_back(i);
  if (space.base.size() > 62)
    throw ResourceLimitError("too many modal atoms for type enumeration: " +
                             std::to_string(space.base.size()));

  Budget budget(opts.max_nodes);

  std::vector<TypeRow> types;
  const std::uint64_t mask_count = std::uint64_t{1} << space.base.size();
  for (std::uint64_t mask = 0; mask < mask_count; ++mask) {
    budget.tick();
    bool keeps_premises = true;
    for (const Formula& premise : premises)
      if (!space.holds(premise, mask)) {
        keeps_premises = false;
        break;
      }
    if (!keeps_premises) continue;
    TypeRow row;
    row.base_mask = mask;
    for (std::size_t i = 0; i < space.box_positions.size(); ++i) {
      const Formula& box = space.base[space.box_positions[i]];
      if ((mask >> space.box_positions[i]) & 1u) row.boxes_true |= std::uint64_t{1} << i;
      if (!space.holds(box.lhs(), mask)) row.args_false |= std::uint64_t{1} << i;
    }
    row.goal_true = space.holds(goal, mask);
    types.push_back(row);
  }

  std::vector<char> alive(types.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t t = 0; t < types.size(); ++t) {
      if (!alive[t]) continue;
      for (std::size_t b = 0; b < space.box_positions.size(); ++b) {
        if ((types[t].boxes_true >> b) & 1u) continue;  // box holds, nothing demanded
        budget.tick();
        bool witnessed = false;
        for (std::size_t s = 0; s < types.size(); ++s) {
          if (!alive[s]) continue;
          if (type_edge(types[t], types[s]) && ((types[s].args_false >> b) & 1u)) {
            witnessed = true;
            break;
          }
        }
        if (!witnessed) {
          alive[t] = 0;
          changed = true;
          break;
        }
      }
    }
  }

  std::optional<std::size_t> witness;
  for (std::size_t t = 0; t < types.size(); ++t)
    if (alive[t] && !types[t].goal_true) {
      witness = t;
      break;
    }

  if (witness) {
    std::set<KripkeModel::World> worlds;
    std::set<KripkeModel::Edge> edges;
    std::map<KripkeModel::World, std::set<unsigned>> val;
    std::vector<std::size_t> survivors;
    for (std::size_t t = 0; t < types.size(); ++t)
      if (alive[t]) survivors.push_back(t);
    auto name = [](std::size_t t) { return "t" + std::to_string(t); };
    for (std::size_t t : survivors) {
      worlds.insert(name(t));
      std::set<unsigned> atoms;
      for (std::size_t i = 0; i < space.base.size(); ++i)
        if (space.base[i].kind() == Kind::Atom && ((types[t].base_mask >> i) & 1u))
          atoms.insert(space.base[i].atom_index());
      val[name(t)] = std::move(atoms);
    }
    for (std::size_t t : survivors)
      for (std::size_t s : survivors)
        if (type_edge(types[t], types[s])) edges.insert({name(t), name(s)});
    KripkeModel full(worlds, edges, val);
    // The forward closure of the witness is successor-closed, so truth values
    // there are unchanged; shrinking keeps certificates readable.
    KripkeModel pruned = restrict(
        full, reach(full, name(*witness), static_cast<unsigned>(full.size()), ReachMode::UpTo));
    return NotDerivable{std::move(pruned), name(*witness)};
  }

  Derivable verdict;
  if (opts.deduction_crosscheck) {
    const Formula premise_conj = conjunction(premises);
    const std::uint64_t cap =
        opts.deduction_cap.value_or(default_deduction_cap(closure.size()));
    Budget check_budget(opts.max_nodes);
    try {
      for (std::uint64_t n = 0; n <= cap; ++n) {
        Formula claim = Formula::implies(
            expand(ExpandKind::BoxLtN, static_cast<unsigned>(n), premise_conj), goal);
        if (proved(prove_impl(claim, check_budget))) {
          verdict.deduction_depth = static_cast<unsigned>(n);
          break;
        }
      }
    } catch (const ResourceLimitError&) {
      // cross-check inconclusive; the type-elimination verdict stands
    }
  }
  return verdict;
}

RuleVerdict derivable_rule(const std::set<Formula>& premises,
                           const std::set<Formula>& conclusions,
                           const ConsequenceOptions& opts) {
  if (conclusions.empty()) throw std::invalid_argument("a rule needs at least one conclusion");
  RuleVerdict verdict;
  for (const Formula& conclusion : conclusions) {
    ConsequenceVerdict cv = global_consequence(premises, conclusion, opts);
    bool hit = derivable(cv);
    verdict.details.emplace_back(conclusion, std::move(cv));
    if (hit) {
      verdict.witness = conclusion;
      break;
    }
  }
  return verdict;
}

}  // namespace kbox
