#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "kbox/formula.hpp"
#include "kbox/kripke.hpp"

namespace kbox {

// Raised when a search exceeds its configured budget. Always distinct from a
// verdict: budgets never turn into wrong answers.
class ResourceLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ProverOptions {
  // Work ticks for one query: processed tableau formulas, created worlds,
  // enumerated or re-scanned types.
  std::uint64_t max_nodes = 1'000'000;
  // Cap on the subformula closure used by global consequence.
  std::size_t max_closure = 64;
};

struct Proved {
  std::uint64_t nodes_explored = 0;
};

// Countermodel certificate: a finite irreflexive intransitive tree whose root
// falsifies the formula.
struct Refuted {
  TreeModel countermodel;
  const KripkeModel::World& refuted_at() const { return countermodel.root(); }
};

using ProverVerdict = std::variant<Proved, Refuted>;

inline bool proved(const ProverVerdict& v) { return std::holds_alternative<Proved>(v); }
inline const Refuted* refutation(const ProverVerdict& v) { return std::get_if<Refuted>(&v); }

// Decides provability in K by a signed-formula tableau: classical rules are
// saturated, then every box refutation demand spawns one successor carrying
// the demand plus all box-scoped formulas. Modal depth strictly decreases
// from world to world, so the search always terminates.
ProverVerdict prove(const Formula& f, const ProverOptions& opts = {});

struct ConsequenceOptions : ProverOptions {
  // Report the least n with the boxed premise prefix proving the goal.
  // Inconclusive (capped or out of budget) leaves the depth unset; the
  // type-elimination verdict stands on its own.
  bool deduction_crosscheck = true;
  // Default cap: 2^|closure| + 1, saturated to the uint64 range.
  std::optional<std::uint64_t> deduction_cap;
};

struct Derivable {
  std::optional<unsigned> deduction_depth;
};

// Certificate: the countermodel globally validates every premise and
// falsifies the goal at `refuted_at`.
struct NotDerivable {
  KripkeModel countermodel;
  KripkeModel::World refuted_at;
};

using ConsequenceVerdict = std::variant<Derivable, NotDerivable>;

inline bool derivable(const ConsequenceVerdict& v) {
  return std::holds_alternative<Derivable>(v);
}

// Finite-premise global consequence, decided by type elimination over the
// subformula closure of premises + goal: types are the maximal
// propositionally consistent subsets containing all premises; types whose
// box refutations cannot be witnessed are deleted until a fixpoint.
ConsequenceVerdict global_consequence(const std::set<Formula>& premises, const Formula& goal,
                                      const ConsequenceOptions& opts = {});

struct RuleVerdict {
  std::optional<Formula> witness;  // a derivable conclusion, if any
  std::vector<std::pair<Formula, ConsequenceVerdict>> details;

  bool derivable() const { return witness.has_value(); }
};

// A premises/conclusions rule is derivable when some conclusion follows from
// the premises. Stops at the first witness; a negative verdict carries one
// countermodel per conclusion.
RuleVerdict derivable_rule(const std::set<Formula>& premises,
                           const std::set<Formula>& conclusions,
                           const ConsequenceOptions& opts = {});

}  // namespace kbox
