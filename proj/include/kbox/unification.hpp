#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "kbox/formula.hpp"
#include "kbox/kripke.hpp"
#include "kbox/prover.hpp"

namespace kbox {

// Finite map atom-index -> Formula, identity on unbound atoms. Application
// commutes with every connective. Immutable after construction; bindings that
// merely map an atom to itself are dropped.
class Substitution {
public:
  Substitution() = default;  // identity
  explicit Substitution(std::map<unsigned, Formula> bindings);

  static Substitution identity() { return Substitution(); }

  // Text format: semicolon-separated bindings `p0 := (p0 & [1] false); p2 := true`.
  // Whitespace-only input is the identity. Throws ParseError.
  static Substitution parse(std::string_view text);

  const std::map<unsigned, Formula>& bindings() const noexcept { return bindings_; }
  std::set<unsigned> bound_atoms() const;

  // Image of a single atom (the atom itself when unbound).
  Formula image(unsigned atom) const;

  std::string to_string() const;

  // Structural equality of the binding maps (not provable equivalence).
  bool operator==(const Substitution& other) const { return bindings_ == other.bindings_; }
  bool operator!=(const Substitution& other) const { return !(*this == other); }

private:
  std::map<unsigned, Formula> bindings_;
};

inline std::ostream& operator<<(std::ostream& os, const Substitution& s) {
  return os << s.to_string();
}

// Homomorphic replacement of atoms.
Formula apply(const Substitution& s, const Formula& f);

// compose(s, t)(f) = apply(s, apply(t, f)).
Substitution compose(const Substitution& s, const Substitution& t);

// Provable equivalence on each checked atom: prove(s(q) <-> t(q)) for q in
// `atoms`, defaulting to the union of the bound atoms of both sides.
bool equiv(const Substitution& s, const Substitution& t,
           const std::optional<std::set<unsigned>>& atoms = std::nullopt,
           const ProverOptions& opts = {});

// Index into the sigma family: a natural number or the top element.
class SigmaIndex {
public:
  static SigmaIndex finite(unsigned n) { return SigmaIndex(n); }
  static SigmaIndex top() { return SigmaIndex(std::nullopt); }

  bool is_top() const noexcept { return !n_.has_value(); }
  // Valid for finite indices only.
  unsigned value() const;

  std::string to_string() const { return is_top() ? "top" : std::to_string(*n_); }

  bool operator==(const SigmaIndex& other) const noexcept { return n_ == other.n_; }
  bool operator!=(const SigmaIndex& other) const noexcept { return n_ != other.n_; }
  // Finite indices in numeric order, all below top.
  bool operator<(const SigmaIndex& other) const noexcept {
    if (is_top()) return false;
    if (other.is_top()) return true;
    return *n_ < *other.n_;
  }

private:
  explicit SigmaIndex(std::optional<unsigned> n) : n_(std::move(n)) {}
  std::optional<unsigned> n_;
};

inline std::ostream& operator<<(std::ostream& os, const SigmaIndex& a) {
  return os << a.to_string();
}

// sigma(n):   p0 -> (the conjunction of the i-fold boxes of p0 for i < n) and
//             the n-fold box of false;
// sigma(top): p0 -> true.
// Identity on every other atom.
Substitution sigma(const SigmaIndex& a);

// A multiple-conclusion rule premises/conclusions.
struct Rule {
  std::set<Formula> premises;
  std::set<Formula> conclusions;
};

RuleVerdict derivable_rule(const Rule& rule, const ConsequenceOptions& opts = {});

// Verdict of is_unifier: empty failure slot means every formula's image was
// proved; otherwise the first offending formula and its countermodel.
struct UnifierCheck {
  std::optional<Formula> failed_on;
  std::optional<TreeModel> countermodel;

  bool unifies() const noexcept { return !failed_on.has_value(); }
};

UnifierCheck is_unifier(const Substitution& s, const std::set<Formula>& gamma,
                        const ProverOptions& opts = {});

// `image` is s applied to p0 -> []p0; the countermodel refutes it.
struct NotUnifier {
  Formula image;
  TreeModel countermodel;
};

// Classification of a unifier s of p0 -> []p0. Exactly one case holds:
// either s(p0) is provable (min_n empty, dominators = {top}), or min_n is the
// least n with s(p0) -> [n]false provable and dominators holds the finite
// index min_n, standing for every index >= min_n.
struct Unifier {
  std::set<SigmaIndex> dominators;
  std::optional<unsigned> min_n;

  bool top() const noexcept { return !min_n.has_value(); }
};

using UnifierClassification = std::variant<NotUnifier, Unifier>;

// Classifies s against p0 -> []p0 by its p0-image. Non-unifiers are reported
// with the refuting countermodel; unifiers fall into exactly one of the two
// Unifier cases, with min_n found by ascending search bounded by the modal
// degree of s(p0).
UnifierClassification classify_unifier(const Substitution& s, const ProverOptions& opts = {});

// Raised when weak_margins is called on a formula f with f -> []f not
// provable; carries the countermodel.
class MarginPreconditionError : public std::runtime_error {
public:
  MarginPreconditionError(const std::string& message, TreeModel countermodel);

  const TreeModel& countermodel() const noexcept { return countermodel_; }

private:
  TreeModel countermodel_;
};

struct Provable {};
struct ImpliesBoxBot {
  unsigned n;
};

using MarginsVerdict = std::variant<Provable, ImpliesBoxBot>;

// Weak rule of margins: given that f -> []f is provable, either f itself is
// provable or f -> [n]false is, for some n bounded by the modal degree of f.
// Returns which disjunct holds (least such n in the second case).
MarginsVerdict weak_margins(const Formula& f, const ProverOptions& opts = {});

// Evidence that the sigma chain is strictly ascending and lies strictly below
// no common upper sigma: at level n the four certificates are
//   strict_step:      sigma_n(p0) -> [n+1]false   expected Proved
//   no_collapse:      sigma_{n+1}(p0) -> [n]false expected Refuted
//   sigma_provable:   sigma_n(p0)                 expected Refuted
//   box_bot_provable: [n]false                    expected Refuted
// The last two separate sigma_n from sigma_top in both directions.
struct ChainReport {
  unsigned level = 0;
  ProverVerdict strict_step;
  ProverVerdict no_collapse;
  ProverVerdict sigma_provable;
  ProverVerdict box_bot_provable;

  bool passed() const;
  // What the four certificates do and do not establish.
  std::string narrative() const;
};

ChainReport chain_check(unsigned n, const ProverOptions& opts = {});

// Raised by operations whose precondition is that a substitution unifies the
// given set; carries the formula whose image failed and the countermodel.
class NotAUnifierError : public std::runtime_error {
public:
  NotAUnifierError(const std::string& message, Formula failed_on, TreeModel countermodel);

  const Formula& failed_on() const noexcept { return failed_on_; }
  const TreeModel& countermodel() const noexcept { return countermodel_; }

private:
  Formula failed_on_;
  TreeModel countermodel_;
};

// Per-atom record: the global-consequence verdict for q <-> s(q) from gamma.
struct ProjectivityReport {
  bool projective = false;
  std::vector<std::pair<unsigned, ConsequenceVerdict>> checks;
};

// s must unify gamma (NotAUnifierError otherwise). Projective means gamma
// globally entails q <-> s(q) for every atom occurring in gamma or bound by
// s; the report stops at the first failing atom.
ProjectivityReport is_projective(const std::set<Formula>& gamma, const Substitution& s,
                                 const ConsequenceOptions& opts = {});

// Searches for a formula psi witnessing that s is not exact for gamma: a
// mismatch between gamma globally entailing psi and s(psi) being provable.
// Probes are p0 -> [k]false for k = 0..bound (default bound: modal degree of
// s(p0) plus one), then p0, then the caller's extras, in that order. Returns
// the first mismatch, or nothing if every probe agrees. s must unify gamma
// (NotAUnifierError otherwise).
std::optional<Formula> exactness_refute(const std::set<Formula>& gamma, const Substitution& s,
                                        std::optional<unsigned> probe_bound = std::nullopt,
                                        const std::vector<Formula>& extras = {},
                                        const ConsequenceOptions& opts = {});

// Dual evidence that the rule p0 -> []p0 / delta is (or is not) admissible:
// (a) some member of delta is globally derivable from p0 -> []p0;
// (b) every sigma(alpha) for alpha in {0..n, top}, n = 1 + the largest modal
//     degree in delta, unifies some member of delta.
// The two computations are independent and must agree; `admissible()` reports
// (a), `consistent()` flags any disagreement as an internal failure.
struct AdmissibilityReport {
  struct AlphaCheck {
    SigmaIndex alpha;
    std::optional<Formula> unified;  // the first member sigma(alpha) unifies
  };

  bool derivability_evidence = false;             // (a)
  std::optional<Formula> derivability_witness;    // member witnessing (a)
  bool semantic_evidence = false;                 // (b)
  unsigned stabilization_bound = 0;               // the n above
  std::vector<AlphaCheck> alpha_checks;

  bool admissible() const noexcept { return derivability_evidence; }
  bool consistent() const noexcept { return derivability_evidence == semantic_evidence; }
};

AdmissibilityReport margin_rule_admissible(const std::set<Formula>& delta,
                                           const ConsequenceOptions& opts = {});

}  // namespace kbox
