#include "kbox/unification.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace kbox {

// ---------------------------------------------------------------------------
// Substitution

Substitution::Substitution(std::map<unsigned, Formula> bindings) {
  for (auto& [atom, image] : bindings) {
    if (image.kind() == Kind::Atom && image.atom_index() == atom) continue;
    bindings_.emplace(atom, std::move(image));
  }
}

std::set<unsigned> Substitution::bound_atoms() const {
  std::set<unsigned> out;
  for (const auto& [atom, image] : bindings_) out.insert(atom);
  return out;
}

Formula Substitution::image(unsigned atom) const {
  auto it = bindings_.find(atom);
  return it == bindings_.end() ? Formula::atom(atom) : it->second;
}

std::string Substitution::to_string() const {
  std::string out;
  for (const auto& [atom, image] : bindings_) {
    if (!out.empty()) out += "; ";
    out += "p" + std::to_string(atom) + " := " + image.to_string();
  }
  return out;
}

namespace {

bool blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

Substitution Substitution::parse(std::string_view text) {
  std::map<unsigned, Formula> bindings;
  if (blank(text)) return Substitution();
  std::size_t pos = 0;
  while (true) {
    std::size_t semi = text.find(';', pos);
    const std::size_t end = semi == std::string_view::npos ? text.size() : semi;
    std::size_t i = pos;
    auto skip_space = [&] {
      while (i < end && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_space();
    if (i == end) throw ParseError("empty binding", i);
    if (text[i] != 'p') throw ParseError("expected an atom binding 'p<digits> := FORMULA'", i);
    const std::size_t atom_start = i++;
    if (i == end || !std::isdigit(static_cast<unsigned char>(text[i])))
      throw ParseError("expected digits after 'p'", i);
    unsigned long atom = 0;
    while (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) {
      atom = atom * 10 + static_cast<unsigned long>(text[i] - '0');
      if (atom > 1'000'000) throw ParseError("atom index too large", atom_start);
      ++i;
    }
    skip_space();
    if (i + 2 > end || text.substr(i, 2) != ":=") throw ParseError("expected ':='", i);
    i += 2;
    if (blank(text.substr(i, end - i))) throw ParseError("missing formula after ':='", i);
    Formula image = Formula::bottom();
    try {
      image = Formula::parse(text.substr(i, end - i));
    } catch (const ParseError& e) {
      throw ParseError(e.message(), i + e.position());
    }
    if (!bindings.emplace(static_cast<unsigned>(atom), image).second)
      throw ParseError("duplicate binding for p" + std::to_string(atom), atom_start);
    if (semi == std::string_view::npos) break;
    pos = semi + 1;
    if (blank(text.substr(pos))) break;  // tolerate a trailing semicolon
  }
  return Substitution(std::move(bindings));
}

namespace {

Formula apply_memo(const Substitution& s, const Formula& f, std::map<Formula, Formula>& memo) {
  switch (f.kind()) {
    case Kind::Atom:
      return s.image(f.atom_index());
    case Kind::Bottom:
    case Kind::Top:
      return f;
    default:
      break;
  }
  auto it = memo.find(f);
  if (it != memo.end()) return it->second;
  Formula out = Formula::bottom();
  switch (f.kind()) {
    case Kind::Not:
      out = Formula::neg(apply_memo(s, f.lhs(), memo));
      break;
    case Kind::Box:
      out = Formula::box(apply_memo(s, f.lhs(), memo));
      break;
    case Kind::And:
      out = Formula::conj(apply_memo(s, f.lhs(), memo), apply_memo(s, f.rhs(), memo));
      break;
    case Kind::Or:
      out = Formula::disj(apply_memo(s, f.lhs(), memo), apply_memo(s, f.rhs(), memo));
      break;
    case Kind::Implies:
      out = Formula::implies(apply_memo(s, f.lhs(), memo), apply_memo(s, f.rhs(), memo));
      break;
    case Kind::Iff:
      out = Formula::iff(apply_memo(s, f.lhs(), memo), apply_memo(s, f.rhs(), memo));
      break;
    default:
      break;
  }
  memo.emplace(f, out);
  return out;
}

}  // namespace

Formula apply(const Substitution& s, const Formula& f) {
  std::map<Formula, Formula> memo;
  return apply_memo(s, f, memo);
}

Substitution compose(const Substitution& s, const Substitution& t) {
  std::map<unsigned, Formula> bindings;
  for (const auto& [atom, image] : t.bindings()) bindings.emplace(atom, apply(s, image));
  // Atoms untouched by t pass straight through to s.
  for (const auto& [atom, image] : s.bindings()) bindings.emplace(atom, image);
  return Substitution(std::move(bindings));
}

bool equiv(const Substitution& s, const Substitution& t,
           const std::optional<std::set<unsigned>>& atoms, const ProverOptions& opts) {
  std::set<unsigned> check;
  if (atoms) {
    check = *atoms;
  } else {
    check = s.bound_atoms();
    check.merge(t.bound_atoms());
  }
  for (unsigned q : check)
    if (!proved(prove(Formula::iff(s.image(q), t.image(q)), opts))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// The sigma family

unsigned SigmaIndex::value() const {
  if (is_top()) throw std::logic_error("SigmaIndex::value() on the top index");
  return *n_;
}

Substitution sigma(const SigmaIndex& a) {
  Formula image = Formula::top();
  if (!a.is_top()) {
    const unsigned n = a.value();
    image = Formula::conj(expand(ExpandKind::BoxLtN, n, Formula::atom(0)),
                          expand(ExpandKind::BoxN, n, Formula::bottom()));
  }
  return Substitution({{0, image}});
}

RuleVerdict derivable_rule(const Rule& rule, const ConsequenceOptions& opts) {
  return derivable_rule(rule.premises, rule.conclusions, opts);
}

// ---------------------------------------------------------------------------
// Unifier checks and classification

UnifierCheck is_unifier(const Substitution& s, const std::set<Formula>& gamma,
                        const ProverOptions& opts) {
  for (const Formula& f : gamma) {
    ProverVerdict verdict = prove(apply(s, f), opts);
    if (const Refuted* r = refutation(verdict)) return {f, r->countermodel};
  }
  return {};
}

namespace {

Formula margin_formula() {
  return Formula::implies(Formula::atom(0), Formula::box(Formula::atom(0)));
}

Formula box_bot(unsigned n) { return expand(ExpandKind::BoxN, n, Formula::bottom()); }

}  // namespace

UnifierClassification classify_unifier(const Substitution& s, const ProverOptions& opts) {
  const Formula image = apply(s, margin_formula());
  ProverVerdict base = prove(image, opts);
  if (const Refuted* r = refutation(base)) return NotUnifier{image, r->countermodel};

  const Formula sp = s.image(0);
  if (proved(prove(sp, opts))) return Unifier{{SigmaIndex::top()}, std::nullopt};
  for (unsigned n = 0; n <= sp.modal_degree(); ++n)
    if (proved(prove(Formula::implies(sp, box_bot(n)), opts)))
      return Unifier{{SigmaIndex::finite(n)}, n};
  // Weak margins bounds min_n by the modal degree for any unifier.
  throw std::logic_error("verified unifier escaped the weak-margins bound");
}

MarginPreconditionError::MarginPreconditionError(const std::string& message,
                                                 TreeModel countermodel)
    : std::runtime_error(message), countermodel_(std::move(countermodel)) {}

MarginsVerdict weak_margins(const Formula& f, const ProverOptions& opts) {
  ProverVerdict pre = prove(Formula::implies(f, Formula::box(f)), opts);
  if (const Refuted* r = refutation(pre))
    throw MarginPreconditionError("weak_margins requires f -> []f to be provable; got f = " +
                                      f.to_string(),
                                  r->countermodel);
  if (proved(prove(f, opts))) return Provable{};
  for (unsigned n = 0; n <= f.modal_degree(); ++n)
    if (proved(prove(Formula::implies(f, box_bot(n)), opts))) return ImpliesBoxBot{n};
  throw std::logic_error("weak-margins disjunction failed within the modal-degree bound");
}

// ---------------------------------------------------------------------------
// The nullary-type chain

ChainReport chain_check(unsigned n, const ProverOptions& opts) {
  const Formula p = Formula::atom(0);
  const Formula sig_n = apply(sigma(SigmaIndex::finite(n)), p);
  const Formula sig_next = apply(sigma(SigmaIndex::finite(n + 1)), p);
  ChainReport report;
  report.level = n;
  report.strict_step = prove(Formula::implies(sig_n, box_bot(n + 1)), opts);
  report.no_collapse = prove(Formula::implies(sig_next, box_bot(n)), opts);
  report.sigma_provable = prove(sig_n, opts);
  report.box_bot_provable = prove(box_bot(n), opts);
  return report;
}

bool ChainReport::passed() const {
  return proved(strict_step) && !proved(no_collapse) && !proved(sigma_provable) &&
         !proved(box_bot_provable);
}

std::string ChainReport::narrative() const {
  std::ostringstream os;
  os << "Level " << level << ": sigma_" << level << " composes through sigma_" << level + 1
     << " (its p0-image proves the " << level + 1 << "-fold box of false) while sigma_"
     << level + 1 << " does not compose back, so sigma_" << level
     << " is strictly less general; and sigma_" << level
     << " is incomparable with sigma_top in both directions. These four certificates are "
        "finite evidence for one step of an infinite strictly ascending chain with no "
        "maximal element above it in the quotient poset of unifiers of p0 -> []p0; they do "
        "not by themselves prove the order-theoretic statement for all levels.";
  return os.str();
}

// ---------------------------------------------------------------------------
// Projectivity, exactness, admissibility

NotAUnifierError::NotAUnifierError(const std::string& message, Formula failed_on,
                                   TreeModel countermodel)
    : std::runtime_error(message + "; the image of " + failed_on.to_string() +
                         " is not provable"),
      failed_on_(std::move(failed_on)),
      countermodel_(std::move(countermodel)) {}

ProjectivityReport is_projective(const std::set<Formula>& gamma, const Substitution& s,
                                 const ConsequenceOptions& opts) {
  UnifierCheck check = is_unifier(s, gamma, opts);
  if (!check.unifies())
    throw NotAUnifierError("is_projective requires a unifier of gamma", *check.failed_on,
                           *check.countermodel);
  std::set<unsigned> atoms = s.bound_atoms();
  for (const Formula& f : gamma) atoms.merge(atoms_of(f));
  ProjectivityReport report;
  report.projective = true;
  for (unsigned q : atoms) {
    ConsequenceVerdict verdict =
        global_consequence(gamma, Formula::iff(Formula::atom(q), s.image(q)), opts);
    const bool ok = derivable(verdict);
    report.checks.emplace_back(q, std::move(verdict));
    if (!ok) {
      report.projective = false;
      break;
    }
  }
  return report;
}

std::optional<Formula> exactness_refute(const std::set<Formula>& gamma, const Substitution& s,
                                        std::optional<unsigned> probe_bound,
                                        const std::vector<Formula>& extras,
                                        const ConsequenceOptions& opts) {
  UnifierCheck check = is_unifier(s, gamma, opts);
  if (!check.unifies())
    throw NotAUnifierError("exactness_refute requires a unifier of gamma", *check.failed_on,
                           *check.countermodel);
  const Formula p = Formula::atom(0);
  const unsigned bound = probe_bound.value_or(s.image(0).modal_degree() + 1);
  std::vector<Formula> probes;
  for (unsigned k = 0; k <= bound; ++k) probes.push_back(Formula::implies(p, box_bot(k)));
  probes.push_back(p);
  probes.insert(probes.end(), extras.begin(), extras.end());
  for (const Formula& psi : probes) {
    const bool entailed = derivable(global_consequence(gamma, psi, opts));
    const bool image_proved = proved(prove(apply(s, psi), opts));
    if (entailed != image_proved) return psi;
  }
  return std::nullopt;
}

AdmissibilityReport margin_rule_admissible(const std::set<Formula>& delta,
                                           const ConsequenceOptions& opts) {
  if (delta.empty())
    throw std::invalid_argument("margin_rule_admissible needs a nonempty conclusion set");
  AdmissibilityReport report;
  const std::set<Formula> premises{margin_formula()};
  for (const Formula& psi : delta) {
    if (derivable(global_consequence(premises, psi, opts))) {
      report.derivability_evidence = true;
      report.derivability_witness = psi;
      break;
    }
  }
  unsigned max_md = 0;
  for (const Formula& psi : delta) max_md = std::max(max_md, psi.modal_degree());
  report.stabilization_bound = max_md + 1;
  std::vector<SigmaIndex> alphas;
  for (unsigned k = 0; k <= report.stabilization_bound; ++k)
    alphas.push_back(SigmaIndex::finite(k));
  alphas.push_back(SigmaIndex::top());
  report.semantic_evidence = true;
  for (const SigmaIndex& alpha : alphas) {
    const Substitution sub = sigma(alpha);
    AdmissibilityReport::AlphaCheck check{alpha, std::nullopt};
    for (const Formula& psi : delta) {
      if (proved(prove(apply(sub, psi), opts))) {
        check.unified = psi;
        break;
      }
    }
    if (!check.unified) report.semantic_evidence = false;
    report.alpha_checks.push_back(std::move(check));
  }
  return report;
}

}  // namespace kbox
