#include <doctest.h>

#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "kbox/formula.hpp"
#include "kbox/generators.hpp"
#include "support/oracle.hpp"

using namespace kbox;

namespace {

const Formula p0 = Formula::atom(0);
const Formula p1 = Formula::atom(1);
const Formula p2 = Formula::atom(2);

std::optional<std::size_t> parse_error_pos(std::string_view text) {
  try {
    (void)Formula::parse(text);
    return std::nullopt;
  } catch (const ParseError& e) {
    return e.position();
  }
}

}  // namespace

TEST_SUITE("formula") {

TEST_CASE("parse builds the documented trees") {
  CHECK(Formula::parse("p0 -> [] p0") == Formula::implies(p0, Formula::box(p0)));
  CHECK(Formula::parse("[2] false") == Formula::box(Formula::box(Formula::bottom())));
  CHECK(Formula::parse("p0 & [] p0 & [2] false") ==
        Formula::conj(Formula::conj(p0, Formula::box(p0)),
                      Formula::box(Formula::box(Formula::bottom()))));
  CHECK(Formula::parse("true") == Formula::top());
  CHECK(Formula::parse("~false") == Formula::neg(Formula::bottom()));
  CHECK(Formula::parse("  p7 ") == Formula::atom(7));
}

TEST_CASE("derived connectives expand structurally") {
  CHECK(expand(ExpandKind::BoxN, 0, p0) == p0);
  CHECK(expand(ExpandKind::BoxN, 3, p0) ==
        Formula::box(Formula::box(Formula::box(p0))));
  CHECK(expand(ExpandKind::BoxLtN, 0, p0) == Formula::top());
  CHECK(expand(ExpandKind::BoxLtN, 1, p0) == p0);
  CHECK(expand(ExpandKind::BoxLtN, 3, p0) ==
        Formula::conj(Formula::conj(p0, Formula::box(p0)),
                      Formula::box(Formula::box(p0))));
  CHECK(expand(ExpandKind::Dia, 0, p0) == Formula::neg(Formula::box(Formula::neg(p0))));
  CHECK(expand(ExpandKind::DiaN, 2, p0) ==
        Formula::neg(Formula::box(Formula::box(Formula::neg(p0)))));

  // Surface sugar lowers to the same trees.
  CHECK(Formula::parse("[<3] p0") == expand(ExpandKind::BoxLtN, 3, p0));
  CHECK(Formula::parse("[<1] p0") == p0);
  CHECK(Formula::parse("<2> p0") == expand(ExpandKind::DiaN, 2, p0));
  CHECK(Formula::parse("<> p0") == Formula::parse("<1> p0"));
  CHECK(Formula::parse("[0] p0") == p0);
  CHECK(Formula::parse("[1] p0") == Formula::box(p0));
}

TEST_CASE("precedence and associativity") {
  CHECK(Formula::parse("p0 -> p1 -> p2") ==
        Formula::implies(p0, Formula::implies(p1, p2)));
  CHECK(Formula::parse("p0 <-> p1 <-> p2") == Formula::iff(p0, Formula::iff(p1, p2)));
  CHECK(Formula::parse("p0 | p1 & p2") == Formula::disj(p0, Formula::conj(p1, p2)));
  CHECK(Formula::parse("p0 & p1 | p2") == Formula::disj(Formula::conj(p0, p1), p2));
  CHECK(Formula::parse("p0 & p1 & p2") == Formula::conj(Formula::conj(p0, p1), p2));
  CHECK(Formula::parse("p0 <-> p1 -> p2") ==
        Formula::iff(p0, Formula::implies(p1, p2)));
  CHECK(Formula::parse("~p0 & p1") == Formula::conj(Formula::neg(p0), p1));
  CHECK(Formula::parse("[] p0 -> p1") == Formula::implies(Formula::box(p0), p1));
  CHECK(Formula::parse("[] (p0 -> p1)") == Formula::box(Formula::implies(p0, p1)));
  CHECK(Formula::parse("(p0 -> p1) -> p2") ==
        Formula::implies(Formula::implies(p0, p1), p2));
  CHECK(Formula::parse("~~p0") == Formula::neg(Formula::neg(p0)));
  CHECK(Formula::parse("[]<>p0") ==
        Formula::box(Formula::neg(Formula::box(Formula::neg(p0)))));
}

TEST_CASE("parse rejects malformed input and reports positions") {
  CHECK(parse_error_pos("") == 0u);
  CHECK(parse_error_pos("p0 &") == 4u);
  CHECK(parse_error_pos("p0 p1") == 3u);
  CHECK(parse_error_pos("(p0 -> p1") == 9u);
  CHECK(parse_error_pos("foo") == 0u);
  CHECK(parse_error_pos("p") == 0u);
  CHECK(parse_error_pos("[2 p0") == 2u);
  CHECK(parse_error_pos("- p0") == 1u);
  CHECK(parse_error_pos("p0 & & p1").has_value());
  CHECK(parse_error_pos("p0 )").has_value());
  CHECK(parse_error_pos("p99999999").has_value());  // index cap
  CHECK(parse_error_pos("[9999999] p0").has_value());

  try {
    (void)Formula::parse("p0 &");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.message() == "unexpected end of input");
    CHECK(std::string(e.what()).find("position 4") != std::string::npos);
  }
}

TEST_CASE("printing uses minimal parentheses and box runs") {
  CHECK(Formula::box(p0).to_string() == "[] p0");
  CHECK(Formula::parse("p0 -> [] p0").to_string() == "p0 -> [] p0");
  CHECK(Formula::box(Formula::box(Formula::bottom())).to_string() == "[2] false");
  CHECK(Formula::neg(Formula::conj(p0, p1)).to_string() == "~(p0 & p1)");
  CHECK(Formula::neg(Formula::box(p0)).to_string() == "~[] p0");
  CHECK(Formula::box(Formula::conj(p0, p1)).to_string() == "[] (p0 & p1)");
  CHECK(Formula::implies(Formula::implies(p0, p1), p2).to_string() ==
        "(p0 -> p1) -> p2");
  CHECK(Formula::implies(p0, Formula::implies(p1, p2)).to_string() ==
        "p0 -> p1 -> p2");
  CHECK(Formula::conj(Formula::disj(p0, p1), p2).to_string() == "(p0 | p1) & p2");
  CHECK(Formula::disj(Formula::conj(p0, p1), p2).to_string() == "p0 & p1 | p2");
  CHECK(Formula::conj(p0, Formula::conj(p1, p2)).to_string() == "p0 & (p1 & p2)");
  CHECK(expand(ExpandKind::BoxLtN, 2, p0).to_string() == "p0 & [] p0");
  CHECK(print(Formula::top()) == "true");
}

TEST_CASE("parse inverts print on every small tree") {
  const auto& all = kbox::testing::formulas_up_to_depth(3, 1);
  CHECK(all.size() == 8193);  // 3 + 2*45 + 4*45^2 distinct trees of height <= 3
  unsigned mismatches = 0;
  for (const Formula& f : all)
    if (Formula::parse(f.to_string()) != f) ++mismatches;
  CHECK(mismatches == 0);
}

TEST_CASE("parse inverts print on random deep trees") {
  Rng rng(20260819);
  FormulaGenOptions opts;
  opts.max_depth = 8;
  opts.max_md = 5;
  opts.max_atoms = 3;
  unsigned mismatches = 0;
  for (int i = 0; i < 300; ++i) {
    const Formula f = random_formula(rng, opts);
    if (Formula::parse(f.to_string()) != f) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("modal degree") {
  CHECK(p0.modal_degree() == 0);
  CHECK(Formula::top().modal_degree() == 0);
  CHECK(Formula::parse("p0 -> [] (p0 | [] false)").modal_degree() == 2);
  CHECK(Formula::parse("[3] false & [] p0").modal_degree() == 3);
  CHECK(modal_degree(Formula::parse("<2> p0")) == 2);
  for (unsigned n = 0; n <= 6; ++n) {
    CHECK(expand(ExpandKind::BoxN, n, p0).modal_degree() == n);
    const Formula g = Formula::parse("p0 -> [] p1");
    CHECK(expand(ExpandKind::BoxN, n, g).modal_degree() == n + 1);
    if (n > 0) CHECK(expand(ExpandKind::BoxLtN, n, p0).modal_degree() == n - 1);
  }
}

TEST_CASE("subformula closure") {
  const Formula f = Formula::parse("p0 -> [] p0");
  const std::set<Formula> c = subformula_closure({f});
  CHECK(c.size() == 6);
  CHECK(c.count(p0) == 1);
  CHECK(c.count(Formula::box(p0)) == 1);
  CHECK(c.count(f) == 1);
  CHECK(c.count(Formula::neg(p0)) == 1);
  CHECK(c.count(Formula::neg(Formula::box(p0))) == 1);
  CHECK(c.count(Formula::neg(f)) == 1);

  // Negated members do not get double negations.
  CHECK(subformula_closure({Formula::neg(p0)}).size() == 2);
  CHECK(subformula_closure({Formula::bottom()}).size() == 2);
}

TEST_CASE("subformula closure is closed and monotone") {
  Rng rng(77001);
  FormulaGenOptions opts;
  opts.max_depth = 5;
  for (int i = 0; i < 40; ++i) {
    const Formula f = random_formula(rng, opts);
    const std::set<Formula> c = subformula_closure({f});
    unsigned escapees = 0;
    for (const Formula& m : c)
      for (const Formula& inner : subformula_closure({m}))
        if (c.count(inner) == 0) ++escapees;
    CHECK(escapees == 0);

    // Closure of a strict superformula contains the closure of the part.
    const std::set<Formula> cb = subformula_closure({Formula::box(f)});
    unsigned missing = 0;
    for (const Formula& m : c)
      if (cb.count(m) == 0) ++missing;
    CHECK(missing == 0);
  }
}

TEST_CASE("atoms_of and conjunction") {
  CHECK(atoms_of(Formula::parse("p0 & [] p2")) == std::set<unsigned>{0, 2});
  CHECK(atoms_of(Formula::parse("true -> false")).empty());
  CHECK(atoms_of(Formula::parse("p1 <-> ~p1")) == std::set<unsigned>{1});

  CHECK(conjunction({}) == Formula::top());
  CHECK(conjunction({p0}) == p0);
  CHECK(conjunction({Formula::box(p0), p0}) == Formula::conj(p0, Formula::box(p0)));
  CHECK(conjunction({Formula::bottom(), p1, p0}) ==
        Formula::conj(Formula::conj(p0, p1), Formula::bottom()));
}

TEST_CASE("hashing and ordering agree with structural equality") {
  const Formula a = Formula::parse("p0 -> [] p0");
  const Formula b = Formula::implies(p0, Formula::box(p0));
  CHECK(a.hash() == b.hash());
  CHECK(a.compare(b) == 0);
  CHECK_FALSE(a < b);
  CHECK_FALSE(b < a);
  CHECK(a != Formula::implies(Formula::box(p0), p0));

  const auto& all = kbox::testing::formulas_up_to_depth(2, 2);
  std::unordered_set<Formula, FormulaHash> dedup;
  for (const Formula& f : all) {
    dedup.insert(f);
    dedup.insert(Formula::parse(f.to_string()));
  }
  CHECK(dedup.size() == all.size());

  // compare induces a total order: exactly one of <, >, == per pair.
  unsigned violations = 0;
  for (std::size_t i = 0; i < all.size(); i += 7) {
    for (std::size_t j = 0; j < all.size(); j += 11) {
      const int c = all[i].compare(all[j]);
      const int inverse = all[j].compare(all[i]);
      if ((c == 0) != (all[i] == all[j])) ++violations;
      if ((c < 0) != (inverse > 0)) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("leaf accessors guard their preconditions") {
  CHECK_THROWS_AS((void)p0.lhs(), std::logic_error);
  CHECK_THROWS_AS((void)Formula::box(p0).rhs(), std::logic_error);
  CHECK_THROWS_AS((void)Formula::top().atom_index(), std::logic_error);
  CHECK(Formula::box(p0).lhs() == p0);
  CHECK(p0.is_leaf());
  CHECK_FALSE(Formula::box(p0).is_leaf());
}

}  // TEST_SUITE("formula")
