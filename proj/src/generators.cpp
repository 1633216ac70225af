#include "kbox/generators.hpp"

namespace kbox {

KripkeModel random_model(Rng& rng, const ModelGenOptions& opts) {
  const unsigned count = 1 + static_cast<unsigned>(rng.below(opts.max_worlds));
  std::set<KripkeModel::World> worlds;
  std::vector<KripkeModel::World> names;
  for (unsigned i = 0; i < count; ++i) {
    names.push_back("w" + std::to_string(i));
    worlds.insert(names.back());
  }
  std::set<KripkeModel::Edge> edges;
  for (const auto& a : names)
    for (const auto& b : names)
      if (rng.percent(opts.edge_percent)) edges.insert({a, b});
  std::map<KripkeModel::World, std::set<unsigned>> val;
  for (const auto& w : names) {
    std::set<unsigned> atoms;
    for (unsigned a = 0; a < opts.max_atoms; ++a)
      if (rng.percent(50)) atoms.insert(a);
    val[w] = std::move(atoms);
  }
  return KripkeModel(worlds, edges, val);
}

namespace {

Formula random_leaf(Rng& rng, unsigned max_atoms) {
  // Atoms twice as likely as either constant.
  const std::uint64_t pick = rng.below(max_atoms > 0 ? 4 : 2);
  if (max_atoms > 0 && pick < 2) return Formula::atom(static_cast<unsigned>(rng.below(max_atoms)));
  return pick % 2 == 0 ? Formula::top() : Formula::bottom();
}

Formula random_formula_rec(Rng& rng, unsigned depth, unsigned md, unsigned max_atoms) {
  if (depth <= 1) return random_leaf(rng, max_atoms);
  // 0 leaf, 1 not, 2 box (when modal budget remains), 3..6 binary.
  const std::uint64_t pick = rng.below(md > 0 ? 7 : 6);
  switch (pick) {
    case 0:
      return random_leaf(rng, max_atoms);
    case 1:
      return Formula::neg(random_formula_rec(rng, depth - 1, md, max_atoms));
    case 2:
      if (md > 0) return Formula::box(random_formula_rec(rng, depth - 1, md - 1, max_atoms));
      return Formula::conj(random_formula_rec(rng, depth - 1, md, max_atoms),
                           random_formula_rec(rng, depth - 1, md, max_atoms));
    case 3:
      return Formula::conj(random_formula_rec(rng, depth - 1, md, max_atoms),
                           random_formula_rec(rng, depth - 1, md, max_atoms));
    case 4:
      return Formula::disj(random_formula_rec(rng, depth - 1, md, max_atoms),
                           random_formula_rec(rng, depth - 1, md, max_atoms));
    case 5:
      return Formula::implies(random_formula_rec(rng, depth - 1, md, max_atoms),
                              random_formula_rec(rng, depth - 1, md, max_atoms));
    default:
      return Formula::iff(random_formula_rec(rng, depth - 1, md, max_atoms),
                          random_formula_rec(rng, depth - 1, md, max_atoms));
  }
}

}  // namespace

Formula random_formula(Rng& rng, const FormulaGenOptions& opts) {
  return random_formula_rec(rng, opts.max_depth == 0 ? 1 : opts.max_depth, opts.max_md,
                            opts.max_atoms);
}

Substitution random_substitution(Rng& rng, const SubstitutionGenOptions& opts) {
  std::map<unsigned, Formula> bindings;
  for (unsigned a = 0; a < opts.max_bound_atoms; ++a)
    if (rng.percent(opts.bind_percent)) bindings.emplace(a, random_formula(rng, opts.image));
  return Substitution(std::move(bindings));
}

}  // namespace kbox
