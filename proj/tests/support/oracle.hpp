#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "kbox/formula.hpp"
#include "kbox/kripke.hpp"

namespace kbox::testing {

// A miniature Kripke model over at most three worlds, stored as adjacency and
// valuation bitmasks.  Deliberately shares no representation with KripkeModel
// so it can serve as independent ground truth.
struct TinyModel {
  unsigned size = 1;                   // number of worlds, 1..3
  std::array<std::uint8_t, 3> succ{};  // succ[i] bit j set: edge i -> j
  std::array<std::uint8_t, 3> val{};   // val[i] bit a set: atom a true at i
};

// Plain recursive truth evaluation on a TinyModel.
bool tiny_eval(const TinyModel& m, unsigned world, const Formula& f);

// Every model with 1..3 worlds over atoms p0..p(atoms-1); atoms must be 1 or 2.
// The result is cached, so repeated calls are cheap.
const std::vector<TinyModel>& tiny_models(unsigned atoms);

// True iff f holds at every world of every tiny model: a small-model validity
// oracle (complete for refutations that fit in three worlds).
bool tiny_valid(const Formula& f, unsigned atoms);

// Searches the tiny models for one where every premise holds at every world
// while the goal fails somewhere; returns the model and a refuting world.
std::optional<std::pair<TinyModel, unsigned>> tiny_global_countermodel(
    const std::set<Formula>& premises, const Formula& goal, unsigned atoms);

// Plain recursive evaluation over a full KripkeModel, written independently of
// the labelling-based evaluator in the library.
bool slow_eval(const KripkeModel& m, const KripkeModel::World& w, const Formula& f);

// Bridges a TinyModel into the library representation; world i becomes "u<i>".
KripkeModel to_kripke(const TinyModel& m);

// All distinct formula ASTs of height <= depth over atoms p0..p(atoms-1).
// Height counts every node: atoms and constants have height 1.
std::vector<Formula> formulas_up_to_depth(unsigned depth, unsigned atoms);

}  // namespace kbox::testing
