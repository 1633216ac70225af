#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kbox/formula.hpp"

namespace kbox {

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Finite Kripke model: worlds, accessibility edges, atom valuation. Immutable
// after construction; all operations below are pure functions over it.
// Models are never empty.
class KripkeModel {
public:
  using World = std::string;
  using Edge = std::pair<World, World>;

  KripkeModel(const std::set<World>& worlds, const std::set<Edge>& edges,
              const std::map<World, std::set<unsigned>>& valuation);

  const std::vector<World>& worlds() const noexcept { return worlds_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return worlds_.size(); }

  bool has_world(const World& w) const;
  const std::vector<World>& successors(const World& w) const;
  const std::set<unsigned>& atoms_at(const World& w) const;
  bool atom_true(const World& w, unsigned atom) const;

  // Identity of worlds, edges, and valuations.
  bool operator==(const KripkeModel& other) const;
  bool operator!=(const KripkeModel& other) const { return !(*this == other); }

private:
  const std::vector<World>& checked(const World& w) const;

  std::vector<World> worlds_;  // sorted, unique
  std::vector<Edge> edges_;    // sorted, unique
  std::map<World, std::set<unsigned>> val_;    // entry for every world
  std::map<World, std::vector<World>> succ_;   // entry for every world
};

// Total map from the worlds of a source model into a target model.
struct WorldMap {
  std::map<KripkeModel::World, KripkeModel::World> mapping;
};

// A Kripke model whose relation is a finite irreflexive intransitive tree
// rooted at `root`, edges oriented away from the root. Construction verifies
// the shape and records root distances.
class TreeModel {
public:
  TreeModel(KripkeModel model, KripkeModel::World root);

  const KripkeModel& model() const noexcept { return model_; }
  const KripkeModel::World& root() const noexcept { return root_; }
  unsigned depth_of(const KripkeModel::World& w) const;
  unsigned height() const noexcept { return height_; }

  bool operator==(const TreeModel& other) const {
    return root_ == other.root_ && model_ == other.model_;
  }

private:
  KripkeModel model_;
  KripkeModel::World root_;
  std::map<KripkeModel::World, unsigned> depth_;
  unsigned height_ = 0;
};

// Truth at a world, by the usual recursive clauses; box quantifies over
// successors. Throws ModelError on an unknown world.
bool eval(const KripkeModel& m, const KripkeModel::World& w, const Formula& f);

bool globally_valid(const KripkeModel& m, const Formula& f);

enum class ReachMode { Exact, UpTo };

// Worlds reachable from x in exactly n steps (Exact) or at most n (UpTo);
// n = 0 reaches only x itself.
std::set<KripkeModel::World> reach(const KripkeModel& m, const KripkeModel::World& x,
                                   unsigned n, ReachMode mode);

// Submodel on ws: edges and valuations restricted pointwise.
// Requires ws to be a nonempty subset of m's worlds.
KripkeModel restrict(const KripkeModel& m, const std::set<KripkeModel::World>& ws);

struct Unraveling {
  TreeModel tree;
  WorldMap back;  // tree world -> source world (last path component)
};

// Tree of all paths from x with at most `depth` edges. Tree worlds are
// path-encoded ("x0/x1/x2", components escaped); each path inherits the
// valuation of its endpoint, and `back` sends it to that endpoint.
Unraveling unravel(const KripkeModel& m, const KripkeModel::World& x, unsigned depth);

// Keeps exactly the worlds at root distance < n. n = 0 is rejected: models
// must stay nonempty.
TreeModel truncate(const TreeModel& t, unsigned n);

// Disjoint union of f and g plus the single edge from -> to. Worlds of f keep
// their identifiers; worlds of g are prefixed with a fresh "g:" tag.
KripkeModel graft(const KripkeModel& f, const KripkeModel& g,
                  const KripkeModel::World& from, const KripkeModel::World& to);

// Forth condition, back condition, and atom agreement. Requires map to be
// total on src's worlds with image inside dst.
bool is_p_morphism(const WorldMap& map, const KripkeModel& src, const KripkeModel& dst);

// True iff the two models restricted to their n-step neighborhoods of x are
// identical (worlds, edges, atoms). x must be a world of both.
bool agree_up_to(const KripkeModel& m1, const KripkeModel::World& x,
                 const KripkeModel& m2, unsigned n);

}  // namespace kbox
