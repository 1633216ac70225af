#include "kbox/kripke.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace kbox {

KripkeModel::KripkeModel(const std::set<World>& worlds, const std::set<Edge>& edges,
                         const std::map<World, std::set<unsigned>>& valuation) {
  if (worlds.empty()) throw ModelError("a Kripke model must have at least one world");
  worlds_.assign(worlds.begin(), worlds.end());
  for (const Edge& e : edges) {
    if (!worlds.count(e.first) || !worlds.count(e.second))
      throw ModelError("edge endpoint '" + e.first + "' -> '" + e.second +
                       "' is not among the worlds");
  }
  edges_.assign(edges.begin(), edges.end());
  for (const auto& [w, atoms] : valuation) {
    if (!worlds.count(w)) throw ModelError("valuation mentions unknown world '" + w + "'");
    (void)atoms;
  }
  for (const World& w : worlds_) {
    auto it = valuation.find(w);
    val_[w] = it == valuation.end() ? std::set<unsigned>{} : it->second;
    succ_[w] = {};
  }
  for (const Edge& e : edges_) succ_[e.first].push_back(e.second);
}

const std::vector<KripkeModel::World>& KripkeModel::checked(const World& w) const {
  auto it = succ_.find(w);
  if (it == succ_.end()) throw ModelError("unknown world '" + w + "'");
  return it->second;
}

bool KripkeModel::has_world(const World& w) const { return succ_.count(w) != 0; }

const std::vector<KripkeModel::World>& KripkeModel::successors(const World& w) const {
  return checked(w);
}

const std::set<unsigned>& KripkeModel::atoms_at(const World& w) const {
  checked(w);
  return val_.at(w);
}

bool KripkeModel::atom_true(const World& w, unsigned atom) const {
  return atoms_at(w).count(atom) != 0;
}

bool KripkeModel::operator==(const KripkeModel& other) const {
  return worlds_ == other.worlds_ && edges_ == other.edges_ && val_ == other.val_;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Computes the truth set of each subformula over the whole model, memoized.
// Keeps eval linear in |model| x |formula| even on large unravelings.
class Labeler {
public:
  explicit Labeler(const KripkeModel& m) : m_(m) {
    const auto& ws = m.worlds();
    for (std::size_t i = 0; i < ws.size(); ++i) index_[ws[i]] = i;
    succ_.resize(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
      for (const auto& s : m.successors(ws[i])) succ_[i].push_back(index_.at(s));
  }

  const std::vector<char>& truth(const Formula& f) {
    auto it = cache_.find(f);
    if (it != cache_.end()) return it->second;
    std::vector<char> row(m_.size(), 0);
    switch (f.kind()) {
      case Kind::Atom: {
        unsigned a = f.atom_index();
        for (std::size_t i = 0; i < m_.size(); ++i)
          row[i] = m_.atoms_at(m_.worlds()[i]).count(a) ? 1 : 0;
        break;
      }
      case Kind::Bottom:
        break;
      case Kind::Top:
        std::fill(row.begin(), row.end(), 1);
        break;
      case Kind::Not: {
        const auto& sub = truth(f.lhs());
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = !sub[i];
        break;
      }
      case Kind::Box: {
        const auto& sub = truth(f.lhs());
        for (std::size_t i = 0; i < row.size(); ++i) {
          row[i] = 1;
          for (std::size_t s : succ_[i])
            if (!sub[s]) {
              row[i] = 0;
              break;
            }
        }
        break;
      }
      default: {
        const auto& l = truth(f.lhs());
        const auto& r = truth(f.rhs());
        for (std::size_t i = 0; i < row.size(); ++i) {
          switch (f.kind()) {
            case Kind::And: row[i] = l[i] && r[i]; break;
            case Kind::Or: row[i] = l[i] || r[i]; break;
            case Kind::Implies: row[i] = !l[i] || r[i]; break;
            default: row[i] = l[i] == r[i]; break;  // Iff
          }
        }
        break;
      }
    }
    return cache_.emplace(f, std::move(row)).first->second;
  }

  std::size_t index_of(const KripkeModel::World& w) const { return index_.at(w); }

private:
  const KripkeModel& m_;
  std::unordered_map<KripkeModel::World, std::size_t> index_;
  std::vector<std::vector<std::size_t>> succ_;
  std::map<Formula, std::vector<char>> cache_;
};

}  // namespace

bool eval(const KripkeModel& m, const KripkeModel::World& w, const Formula& f) {
  if (!m.has_world(w)) throw ModelError("unknown world '" + w + "'");
  Labeler lab(m);
  return lab.truth(f)[lab.index_of(w)] != 0;
}

bool globally_valid(const KripkeModel& m, const Formula& f) {
  Labeler lab(m);
  const auto& row = lab.truth(f);
  return std::all_of(row.begin(), row.end(), [](char c) { return c != 0; });
}

// ---------------------------------------------------------------------------
// Reach / restrict

std::set<KripkeModel::World> reach(const KripkeModel& m, const KripkeModel::World& x,
                                   unsigned n, ReachMode mode) {
  if (!m.has_world(x)) throw ModelError("unknown world '" + x + "'");
  std::set<KripkeModel::World> frontier{x};
  std::set<KripkeModel::World> acc{x};
  for (unsigned i = 0; i < n; ++i) {
    std::set<KripkeModel::World> next;
    for (const auto& w : frontier)
      for (const auto& s : m.successors(w)) next.insert(s);
    frontier = std::move(next);
    if (mode == ReachMode::UpTo) acc.insert(frontier.begin(), frontier.end());
    if (frontier.empty()) break;
  }
  return mode == ReachMode::Exact ? frontier : acc;
}

KripkeModel restrict(const KripkeModel& m, const std::set<KripkeModel::World>& ws) {
  for (const auto& w : ws)
    if (!m.has_world(w)) throw ModelError("restriction world '" + w + "' not in the model");
  std::set<KripkeModel::Edge> edges;
  for (const auto& e : m.edges())
    if (ws.count(e.first) && ws.count(e.second)) edges.insert(e);
  std::map<KripkeModel::World, std::set<unsigned>> val;
  for (const auto& w : ws) val[w] = m.atoms_at(w);
  return KripkeModel(ws, edges, val);
}

// ---------------------------------------------------------------------------
// Tree models

TreeModel::TreeModel(KripkeModel model, KripkeModel::World root)
    : model_(std::move(model)), root_(std::move(root)) {
  if (!model_.has_world(root_)) throw ModelError("root '" + root_ + "' is not a world");
  std::map<KripkeModel::World, unsigned> indeg;
  for (const auto& w : model_.worlds()) indeg[w] = 0;
  for (const auto& e : model_.edges()) {
    if (e.first == e.second) throw ModelError("tree model has a self-loop at '" + e.first + "'");
    ++indeg[e.second];
  }
  if (indeg[root_] != 0) throw ModelError("tree root '" + root_ + "' has a parent");
  for (const auto& [w, d] : indeg)
    if (w != root_ && d != 1)
      throw ModelError("world '" + w + "' has in-degree " + std::to_string(d) +
                       "; a tree needs exactly one parent per non-root world");
  // unique parents + full reachability from the root make the edge set a tree
  std::deque<KripkeModel::World> queue{root_};
  depth_[root_] = 0;
  while (!queue.empty()) {
    auto w = queue.front();
    queue.pop_front();
    for (const auto& s : model_.successors(w)) {
      depth_[s] = depth_[w] + 1;
      height_ = std::max(height_, depth_[s]);
      queue.push_back(s);
    }
  }
  if (depth_.size() != model_.size())
    throw ModelError("tree model has worlds unreachable from the root");
}

unsigned TreeModel::depth_of(const KripkeModel::World& w) const {
  auto it = depth_.find(w);
  if (it == depth_.end()) throw ModelError("unknown world '" + w + "'");
  return it->second;
}

namespace {

std::string escape_component(const KripkeModel::World& w) {
  std::string out;
  out.reserve(w.size());
  for (char c : w) {
    if (c == '\\' || c == '/') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

Unraveling unravel(const KripkeModel& m, const KripkeModel::World& x, unsigned depth) {
  if (!m.has_world(x)) throw ModelError("unknown world '" + x + "'");
  std::set<KripkeModel::World> worlds;
  std::set<KripkeModel::Edge> edges;
  std::map<KripkeModel::World, std::set<unsigned>> val;
  std::map<KripkeModel::World, KripkeModel::World> back;

  struct Item {
    KripkeModel::World id;       // path-encoded tree world
    KripkeModel::World end;      // last component, a world of m
    unsigned length;             // number of edges in the path
  };
  std::deque<Item> queue{{escape_component(x), x, 0}};
  while (!queue.empty()) {
    Item it = queue.front();
    queue.pop_front();
    worlds.insert(it.id);
    val[it.id] = m.atoms_at(it.end);
    back[it.id] = it.end;
    if (it.length >= depth) continue;
    for (const auto& s : m.successors(it.end)) {
      KripkeModel::World child = it.id + "/" + escape_component(s);
      edges.insert({it.id, child});
      queue.push_back({child, s, it.length + 1});
    }
  }
  TreeModel tree(KripkeModel(worlds, edges, val), escape_component(x));
  return Unraveling{std::move(tree), WorldMap{std::move(back)}};
}

TreeModel truncate(const TreeModel& t, unsigned n) {
  if (n == 0) throw ModelError("truncation depth 0 would produce an empty model");
  std::set<KripkeModel::World> keep;
  for (const auto& w : t.model().worlds())
    if (t.depth_of(w) < n) keep.insert(w);
  return TreeModel(restrict(t.model(), keep), t.root());
}

// ---------------------------------------------------------------------------
// Grafting

KripkeModel graft(const KripkeModel& f, const KripkeModel& g,
                  const KripkeModel::World& from, const KripkeModel::World& to) {
  if (!f.has_world(from)) throw ModelError("graft source '" + from + "' not in left model");
  if (!g.has_world(to)) throw ModelError("graft target '" + to + "' not in right model");
  std::string prefix = "g:";
  auto collides = [&] {
    for (const auto& w : g.worlds())
      if (f.has_world(prefix + w)) return true;
    return false;
  };
  while (collides()) prefix = "g" + prefix;

  std::set<KripkeModel::World> worlds(f.worlds().begin(), f.worlds().end());
  std::set<KripkeModel::Edge> edges(f.edges().begin(), f.edges().end());
  std::map<KripkeModel::World, std::set<unsigned>> val;
  for (const auto& w : f.worlds()) val[w] = f.atoms_at(w);
  for (const auto& w : g.worlds()) {
    worlds.insert(prefix + w);
    val[prefix + w] = g.atoms_at(w);
  }
  for (const auto& e : g.edges()) edges.insert({prefix + e.first, prefix + e.second});
  edges.insert({from, prefix + to});
  return KripkeModel(worlds, edges, val);
}

// ---------------------------------------------------------------------------
// p-morphisms and neighborhood agreement

bool is_p_morphism(const WorldMap& map, const KripkeModel& src, const KripkeModel& dst) {
  for (const auto& w : src.worlds()) {
    auto it = map.mapping.find(w);
    if (it == map.mapping.end())
      throw ModelError("world map is not total: missing '" + w + "'");
    if (!dst.has_world(it->second))
      throw ModelError("world map image '" + it->second + "' not in the target model");
  }
  auto image = [&](const KripkeModel::World& w) { return map.mapping.at(w); };
  // forth
  for (const auto& e : src.edges()) {
    const auto& succs = dst.successors(image(e.first));
    if (std::find(succs.begin(), succs.end(), image(e.second)) == succs.end()) return false;
  }
  // back
  for (const auto& x : src.worlds()) {
    for (const auto& z : dst.successors(image(x))) {
      bool witnessed = false;
      for (const auto& y : src.successors(x))
        if (image(y) == z) {
          witnessed = true;
          break;
        }
      if (!witnessed) return false;
    }
  }
  // atoms
  for (const auto& x : src.worlds())
    if (src.atoms_at(x) != dst.atoms_at(image(x))) return false;
  return true;
}

bool agree_up_to(const KripkeModel& m1, const KripkeModel::World& x,
                 const KripkeModel& m2, unsigned n) {
  if (!m1.has_world(x)) throw ModelError("world '" + x + "' missing from the first model");
  if (!m2.has_world(x)) throw ModelError("world '" + x + "' missing from the second model");
  KripkeModel r1 = restrict(m1, reach(m1, x, n, ReachMode::UpTo));
  KripkeModel r2 = restrict(m2, reach(m2, x, n, ReachMode::UpTo));
  return r1 == r2;
}

}  // namespace kbox
