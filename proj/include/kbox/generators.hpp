#pragma once

#include <cstdint>
#include <random>

#include "kbox/formula.hpp"
#include "kbox/kripke.hpp"
#include "kbox/unification.hpp"

namespace kbox {

// Seeded RNG for property tests and sampled acceptance runs. All draws go
// through integer modulo on the raw mt19937_64 stream — no standard-library
// distributions — so a seed produces the same objects on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Draw in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  // True with probability percent/100.
  bool percent(unsigned percent) { return below(100) < percent; }

private:
  std::mt19937_64 engine_;
};

struct ModelGenOptions {
  unsigned max_worlds = 8;    // world count drawn from 1..max_worlds
  unsigned edge_percent = 35; // independent chance of each ordered pair
  unsigned max_atoms = 3;     // valuations over p0..p(max_atoms-1)
};

// Worlds are named "w0", "w1", ...; every ordered pair (self-loops included)
// is an edge with the configured probability; each atom is true at each world
// with probability one half.
KripkeModel random_model(Rng& rng, const ModelGenOptions& opts = {});

struct FormulaGenOptions {
  unsigned max_depth = 4;  // AST height; 1 yields a leaf
  unsigned max_md = 2;     // modal-degree cap
  unsigned max_atoms = 2;  // atoms drawn from p0..p(max_atoms-1); 0 for none
};

Formula random_formula(Rng& rng, const FormulaGenOptions& opts = {});

struct SubstitutionGenOptions {
  unsigned max_bound_atoms = 2;      // candidate atoms p0..p(max_bound_atoms-1)
  unsigned bind_percent = 70;        // chance each candidate gets a binding
  FormulaGenOptions image = {3, 2, 2};
};

Substitution random_substitution(Rng& rng, const SubstitutionGenOptions& opts = {});

}  // namespace kbox
