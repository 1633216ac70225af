#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kbox {

enum class Kind : unsigned char {
  Atom,
  Bottom,
  Top,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Box,
};

// Thrown by Formula::parse and Substitution::parse. `position` is a byte
// offset into the input text.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        message_(message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }
  // The message without the position suffix, for rethrowing at an offset.
  const std::string& message() const noexcept { return message_; }

private:
  std::string message_;
  std::size_t position_;
};

// Immutable modal-propositional formula. Copies share structure; structural
// equality is the equality used by every container in this project.
class Formula {
public:
  static Formula atom(unsigned index);
  static Formula bottom();
  static Formula top();
  static Formula neg(Formula f);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula iff(Formula lhs, Formula rhs);
  static Formula box(Formula f);

  // Parses the ASCII grammar: atoms `p<digits>`, constants `true`/`false`,
  // unary `~`, `[]`, `<>`, sugar `[k]`, `<k>`, `[<k]`, binary `&`, `|`,
  // `->`, `<->` and parentheses. Throws ParseError.
  static Formula parse(std::string_view text);

  Kind kind() const noexcept { return node_->kind; }
  bool is_leaf() const noexcept {
    return kind() == Kind::Atom || kind() == Kind::Bottom || kind() == Kind::Top;
  }

  // Valid for Kind::Atom only.
  unsigned atom_index() const;
  // Child accessors: lhs() for Not/Box and the left side of binary nodes,
  // rhs() for the right side of binary nodes.
  Formula lhs() const;
  Formula rhs() const;

  // Maximum nesting depth of Box; cached at construction.
  unsigned modal_degree() const noexcept { return node_->md; }

  std::size_t hash() const noexcept { return node_->hash; }

  // Total structural order; used by std::set<Formula> and for deterministic
  // iteration everywhere.
  int compare(const Formula& other) const noexcept;

  bool operator==(const Formula& other) const noexcept { return compare(other) == 0; }
  bool operator!=(const Formula& other) const noexcept { return compare(other) != 0; }
  bool operator<(const Formula& other) const noexcept { return compare(other) < 0; }

  // Canonical text with minimal parentheses. Runs of two or more boxes are
  // collapsed to the `[k]` sugar; round-trips through parse.
  std::string to_string() const;

private:
  struct Node {
    Kind kind;
    unsigned atom = 0;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    unsigned md = 0;
    std::size_t hash = 0;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Formula make(Kind kind, unsigned atom, const Formula* lhs, const Formula* rhs);

  std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Formula& f) {
  return os << f.to_string();
}

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

enum class ExpandKind { BoxN, BoxLtN, DiaN, Dia };

// Derived-connective expansion:
//   BoxN   -> n-fold box
//   BoxLtN -> left-nested conjunction of the i-fold boxes for i < n
//             (the empty conjunction at n = 0 is `true`)
//   DiaN   -> ~ [n] ~ f
//   Dia    -> ~ [] ~ f   (n ignored)
Formula expand(ExpandKind kind, unsigned n, const Formula& f);

inline unsigned modal_degree(const Formula& f) { return f.modal_degree(); }

std::string print(const Formula& f);

// Smallest superset of `fs` closed under subformulas and under single
// negation: a negation is added for each member that is not itself one.
std::set<Formula> subformula_closure(const std::set<Formula>& fs);

// Conjunction of a set in structural order, left-nested; empty set -> `true`.
Formula conjunction(const std::set<Formula>& fs);

// Atom indices occurring in f.
std::set<unsigned> atoms_of(const Formula& f);

}  // namespace kbox
