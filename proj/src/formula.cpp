#include "kbox/formula.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <utility>
#include <vector>

namespace kbox {

namespace {

std::size_t combine_hash(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

bool is_binary(Kind k) {
  return k == Kind::And || k == Kind::Or || k == Kind::Implies || k == Kind::Iff;
}

}  // namespace

Formula Formula::make(Kind kind, unsigned atom, const Formula* lhs, const Formula* rhs) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->atom = atom;
  unsigned md = 0;
  std::size_t h = combine_hash(static_cast<std::size_t>(kind) + 1, atom);
  if (lhs != nullptr) {
    node->left = lhs->node_;
    md = std::max(md, lhs->modal_degree());
    h = combine_hash(h, lhs->hash());
  }
  if (rhs != nullptr) {
    node->right = rhs->node_;
    md = std::max(md, rhs->modal_degree());
    h = combine_hash(h, rhs->hash());
  }
  if (kind == Kind::Box) md += 1;
  node->md = md;
  node->hash = h;
  return Formula(std::move(node));
}

Formula Formula::atom(unsigned index) { return make(Kind::Atom, index, nullptr, nullptr); }

Formula Formula::bottom() {
  static const Formula f = make(Kind::Bottom, 0, nullptr, nullptr);
  return f;
}

Formula Formula::top() {
  static const Formula f = make(Kind::Top, 0, nullptr, nullptr);
  return f;
}

Formula Formula::neg(Formula f) { return make(Kind::Not, 0, &f, nullptr); }
Formula Formula::box(Formula f) { return make(Kind::Box, 0, &f, nullptr); }
Formula Formula::conj(Formula lhs, Formula rhs) { return make(Kind::And, 0, &lhs, &rhs); }
Formula Formula::disj(Formula lhs, Formula rhs) { return make(Kind::Or, 0, &lhs, &rhs); }
Formula Formula::implies(Formula lhs, Formula rhs) { return make(Kind::Implies, 0, &lhs, &rhs); }
Formula Formula::iff(Formula lhs, Formula rhs) { return make(Kind::Iff, 0, &lhs, &rhs); }

unsigned Formula::atom_index() const {
  if (kind() != Kind::Atom) throw std::logic_error("atom_index on non-atom");
  return node_->atom;
}

Formula Formula::lhs() const {
  if (!node_->left) throw std::logic_error("lhs on leaf formula");
  return Formula(node_->left);
}

Formula Formula::rhs() const {
  if (!node_->right) throw std::logic_error("rhs on non-binary formula");
  return Formula(node_->right);
}

int Formula::compare(const Formula& other) const noexcept {
  const Node* a = node_.get();
  const Node* b = other.node_.get();
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->kind == Kind::Atom) {
    if (a->atom != b->atom) return a->atom < b->atom ? -1 : 1;
    return 0;
  }
  if (a->left) {
    int c = Formula(a->left).compare(Formula(b->left));
    if (c != 0) return c;
  }
  if (a->right) {
    int c = Formula(a->right).compare(Formula(b->right));
    if (c != 0) return c;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Precedence levels, tightest first: unary 4, & 3, | 2, -> 1, <-> 0.
int precedence(Kind k) {
  switch (k) {
    case Kind::Iff: return 0;
    case Kind::Implies: return 1;
    case Kind::Or: return 2;
    case Kind::And: return 3;
    case Kind::Not:
    case Kind::Box: return 4;
    default: return 5;
  }
}

void render(const Formula& f, std::string& out);

void render_child(const Formula& child, int parent_prec, bool strict, std::string& out) {
  bool parens = is_binary(child.kind()) &&
                (strict ? precedence(child.kind()) <= parent_prec
                        : precedence(child.kind()) < parent_prec);
  if (parens) out += '(';
  render(child, out);
  if (parens) out += ')';
}

void render(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Kind::Atom:
      out += 'p';
      out += std::to_string(f.atom_index());
      return;
    case Kind::Bottom:
      out += "false";
      return;
    case Kind::Top:
      out += "true";
      return;
    case Kind::Not:
      out += '~';
      render_child(f.lhs(), 4, false, out);
      return;
    case Kind::Box: {
      unsigned run = 0;
      Formula body = f;
      while (body.kind() == Kind::Box) {
        ++run;
        body = body.lhs();
      }
      if (run == 1)
        out += "[] ";
      else
        out += "[" + std::to_string(run) + "] ";
      render_child(body, 4, false, out);
      return;
    }
    case Kind::And:
    case Kind::Or: {
      // left-associative
      int prec = precedence(f.kind());
      render_child(f.lhs(), prec, false, out);
      out += f.kind() == Kind::And ? " & " : " | ";
      render_child(f.rhs(), prec, true, out);
      return;
    }
    case Kind::Implies:
    case Kind::Iff: {
      // right-associative
      int prec = precedence(f.kind());
      render_child(f.lhs(), prec, true, out);
      out += f.kind() == Kind::Implies ? " -> " : " <-> ";
      render_child(f.rhs(), prec, false, out);
      return;
    }
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  render(*this, out);
  return out;
}

std::string print(const Formula& f) { return f.to_string(); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Type {
    AtomTok,
    TrueTok,
    FalseTok,
    Tilde,
    BoxTok,     // [] or [k]; count in `number`
    BoxLtTok,   // [<k]
    DiaTok,     // <> or <k>
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    End,
  };
  Type type;
  std::size_t pos;
  unsigned number = 0;  // atom index or box/dia count
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

private:
  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    throw ParseError(message, at);
  }

  unsigned read_number(std::size_t at) {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected a decimal literal", pos_);
    unsigned long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + static_cast<unsigned long>(text_[pos_] - '0');
      if (value > 1'000'000) fail("numeric literal too large", at);
      ++pos_;
    }
    return static_cast<unsigned>(value);
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::size_t at = pos_;
    current_.pos = at;
    current_.number = 0;
    if (pos_ >= text_.size()) {
      current_.type = Token::End;
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': ++pos_; current_.type = Token::LParen; return;
      case ')': ++pos_; current_.type = Token::RParen; return;
      case '~': ++pos_; current_.type = Token::Tilde; return;
      case '&': ++pos_; current_.type = Token::Amp; return;
      case '|': ++pos_; current_.type = Token::Pipe; return;
      case '-':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '>') {
          ++pos_;
          current_.type = Token::Arrow;
          return;
        }
        fail("expected '>' after '-'", pos_);
      case '[':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          current_.type = Token::BoxTok;
          current_.number = 1;
          return;
        }
        if (pos_ < text_.size() && text_[pos_] == '<') {
          ++pos_;
          current_.number = read_number(at);
          if (pos_ >= text_.size() || text_[pos_] != ']') fail("expected ']'", pos_);
          ++pos_;
          current_.type = Token::BoxLtTok;
          return;
        }
        current_.number = read_number(at);
        if (pos_ >= text_.size() || text_[pos_] != ']') fail("expected ']'", pos_);
        ++pos_;
        current_.type = Token::BoxTok;
        return;
      case '<':
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') {
          ++pos_;
          if (pos_ < text_.size() && text_[pos_] == '>') {
            ++pos_;
            current_.type = Token::DArrow;
            return;
          }
          fail("expected '>' after '<-'", pos_);
        }
        if (pos_ < text_.size() && text_[pos_] == '>') {
          ++pos_;
          current_.type = Token::DiaTok;
          current_.number = 1;
          return;
        }
        current_.number = read_number(at);
        if (pos_ >= text_.size() || text_[pos_] != '>') fail("expected '>'", pos_);
        ++pos_;
        current_.type = Token::DiaTok;
        return;
      default:
        break;
    }
    if (c == 'p' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      current_.number = read_number(at);
      current_.type = Token::AtomTok;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string_view word = text_.substr(start, pos_ - start);
      if (word == "true") {
        current_.type = Token::TrueTok;
        return;
      }
      if (word == "false") {
        current_.type = Token::FalseTok;
        return;
      }
      fail("unknown token '" + std::string(word) + "'", at);
    }
    fail(std::string("unknown token '") + c + "'", at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_;
};

class Parser {
public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Formula run() {
    Formula f = parse_iff();
    const Token& t = lex_.peek();
    if (t.type != Token::End) throw ParseError("unexpected trailing input", t.pos);
    return f;
  }

private:
  Formula parse_iff() {
    Formula lhs = parse_implies();
    if (lex_.peek().type == Token::DArrow) {
      lex_.take();
      return Formula::iff(lhs, parse_iff());
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (lex_.peek().type == Token::Arrow) {
      lex_.take();
      return Formula::implies(lhs, parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (lex_.peek().type == Token::Pipe) {
      lex_.take();
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (lex_.peek().type == Token::Amp) {
      lex_.take();
      f = Formula::conj(f, parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    const Token& t = lex_.peek();
    switch (t.type) {
      case Token::Tilde:
        lex_.take();
        return Formula::neg(parse_unary());
      case Token::BoxTok: {
        Token tok = lex_.take();
        return expand(ExpandKind::BoxN, tok.number, parse_unary());
      }
      case Token::BoxLtTok: {
        Token tok = lex_.take();
        return expand(ExpandKind::BoxLtN, tok.number, parse_unary());
      }
      case Token::DiaTok: {
        Token tok = lex_.take();
        return expand(ExpandKind::DiaN, tok.number, parse_unary());
      }
      default:
        return parse_primary();
    }
  }

  Formula parse_primary() {
    Token t = lex_.take();
    switch (t.type) {
      case Token::AtomTok:
        return Formula::atom(t.number);
      case Token::TrueTok:
        return Formula::top();
      case Token::FalseTok:
        return Formula::bottom();
      case Token::LParen: {
        Formula f = parse_iff();
        Token close = lex_.take();
        if (close.type != Token::RParen) throw ParseError("expected ')'", close.pos);
        return f;
      }
      case Token::End:
        throw ParseError("unexpected end of input", t.pos);
      default:
        throw ParseError("expected a formula", t.pos);
    }
  }

  Lexer lex_;
};

}  // namespace

Formula Formula::parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Derived connectives and closure

Formula expand(ExpandKind kind, unsigned n, const Formula& f) {
  switch (kind) {
    case ExpandKind::BoxN: {
      Formula out = f;
      for (unsigned i = 0; i < n; ++i) out = Formula::box(out);
      return out;
    }
    case ExpandKind::BoxLtN: {
      if (n == 0) return Formula::top();
      Formula out = f;
      Formula boxed = f;
      for (unsigned i = 1; i < n; ++i) {
        boxed = Formula::box(boxed);
        out = Formula::conj(out, boxed);
      }
      return out;
    }
    case ExpandKind::DiaN:
      return Formula::neg(expand(ExpandKind::BoxN, n, Formula::neg(f)));
    case ExpandKind::Dia:
      return Formula::neg(Formula::box(Formula::neg(f)));
  }
  throw std::logic_error("unreachable expand kind");
}

namespace {

void collect_subformulas(const Formula& f, std::set<Formula>& out) {
  if (!out.insert(f).second) return;
  switch (f.kind()) {
    case Kind::Atom:
    case Kind::Bottom:
    case Kind::Top:
      return;
    case Kind::Not:
    case Kind::Box:
      collect_subformulas(f.lhs(), out);
      return;
    default:
      collect_subformulas(f.lhs(), out);
      collect_subformulas(f.rhs(), out);
      return;
  }
}

}  // namespace

std::set<Formula> subformula_closure(const std::set<Formula>& fs) {
  std::set<Formula> out;
  for (const Formula& f : fs) collect_subformulas(f, out);
  std::set<Formula> negations;
  for (const Formula& f : out)
    if (f.kind() != Kind::Not) negations.insert(Formula::neg(f));
  out.merge(negations);
  return out;
}

Formula conjunction(const std::set<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  auto it = fs.begin();
  Formula out = *it;
  for (++it; it != fs.end(); ++it) out = Formula::conj(out, *it);
  return out;
}

namespace {

void collect_atoms(const Formula& f, std::set<unsigned>& out) {
  switch (f.kind()) {
    case Kind::Atom:
      out.insert(f.atom_index());
      return;
    case Kind::Bottom:
    case Kind::Top:
      return;
    case Kind::Not:
    case Kind::Box:
      collect_atoms(f.lhs(), out);
      return;
    default:
      collect_atoms(f.lhs(), out);
      collect_atoms(f.rhs(), out);
      return;
  }
}

}  // namespace

std::set<unsigned> atoms_of(const Formula& f) {
  std::set<unsigned> out;
  collect_atoms(f, out);
  return out;
}

}  // namespace kbox
