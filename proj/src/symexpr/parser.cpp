#include "hamform/symexpr/parser.hpp"

#include <cctype>
#include <climits>

#include "hamform/errors.hpp"

namespace hamform::sym {

namespace {

class Parser {
 public:
  Parser(std::string_view text, bool allow_wedge) : text_(text), allow_wedge_(allow_wedge) {}

  Ast run() {
    Ast a = additive();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return a;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_wedge() const { return pos_ + 1 < text_.size() && text_[pos_] == '/' && text_[pos_ + 1] == '\\'; }

  Ast additive() {
    Ast lhs = multiplicative();
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) return lhs;
      const char c = text_[pos_];
      if (c != '+' && c != '-') return lhs;
      const std::size_t at = pos_++;
      Ast rhs = multiplicative();
      lhs = node(c == '+' ? Ast::Kind::Add : Ast::Kind::Sub, at, std::move(lhs), std::move(rhs));
    }
  }

  Ast multiplicative() {
    Ast lhs = unary();
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) return lhs;
      const std::size_t at = pos_;
      Ast::Kind kind;
      if (at_wedge()) {
        if (!allow_wedge_) fail("wedge product is not allowed in a scalar expression");
        kind = Ast::Kind::Wedge;
        pos_ += 2;
      } else if (text_[pos_] == '*') {
        kind = Ast::Kind::Mul;
        ++pos_;
      } else if (text_[pos_] == '/') {
        kind = Ast::Kind::Div;
        ++pos_;
      } else {
        return lhs;
      }
      Ast rhs = unary();
      lhs = node(kind, at, std::move(lhs), std::move(rhs));
    }
  }

  Ast unary() {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '-') {
      const std::size_t at = pos_++;
      Ast a;
      a.kind = Ast::Kind::Neg;
      a.offset = at;
      a.args.push_back(unary());
      return a;
    }
    if (pos_ < text_.size() && text_[pos_] == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  Ast power() {
    Ast base = primary();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      const std::size_t at = pos_++;
      skip_space();
      Ast exponent;
      if (pos_ < text_.size() && text_[pos_] == '-') {
        const std::size_t neg_at = pos_++;
        exponent.kind = Ast::Kind::Neg;
        exponent.offset = neg_at;
        exponent.args.push_back(power());
      } else {
        exponent = power();
      }
      return node(Ast::Kind::Pow, at, std::move(base), std::move(exponent));
    }
    return base;
  }

  Ast primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    const std::size_t at = pos_;
    if (c == '(') {
      ++pos_;
      Ast inner = additive();
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        name += text_[pos_++];
      }
      skip_space();
      Ast a;
      a.offset = at;
      a.name = name;
      if (pos_ < text_.size() && text_[pos_] == '(') {
        ++pos_;
        a.kind = Ast::Kind::Call;
        a.args.push_back(additive());
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
        ++pos_;
      } else {
        a.kind = Ast::Kind::Ident;
      }
      return a;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Ast number() {
    const std::size_t at = pos_;
    std::string digits;
    bool dot = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
      } else if (c == '.' && !dot) {
        dot = true;
        digits += c;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits == ".") {
      pos_ = at;
      fail("malformed number");
    }
    Ast a;
    a.kind = Ast::Kind::Number;
    a.offset = at;
    a.value = parse_rational(digits);
    return a;
  }

  static Ast node(Ast::Kind kind, std::size_t at, Ast lhs, Ast rhs) {
    Ast a;
    a.kind = kind;
    a.offset = at;
    a.args.push_back(std::move(lhs));
    a.args.push_back(std::move(rhs));
    return a;
  }

  std::string_view text_;
  bool allow_wedge_;
  std::size_t pos_ = 0;
};

Expr build(const Ast& a, const NameSet* known) {
  switch (a.kind) {
    case Ast::Kind::Number: return Expr(a.value);
    case Ast::Kind::Ident:
      if (known != nullptr && known->count(a.name) == 0) throw UnknownIdentifier(a.name, a.offset);
      return Expr::symbol(a.name);
    case Ast::Kind::Neg: return -build(a.args[0], known);
    case Ast::Kind::Add: return build(a.args[0], known) + build(a.args[1], known);
    case Ast::Kind::Sub: return build(a.args[0], known) - build(a.args[1], known);
    case Ast::Kind::Mul: return build(a.args[0], known) * build(a.args[1], known);
    case Ast::Kind::Div: {
      const Expr d = build(a.args[1], known);
      if (d.is_zero()) throw DomainError("division by zero at byte " + std::to_string(a.offset));
      return build(a.args[0], known) / d;
    }
    case Ast::Kind::Pow: {
      const Expr e = build(a.args[1], known);
      if (!e.is_constant() || e.constant_value().get_den() != 1) {
        throw SyntaxError("exponent must be an integer constant", a.args[1].offset);
      }
      const mpz_class n = e.constant_value().get_num();
      if (!n.fits_slong_p() || abs(n) > 4096) throw SyntaxError("exponent out of range", a.args[1].offset);
      return build(a.args[0], known).pow(n.get_si());
    }
    case Ast::Kind::Wedge: throw SyntaxError("wedge product is not allowed in a scalar expression", a.offset);
    case Ast::Kind::Call: {
      const auto f = func_from_name(a.name);
      if (!f) throw UnknownIdentifier(a.name, a.offset);
      return Expr::apply(*f, build(a.args[0], known));
    }
  }
  return Expr();
}

}  // namespace

Ast parse_ast(std::string_view text, bool allow_wedge) { return Parser(text, allow_wedge).run(); }

Expr build_expr(const Ast& ast, const NameSet& known) { return build(ast, &known); }

Expr parse_expr(std::string_view text, const NameSet& known) { return build(parse_ast(text), &known); }

Expr parse_expr(std::string_view text) { return build(parse_ast(text), nullptr); }

long ast_integer_exponent(const Ast& exponent, const NameSet& known) {
  const Expr e = build(exponent, &known);
  if (!e.is_constant() || e.constant_value().get_den() != 1) {
    throw SyntaxError("exponent must be an integer constant", exponent.offset);
  }
  const mpz_class n = e.constant_value().get_num();
  if (!n.fits_slong_p() || abs(n) > 4096) throw SyntaxError("exponent out of range", exponent.offset);
  return n.get_si();
}

}  // namespace hamform::sym
