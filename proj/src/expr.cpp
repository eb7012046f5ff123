#include "lagpot/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lagpot {

namespace {

using NodePtr = std::unique_ptr<const ExprNode>;

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double value = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start, {}};
    const char c = src_[pos_];
    // U+2212 MINUS SIGN.
    if (src_.compare(pos_, 3, "\xE2\x88\x92") == 0) {
      pos_ += 3;
      return {Tok::Minus, start, src_.substr(start, 3)};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Tok::Ident, start, src_.substr(start, pos_ - start)};
    }
    ++pos_;
    switch (c) {
      case '+': return {Tok::Plus, start, src_.substr(start, 1)};
      case '-': return {Tok::Minus, start, src_.substr(start, 1)};
      case '*': return {Tok::Star, start, src_.substr(start, 1)};
      case '/': return {Tok::Slash, start, src_.substr(start, 1)};
      case '^': return {Tok::Caret, start, src_.substr(start, 1)};
      case '(': return {Tok::LParen, start, src_.substr(start, 1)};
      case ')': return {Tok::RParen, start, src_.substr(start, 1)};
      case ',': return {Tok::Comma, start, src_.substr(start, 1)};
      default: throw ParseError(ErrorCode::SyntaxError, start, "unexpected character");
    }
  }

 private:
  Token number(std::size_t start) {
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        digits();
      else
        pos_ = save;
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
      throw ParseError(ErrorCode::SyntaxError, start, "malformed number");
    return {Tok::Number, start, text, v};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::unique_ptr<ExprNode> make(ExprKind k, std::size_t offset) {
  auto node = std::make_unique<ExprNode>();
  node->kind = k;
  node->offset = offset;
  return node;
}

NodePtr binary(ExprKind k, std::size_t offset, NodePtr l, NodePtr r) {
  auto node = std::make_unique<ExprNode>();
  node->kind = k;
  node->offset = offset;
  node->args.push_back(std::move(l));
  node->args.push_back(std::move(r));
  return node;
}

class Parser {
 public:
  Parser(std::string_view src, std::size_t n) : lex_(src), n_(n) { advance(); }

  NodePtr parse_all() {
    NodePtr e = expr();
    if (cur_.kind != Tok::End) throw ParseError(ErrorCode::SyntaxError, cur_.offset, "unexpected token");
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k) throw ParseError(ErrorCode::SyntaxError, cur_.offset, std::string("expected ") + what);
    advance();
  }

  NodePtr expr() {
    NodePtr l = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const ExprKind k = cur_.kind == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
      const std::size_t off = cur_.offset;
      advance();
      l = binary(k, off, std::move(l), term());
    }
    return l;
  }

  NodePtr term() {
    NodePtr l = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const ExprKind k = cur_.kind == Tok::Star ? ExprKind::Mul : ExprKind::Div;
      const std::size_t off = cur_.offset;
      advance();
      l = binary(k, off, std::move(l), unary());
    }
    return l;
  }

  NodePtr unary() {
    if (cur_.kind == Tok::Minus) {
      const std::size_t off = cur_.offset;
      advance();
      auto node = make(ExprKind::Negate, off);
      node->args.push_back(unary());
      return node;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (cur_.kind == Tok::Caret) {
      const std::size_t off = cur_.offset;
      advance();
      return binary(ExprKind::Pow, off, std::move(base), unary());
    }
    return base;
  }

  NodePtr atom() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::Number: {
        advance();
        auto node = make(ExprKind::Number, t.offset);
        node->value = t.value;
        return node;
      }
      case Tok::LParen: {
        advance();
        NodePtr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        advance();
        if (cur_.kind == Tok::LParen) return call(t);
        return variable(t);
      }
      default:
        throw ParseError(ErrorCode::SyntaxError, t.offset, "expected a number, variable or '('");
    }
  }

  NodePtr variable(const Token& t) {
    const std::string_view s = t.text;
    if (s.size() >= 2 && (s[0] == 'x' || s[0] == 'y')) {
      std::size_t k = 0;
      const auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), k);
      if (ec == std::errc() && ptr == s.data() + s.size() && s[1] != '0' && k >= 1 && k <= n_) {
        auto node = make(ExprKind::Variable, t.offset);
        node->var = 2 * (k - 1) + (s[0] == 'y' ? 1 : 0);
        return node;
      }
    }
    throw ParseError(ErrorCode::UnknownIdentifier, t.offset, "unknown identifier '" + std::string(s) + "'");
  }

  NodePtr call(const Token& t) {
    struct Entry {
      std::string_view name;
      Func f;
      bool variadic;
    };
    static constexpr Entry table[] = {
        {"sin", Func::Sin, false},   {"cos", Func::Cos, false}, {"exp", Func::Exp, false},
        {"log", Func::Log, false},   {"sqrt", Func::Sqrt, false}, {"abs", Func::Abs, false},
        {"min", Func::Min, true},    {"max", Func::Max, true},
    };
    const Entry* found = nullptr;
    for (const Entry& e : table)
      if (e.name == t.text) found = &e;
    if (!found)
      throw ParseError(ErrorCode::UnknownIdentifier, t.offset, "unknown function '" + std::string(t.text) + "'");
    advance();  // '('
    auto node = make(ExprKind::Call, t.offset);
    node->func = found->f;
    node->args.push_back(expr());
    while (cur_.kind == Tok::Comma) {
      advance();
      node->args.push_back(expr());
    }
    expect(Tok::RParen, "')'");
    const std::size_t count = node->args.size();
    if ((found->variadic && count < 2) || (!found->variadic && count != 1))
      throw ParseError(ErrorCode::ArityError, t.offset,
                       "wrong number of arguments to '" + std::string(t.text) + "'");
    return node;
  }

  Lexer lex_;
  std::size_t n_;
  Token cur_{Tok::End, 0, {}};
};

[[noreturn]] void eval_error(const ExprNode& node, const char* what) {
  throw Error(ErrorCode::EvaluationError, std::string(what) + " (node at offset " + std::to_string(node.offset) + ")");
}

double eval_node(const ExprNode& node, std::span<const double> p) {
  switch (node.kind) {
    case ExprKind::Number: return node.value;
    case ExprKind::Variable: return p[node.var];
    case ExprKind::Negate: return -eval_node(*node.args[0], p);
    case ExprKind::Add: return eval_node(*node.args[0], p) + eval_node(*node.args[1], p);
    case ExprKind::Sub: return eval_node(*node.args[0], p) - eval_node(*node.args[1], p);
    case ExprKind::Mul: return eval_node(*node.args[0], p) * eval_node(*node.args[1], p);
    case ExprKind::Div: {
      const double d = eval_node(*node.args[1], p);
      if (d == 0.0) eval_error(node, "division by zero");
      return eval_node(*node.args[0], p) / d;
    }
    case ExprKind::Pow: {
      const double b = eval_node(*node.args[0], p);
      const double e = eval_node(*node.args[1], p);
      if (e == 2.0) return b * b;
      const double v = std::pow(b, e);
      if (!std::isfinite(v)) eval_error(node, "power is not finite");
      return v;
    }
    case ExprKind::Call: {
      const double a = eval_node(*node.args[0], p);
      switch (node.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: {
          const double v = std::exp(a);
          if (!std::isfinite(v)) eval_error(node, "exp overflow");
          return v;
        }
        case Func::Log:
          if (!(a > 0.0)) eval_error(node, "log of a non-positive argument");
          return std::log(a);
        case Func::Sqrt:
          if (a < 0.0) eval_error(node, "sqrt of a negative argument");
          return std::sqrt(a);
        case Func::Abs: return std::abs(a);
        case Func::Min:
        case Func::Max: {
          double v = a;
          for (std::size_t i = 1; i < node.args.size(); ++i) {
            const double w = eval_node(*node.args[i], p);
            v = node.func == Func::Min ? std::min(v, w) : std::max(v, w);
          }
          return v;
        }
      }
    }
  }
  eval_error(node, "malformed expression");
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
    case Func::Min: return "min";
    case Func::Max: return "max";
  }
  return "?";
}

void print(const ExprNode& node, std::string& out) {
  switch (node.kind) {
    case ExprKind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", node.value);
      out += buf;
      return;
    }
    case ExprKind::Variable:
      out += (node.var % 2 == 0 ? 'x' : 'y');
      out += std::to_string(node.var / 2 + 1);
      return;
    case ExprKind::Negate:
      out += "(-";
      print(*node.args[0], out);
      out += ')';
      return;
    case ExprKind::Call:
      out += func_name(node.func);
      out += '(';
      for (std::size_t i = 0; i < node.args.size(); ++i) {
        if (i) out += ", ";
        print(*node.args[i], out);
      }
      out += ')';
      return;
    default: {
      static constexpr char ops[] = {'?', '?', '?', '+', '-', '*', '/', '^'};
      out += '(';
      print(*node.args[0], out);
      out += ' ';
      out += ops[static_cast<int>(node.kind)];
      out += ' ';
      print(*node.args[1], out);
      out += ')';
    }
  }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == ExprKind::Number && a.value != b.value) return false;
  if (a.kind == ExprKind::Variable && a.var != b.var) return false;
  if (a.kind == ExprKind::Call && a.func != b.func) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal_nodes(*a.args[i], *b.args[i])) return false;
  return true;
}

}  // namespace

Expr parse(std::string_view src, std::size_t n) {
  Parser p(src, n);
  Expr e;
  e.n_ = n;
  e.source_ = std::string(src);
  e.root_ = p.parse_all();
  return e;
}

double eval(const Expr& e, std::span<const double> point) {
  if (e.empty()) throw Error(ErrorCode::EvaluationError, "empty expression");
  if (point.size() != 2 * e.n()) throw Error(ErrorCode::InvalidArgument, "expression point has wrong dimension");
  const double v = eval_node(e.root(), point);
  if (!std::isfinite(v)) throw Error(ErrorCode::EvaluationError, "expression value is not finite");
  return v;
}

double Expr::operator()(std::span<const double> point) const { return eval(*this, point); }

std::string to_string(const Expr& e) {
  std::string out;
  if (!e.empty()) print(e.root(), out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return equal_nodes(a.root(), b.root());
}

}  // namespace lagpot
