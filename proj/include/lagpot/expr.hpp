#pragma once

// Arithmetic expressions over x1, y1, ..., xn, yn.
//
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | power
//   power  := atom ("^" unary)?          right associative
//   atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
//
// so that -x1^2 = -(x1^2) and 2^3^2 = 2^9. Functions: sin cos exp log sqrt
// abs (one argument) and min max (two or more).

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lagpot/error.hpp"

namespace lagpot {

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t offset, const std::string& what)
      : Error(code, what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

enum class ExprKind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max };

struct ExprNode {
  ExprKind kind;
  std::size_t offset = 0;
  double value = 0.0;       // Number
  std::size_t var = 0;      // Variable: interleaved coordinate index
  Func func = Func::Sin;    // Call
  std::vector<std::unique_ptr<const ExprNode>> args;
};

class Expr {
 public:
  Expr() = default;

  std::size_t n() const noexcept { return n_; }
  const std::string& source() const noexcept { return source_; }
  const ExprNode& root() const { return *root_; }
  bool empty() const noexcept { return !root_; }

  double operator()(std::span<const double> point) const;

  friend Expr parse(std::string_view src, std::size_t n);

 private:
  std::size_t n_ = 0;
  std::string source_;
  std::shared_ptr<const ExprNode> root_;
};

Expr parse(std::string_view src, std::size_t n);
/// Throws EvaluationError for log/sqrt of out-of-domain arguments, division
/// by zero and non-finite results.
double eval(const Expr& e, std::span<const double> point);

/// Fully parenthesized text that re-parses to the same tree.
std::string to_string(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace lagpot
