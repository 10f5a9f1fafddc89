#pragma once

// A small arithmetic language for initial conditions and potentials.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := primary ('^' ['-'...] primary)*      left-associative
//   primary:= number | name | func '(' expr ')' | '(' expr ')'
//
// Names are bound at evaluation time (x1, x2, x3, t, parameters); `pi` is
// built in. Functions: sin cos exp tanh sqrt.

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "helicity/fields.hpp"

namespace helicity::expr {

class SyntaxError : public ConfigError {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : ConfigError(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownNameError : public ConfigError {
 public:
  UnknownNameError(const std::string& what, std::string name)
      : ConfigError(what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Division by zero, sqrt of a negative number and similar.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct Node;

class Expr {
 public:
  using Values = Eigen::ArrayXd;
  /// Name lookup during evaluation; returns false for unknown names.
  using Lookup = std::function<bool(const std::string&, Values&)>;
  /// Describes the sample at an index, for error messages.
  using Locator = std::function<std::string(Index)>;

  Expr() = default;

  /// Every identifier the expression refers to (excluding `pi`).
  std::set<std::string> names() const;
  bool depends_on(const std::string& name) const { return names().count(name) > 0; }

  /// Canonical fully parenthesized form; parsing it gives the same tree.
  std::string str() const;

  /// Evaluate on `size` samples.
  Values eval(Index size, const Lookup& lookup, const Locator& where = {}) const;

  /// Scalar evaluation with named values.
  double eval(const std::map<std::string, double>& values = {}) const;

  bool empty() const { return !root_; }

 private:
  friend Expr parse_expression(std::string_view src);
  std::shared_ptr<const Node> root_;
};

Expr parse_expression(std::string_view src);

using Params = std::map<std::string, double>;

/// Sample an expression at the grid nodes. Binds x1..x{dim}, t and `params`.
ScalarField eval_on_grid(const Expr& e, const Grid& grid, const Params& params = {}, double t = 0);

/// Throws UnknownNameError unless every name of `e` is in `allowed`.
void require_bound(const Expr& e, const std::set<std::string>& allowed);

}  // namespace helicity::expr
