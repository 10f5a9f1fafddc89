#include "helicity/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <variant>
#include <vector>

namespace helicity::expr {

struct Node {
  enum class Kind { Number, Name, Negate, Add, Sub, Mul, Div, Pow, Call };
  Kind kind;
  double value = 0;
  std::string name;  // identifier or function name
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

const std::set<std::string> kFunctions = {"sin", "cos", "exp", "tanh", "sqrt"};

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream s;
    s << "syntax error at position " << pos_ << ": " << msg;
    throw SyntaxError(s.str(), pos_);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    NodePtr left = term();
    for (;;) {
      if (accept('+'))
        left = make(Kind::Add, left, term());
      else if (accept('-'))
        left = make(Kind::Sub, left, term());
      else
        return left;
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      if (accept('*'))
        left = make(Kind::Mul, left, unary());
      else if (accept('/'))
        left = make(Kind::Div, left, unary());
      else
        return left;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, unary());
    return power();
  }

  NodePtr power() {
    NodePtr left = primary();
    while (accept('^')) left = make(Kind::Pow, left, exponent());
    return left;
  }

  NodePtr exponent() {
    if (accept('-')) return make(Kind::Negate, exponent());
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = mark;
        fail("malformed exponent");
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    auto node = std::make_shared<Node>();
    node->kind = Kind::Number;
    node->value = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(node->value)) {
      pos_ = start;
      fail("number out of range");
    }
    return node;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    skip();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      if (!kFunctions.count(name)) throw UnknownNameError("unknown function '" + name + "'", name);
      ++pos_;
      NodePtr arg = expression();
      if (!accept(')')) fail("expected ')' after argument of " + name);
      auto node = std::make_shared<Node>();
      node->kind = Kind::Call;
      node->name = name;
      node->a = arg;
      return node;
    }
    if (kFunctions.count(name)) {
      pos_ = start;
      fail("function '" + name + "' needs an argument");
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::Name;
    node->name = name;
    return node;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

void collect(const Node* n, std::set<std::string>& out) {
  if (!n) return;
  if (n->kind == Kind::Name && n->name != "pi") out.insert(n->name);
  collect(n->a.get(), out);
  collect(n->b.get(), out);
}

void print(const Node* n, std::ostream& os) {
  switch (n->kind) {
    case Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n->value);
      os << buf;
      return;
    }
    case Kind::Name:
      os << n->name;
      return;
    case Kind::Negate:
      os << "(-";
      print(n->a.get(), os);
      os << ")";
      return;
    case Kind::Call:
      os << n->name << "(";
      print(n->a.get(), os);
      os << ")";
      return;
    default:
      break;
  }
  const char* op = n->kind == Kind::Add   ? " + "
                   : n->kind == Kind::Sub ? " - "
                   : n->kind == Kind::Mul ? " * "
                   : n->kind == Kind::Div ? " / "
                                          : "^";
  os << "(";
  print(n->a.get(), os);
  os << op;
  print(n->b.get(), os);
  os << ")";
}

using Values = Expr::Values;

struct Evaluator {
  Index size;
  const Expr::Lookup& lookup;
  const Expr::Locator& where;

  [[noreturn]] void domain(const std::string& what, Index p) const {
    std::string msg = "domain error: " + what;
    if (where) msg += " at " + where(p);
    throw DomainError(msg);
  }

  Values operator()(const Node* n) const {
    switch (n->kind) {
      case Kind::Number:
        return Values::Constant(size, n->value);
      case Kind::Name: {
        if (n->name == "pi") return Values::Constant(size, std::numbers::pi);
        Values v;
        if (!lookup || !lookup(n->name, v))
          throw UnknownNameError("unknown identifier '" + n->name + "'", n->name);
        if (v.size() == 1 && size != 1) return Values::Constant(size, v[0]);
        return v;
      }
      case Kind::Negate:
        return -(*this)(n->a.get());
      case Kind::Add:
        return (*this)(n->a.get()) + (*this)(n->b.get());
      case Kind::Sub:
        return (*this)(n->a.get()) - (*this)(n->b.get());
      case Kind::Mul:
        return (*this)(n->a.get()) * (*this)(n->b.get());
      case Kind::Div: {
        Values num = (*this)(n->a.get()), den = (*this)(n->b.get());
        for (Index p = 0; p < size; ++p)
          if (den[p] == 0) domain("division by zero", p);
        return num / den;
      }
      case Kind::Pow: {
        Values base = (*this)(n->a.get()), ex = (*this)(n->b.get());
        Values r(size);
        for (Index p = 0; p < size; ++p) {
          if (base[p] < 0 && ex[p] != std::floor(ex[p]))
            domain("negative base raised to a non-integer power", p);
          if (base[p] == 0 && ex[p] < 0) domain("zero raised to a negative power", p);
          r[p] = std::pow(base[p], ex[p]);
        }
        return r;
      }
      case Kind::Call: {
        Values x = (*this)(n->a.get());
        if (n->name == "sin") return x.sin();
        if (n->name == "cos") return x.cos();
        if (n->name == "tanh") return x.tanh();
        if (n->name == "exp") return x.exp();
        for (Index p = 0; p < size; ++p)
          if (x[p] < 0) domain("sqrt of a negative number", p);
        return x.sqrt();
      }
    }
    return Values();
  }
};

}  // namespace

Expr parse_expression(std::string_view src) {
  Expr e;
  e.root_ = Parser(src).parse();
  return e;
}

std::set<std::string> Expr::names() const {
  std::set<std::string> out;
  collect(root_.get(), out);
  return out;
}

std::string Expr::str() const {
  if (!root_) return "";
  std::ostringstream os;
  print(root_.get(), os);
  return os.str();
}

Expr::Values Expr::eval(Index size, const Lookup& lookup, const Locator& where) const {
  if (!root_) throw ConfigError("evaluating an empty expression");
  Values v = Evaluator{size, lookup, where}(root_.get());
  for (Index p = 0; p < size; ++p)
    if (!std::isfinite(v[p])) Evaluator{size, lookup, where}.domain("non-finite result", p);
  return v;
}

double Expr::eval(const std::map<std::string, double>& values) const {
  Lookup lookup = [&](const std::string& name, Values& out) {
    auto it = values.find(name);
    if (it == values.end()) return false;
    out = Values::Constant(1, it->second);
    return true;
  };
  return eval(1, lookup)[0];
}

ScalarField eval_on_grid(const Expr& e, const Grid& grid, const Params& params, double t) {
  Expr::Lookup lookup = [&](const std::string& name, Expr::Values& out) {
    for (int a = 0; a < grid.dim; ++a)
      if (name == "x" + std::to_string(a + 1)) {
        out = coordinate_field(grid, a);
        return true;
      }
    if (name == "t") {
      out = Expr::Values::Constant(1, t);
      return true;
    }
    auto it = params.find(name);
    if (it == params.end()) return false;
    out = Expr::Values::Constant(1, it->second);
    return true;
  };
  Expr::Locator where = [&](Index p) {
    std::ostringstream s;
    s << "point (";
    for (int a = 0; a < grid.dim; ++a) s << (a ? ", " : "") << "x" << a + 1 << "=" << grid.coordinate(a, p);
    s << ")";
    return s.str();
  };
  return e.eval(grid.size(), lookup, where);
}

void require_bound(const Expr& e, const std::set<std::string>& allowed) {
  for (const auto& name : e.names())
    if (!allowed.count(name)) throw UnknownNameError("unknown identifier '" + name + "'", name);
}

}  // namespace helicity::expr
