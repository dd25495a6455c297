#include "drumlab/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "drumlab/errors.hpp"

namespace drumlab {

struct Expression::Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
  double value = 0.0;
  int var = 0;
  std::string func;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(std::span<const double> x) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Var:
        if (var >= static_cast<int>(x.size()))
          fail(ErrorCode::Usage, "expression uses x" + std::to_string(var + 1) +
                                     " on a " + std::to_string(x.size()) + "-dimensional chart");
        return x[var];
      case Kind::Neg: return -lhs->eval(x);
      case Kind::Add: return lhs->eval(x) + rhs->eval(x);
      case Kind::Sub: return lhs->eval(x) - rhs->eval(x);
      case Kind::Mul: return lhs->eval(x) * rhs->eval(x);
      case Kind::Div: return lhs->eval(x) / rhs->eval(x);
      case Kind::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Kind::Call: {
        const double a = lhs->eval(x);
        if (func == "sin") return std::sin(a);
        if (func == "cos") return std::cos(a);
        if (func == "tan") return std::tan(a);
        if (func == "exp") return std::exp(a);
        if (func == "log") return std::log(a);
        if (func == "sqrt") return std::sqrt(a);
        return std::fabs(a);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::Usage, "bad expression \"" + s_ + "\" at " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (eat('+')) n = make(Kind::Add, n, product());
      else if (eat('-')) n = make(Kind::Sub, n, product());
      else return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (eat('*')) n = make(Kind::Mul, n, unary());
      else if (eat('/')) n = make(Kind::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  // right associative; -2^2 parses as -(2^2)
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr n = sum();
      if (!eat(')')) error("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        error("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      auto n = std::make_shared<Expression::Node>();
      if (id == "pi") {
        n->kind = Kind::Number;
        n->value = std::numbers::pi;
      } else if (id == "e") {
        n->kind = Kind::Number;
        n->value = std::numbers::e;
      } else if (id == "x" || id == "x1") {
        n->kind = Kind::Var;
        n->var = 0;
      } else if (id == "y" || id == "x2") {
        n->kind = Kind::Var;
        n->var = 1;
      } else if (id == "sin" || id == "cos" || id == "tan" || id == "exp" || id == "log" ||
                 id == "sqrt" || id == "abs") {
        if (!eat('(')) error("expected '(' after " + id);
        n->kind = Kind::Call;
        n->func = id;
        n->lhs = sum();
        if (!eat(')')) error("expected ')'");
      } else {
        error("unknown identifier '" + id + "'");
      }
      return n;
    }
    error("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::operator()(std::span<const double> x) const {
  if (!root_) fail(ErrorCode::Usage, "empty expression");
  return root_->eval(x);
}

}  // namespace drumlab
