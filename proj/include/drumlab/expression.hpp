#pragma once

#include <memory>
#include <span>
#include <string>

namespace drumlab {

// Closed-form scalar expression in chart coordinates.
// Grammar: + - * / ^, unary minus, parentheses, numbers, pi, e,
// variables x (= x1), y (= x2), x1, x2, and the functions
// sin cos tan exp log sqrt abs.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);

  double operator()(std::span<const double> x) const;
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace drumlab
