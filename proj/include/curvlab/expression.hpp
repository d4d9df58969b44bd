#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "curvlab/jet.hpp"

namespace curvlab {

/// Parsed arithmetic expression over chart variables x1..xn.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses, numbers, the
/// constants pi and e, and the functions exp, log, sin, cos, sqrt, tanh.
class Expression {
 public:
  /// Throws std::invalid_argument with the offending column on a syntax error.
  static Expression parse(const std::string& text);

  /// Value as a jet; `x[i]` is the jet of variable x{i+1}.
  Jet evaluate(std::span<const Jet> x) const;

  /// Largest variable index used (1-based), 0 for a constant expression.
  int max_variable() const { return max_variable_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  int max_variable_ = 0;
  std::string text_;
};

}  // namespace curvlab
