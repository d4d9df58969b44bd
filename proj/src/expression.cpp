#include "curvlab/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curvlab {

struct Expression::Node {
  enum class Kind { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Call } kind;
  double number = 0.0;
  int variable = 0;
  std::string function;
  std::shared_ptr<const Node> left;
  std::shared_ptr<const Node> right;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr left = nullptr, NodePtr right = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  int max_variable = 0;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression \"" + s_ + "\": " + msg + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      if (accept('+')) left = make(Node::Kind::Add, left, term());
      else if (accept('-')) left = make(Node::Kind::Sub, left, term());
      else return left;
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      if (accept('*')) left = make(Node::Kind::Mul, left, unary());
      else if (accept('/')) left = make(Node::Kind::Div, left, unary());
      else return left;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Number;
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      auto n = std::make_shared<Node>();
      if (name == "pi" || name == "e") {
        n->kind = Node::Kind::Number;
        n->number = name == "pi" ? std::numbers::pi : std::numbers::e;
        return n;
      }
      if (name.size() > 1 && name[0] == 'x' && name.find_first_not_of("0123456789", 1) == std::string::npos) {
        n->kind = Node::Kind::Variable;
        n->variable = std::stoi(name.substr(1));
        if (n->variable < 1) fail("variables are numbered from x1");
        max_variable = std::max(max_variable, n->variable);
        return n;
      }
      static const char* functions[] = {"exp", "log", "sin", "cos", "sqrt", "tanh"};
      for (const char* f : functions)
        if (name == f) {
          if (!accept('(')) fail("expected '(' after " + name);
          n->kind = Node::Kind::Call;
          n->function = name;
          n->left = expr();
          if (!accept(')')) fail("expected ')'");
          return n;
        }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

bool is_constant(const Node& n, double& value) {
  if (n.kind == Node::Kind::Number) {
    value = n.number;
    return true;
  }
  if (n.kind == Node::Kind::Neg && is_constant(*n.left, value)) {
    value = -value;
    return true;
  }
  return false;
}

Jet eval(const Node& n, std::span<const Jet> x) {
  switch (n.kind) {
    case Node::Kind::Number:
      return constant_like(x[0], n.number);
    case Node::Kind::Variable:
      if (n.variable > static_cast<int>(x.size()))
        throw std::out_of_range("expression uses x" + std::to_string(n.variable) + " in a " + std::to_string(x.size()) +
                                "-dimensional chart");
      return x[n.variable - 1];
    case Node::Kind::Add:
      return eval(*n.left, x) + eval(*n.right, x);
    case Node::Kind::Sub:
      return eval(*n.left, x) - eval(*n.right, x);
    case Node::Kind::Mul:
      return eval(*n.left, x) * eval(*n.right, x);
    case Node::Kind::Div:
      return eval(*n.left, x) / eval(*n.right, x);
    case Node::Kind::Neg:
      return -eval(*n.left, x);
    case Node::Kind::Pow: {
      const Jet base = eval(*n.left, x);
      double r = 0.0;
      if (is_constant(*n.right, r)) {
        if (std::floor(r) == r && std::abs(r) <= 64) return ipow(base, static_cast<int>(r));
        return pow(base, r);
      }
      return exp(eval(*n.right, x) * log(base));
    }
    case Node::Kind::Call: {
      const Jet a = eval(*n.left, x);
      if (n.function == "exp") return exp(a);
      if (n.function == "log") return log(a);
      if (n.function == "sin") return sin(a);
      if (n.function == "cos") return cos(a);
      if (n.function == "sqrt") return sqrt(a);
      return tanh(a);
    }
  }
  throw std::logic_error("unreachable expression node");
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.root_ = p.parse_all();
  e.max_variable_ = p.max_variable;
  e.text_ = text;
  return e;
}

Jet Expression::evaluate(std::span<const Jet> x) const {
  if (x.empty()) throw std::invalid_argument("expression evaluation needs at least one variable jet");
  return eval(*root_, x);
}

}  // namespace curvlab
