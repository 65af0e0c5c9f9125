#include "mamix/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace mamix {

class ExpressionParser {
 public:
  ExpressionParser(const std::string& src, Expression& out) : src_(src), out_(out) {}

  void run() {
    out_.root_ = parse_expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected trailing input");
  }

 private:
  using Node = Expression::Node;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression: " + what + " at position " + std::to_string(pos_) +
                                " in \"" + src_ + "\"");
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  int make(Node::Kind kind, int a = -1, int b = -1, double value = 0) {
    out_.nodes_.push_back({kind, value, a, b});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (consume('+'))
        lhs = make(Node::add, lhs, parse_term());
      else if (consume('-'))
        lhs = make(Node::sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (consume('*'))
        lhs = make(Node::mul, lhs, parse_unary());
      else if (consume('/'))
        lhs = make(Node::divide, lhs, parse_unary());
      else
        return lhs;
    }
  }

  int parse_unary() {
    if (consume('-')) return make(Node::negate, parse_unary());
    if (consume('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (consume('^')) return make(Node::power, base, parse_unary());  // right associative
    return base;
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(src_.c_str() + pos_, &end);
      pos_ = end - src_.c_str();
      return make(Node::constant, -1, -1, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "x") return make(Node::var_x);
      if (name == "y") return make(Node::var_y);
      if (name == "exp" || name == "sqrt" || name == "abs") {
        if (!consume('(')) fail("expected '(' after " + name);
        const int arg = parse_expr();
        if (!consume(')')) fail("expected ')'");
        return make(name == "exp" ? Node::fn_exp : name == "sqrt" ? Node::fn_sqrt : Node::fn_abs,
                    arg);
      }
      if (name == "min" || name == "max") {
        if (!consume('(')) fail("expected '(' after " + name);
        const int a = parse_expr();
        if (!consume(',')) fail("expected ',' in " + name);
        const int b = parse_expr();
        if (!consume(')')) fail("expected ')'");
        return make(name == "min" ? Node::fn_min : Node::fn_max, a, b);
      }
      pos_ = start;
      fail("unknown identifier \"" + name + "\"");
    }
    if (consume('(')) {
      const int e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& src_;
  Expression& out_;
  size_t pos_ = 0;
};

Expression Expression::parse(const std::string& source) {
  Expression expr;
  ExpressionParser(source, expr).run();
  return expr;
}

double Expression::eval(int node, double x, double y) const {
  const Node& n = nodes_[node];
  switch (n.kind) {
    case Node::constant: return n.value;
    case Node::var_x: return x;
    case Node::var_y: return y;
    case Node::add: return eval(n.a, x, y) + eval(n.b, x, y);
    case Node::sub: return eval(n.a, x, y) - eval(n.b, x, y);
    case Node::mul: return eval(n.a, x, y) * eval(n.b, x, y);
    case Node::divide: return eval(n.a, x, y) / eval(n.b, x, y);
    case Node::power: return std::pow(eval(n.a, x, y), eval(n.b, x, y));
    case Node::negate: return -eval(n.a, x, y);
    case Node::fn_exp: return std::exp(eval(n.a, x, y));
    case Node::fn_sqrt: return std::sqrt(eval(n.a, x, y));
    case Node::fn_abs: return std::abs(eval(n.a, x, y));
    case Node::fn_min: return std::min(eval(n.a, x, y), eval(n.b, x, y));
    case Node::fn_max: return std::max(eval(n.a, x, y), eval(n.b, x, y));
  }
  return 0;
}

}  // namespace mamix
