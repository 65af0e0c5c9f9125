// Arithmetic expressions in x and y: operators + - * / ^, functions
// exp, sqrt, min, max, abs. Used to load custom problem definitions.
#pragma once

#include <string>
#include <vector>

namespace mamix {

class Expression {
 public:
  static Expression parse(const std::string& source);

  double operator()(double x, double y) const { return eval(root_, x, y); }

 private:
  struct Node {
    enum Kind {
      constant,
      var_x,
      var_y,
      add,
      sub,
      mul,
      divide,
      power,
      negate,
      fn_exp,
      fn_sqrt,
      fn_abs,
      fn_min,
      fn_max
    } kind = constant;
    double value = 0;
    int a = -1, b = -1;
  };

  double eval(int node, double x, double y) const;

  std::vector<Node> nodes_;
  int root_ = -1;

  friend class ExpressionParser;
};

}  // namespace mamix
