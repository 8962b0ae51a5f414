#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgspec/errors.hpp"

namespace wgspec {

// Second-order forward-mode dual number: carries f, f', f'' through all
// arithmetic, so expression-defined functions have machine-exact derivatives.
struct Dual2 {
    double v = 0.0, d1 = 0.0, d2 = 0.0;

    static Dual2 constant(double c) { return {c, 0.0, 0.0}; }
    static Dual2 variable(double x) { return {x, 1.0, 0.0}; }
};

Dual2 operator+(const Dual2& a, const Dual2& b);
Dual2 operator-(const Dual2& a, const Dual2& b);
Dual2 operator-(const Dual2& a);
Dual2 operator*(const Dual2& a, const Dual2& b);
Dual2 operator/(const Dual2& a, const Dual2& b);
Dual2 sin(const Dual2& a);
Dual2 cos(const Dual2& a);
Dual2 exp(const Dual2& a);
Dual2 sqrt(const Dual2& a);
Dual2 sech(const Dual2& a);
Dual2 pow(const Dual2& a, const Dual2& b);

// Expression over a fixed variable list.  Grammar: numbers, the declared
// identifiers, + - * / ^, parentheses, and sin, cos, exp, sech, sqrt.
class Expr {
public:
    Expr() = default;

    static Expr parse(const std::string& source, const std::vector<std::string>& variables);

    // Convenience parsers for the two variable sets used in configs.
    static Expr parse_x(const std::string& source);    // variable "x"
    static Expr parse_p(const std::string& source);    // variables "p1","p2","p3"

    double eval(const std::vector<double>& args) const;
    Dual2 eval(const std::vector<Dual2>& args) const;

    double operator()(double x) const { return eval(std::vector<double>{x}); }

    // f, f', f'' at x for a single-variable expression.
    std::array<double, 3> derivatives2(double x) const;

    // Gradient of a p1,p2,p3 expression.
    Eigen::Vector3d gradient(const Eigen::Vector3d& p) const;

    bool empty() const { return nodes_.empty(); }
    const std::string& source() const { return source_; }

private:
    enum class Op : uint8_t {
        Num, Var, Add, Sub, Mul, Div, Pow, Neg,
        Sin, Cos, Exp, Sech, Sqrt
    };
    struct Node {
        Op op;
        int a = -1, b = -1;  // child indices
        double num = 0.0;    // Num payload, or Var index
    };

    std::vector<Node> nodes_;  // post-order; last node is the root
    std::string source_;
    size_t n_vars_ = 0;

    friend class ExprParser;
};

} // namespace wgspec
