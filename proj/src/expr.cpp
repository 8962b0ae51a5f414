#include "wgspec/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace wgspec {

Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
Dual2 operator-(const Dual2& a) { return {-a.v, -a.d1, -a.d2}; }

Dual2 operator*(const Dual2& a, const Dual2& b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

Dual2 operator/(const Dual2& a, const Dual2& b) {
    const double iv = 1.0 / b.v;
    Dual2 inv{iv, -b.d1 * iv * iv, (2.0 * b.d1 * b.d1 - b.v * b.d2) * iv * iv * iv};
    return a * inv;
}

// Chain rule through a scalar function with given f, f', f'' at g.v.
static Dual2 chain(const Dual2& g, double f, double fp, double fpp) {
    return {f, fp * g.d1, fpp * g.d1 * g.d1 + fp * g.d2};
}

Dual2 sin(const Dual2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
Dual2 cos(const Dual2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
Dual2 exp(const Dual2& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
Dual2 sqrt(const Dual2& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
Dual2 sech(const Dual2& a) {
    const double s = 1.0 / std::cosh(a.v);
    const double t = std::tanh(a.v);
    return chain(a, s, -s * t, s * (t * t - s * s));
}

Dual2 pow(const Dual2& a, const Dual2& b) {
    if (b.d1 == 0.0 && b.d2 == 0.0) {
        const double p = b.v;
        const double f = std::pow(a.v, p);
        const double fp = p * std::pow(a.v, p - 1.0);
        const double fpp = p * (p - 1.0) * std::pow(a.v, p - 2.0);
        return chain(a, f, fp, fpp);
    }
    // General a^b = exp(b ln a); requires a > 0.
    const double la = std::log(a.v);
    Dual2 ln{la, a.d1 / a.v, (a.d2 * a.v - a.d1 * a.d1) / (a.v * a.v)};
    return exp(b * ln);
}

namespace {

double fsech(double x) { return 1.0 / std::cosh(x); }

} // namespace

class ExprParser {
public:
    ExprParser(const std::string& src, const std::vector<std::string>& vars, Expr& out)
        : src_(src), vars_(vars), out_(out) {}

    void run() {
        out_.source_ = src_;
        out_.n_vars_ = vars_.size();
        pos_ = 0;
        const int root = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ExprError("trailing characters in expression: '" + src_.substr(pos_) + "'");
        (void)root;
    }

private:
    using Op = Expr::Op;

    int push(Op op, int a = -1, int b = -1, double num = 0.0) {
        out_.nodes_.push_back({op, a, b, num});
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (eat('+')) lhs = push(Op::Add, lhs, parse_term());
            else if (eat('-')) lhs = push(Op::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            if (eat('*')) lhs = push(Op::Mul, lhs, parse_factor());
            else if (eat('/')) lhs = push(Op::Div, lhs, parse_factor());
            else return lhs;
        }
    }

    // factor := '-' factor | power ;  power := atom ['^' factor]
    int parse_factor() {
        if (eat('-')) return push(Op::Neg, parse_factor());
        if (eat('+')) return parse_factor();
        int base = parse_atom();
        if (eat('^')) return push(Op::Pow, base, parse_factor());
        return base;
    }

    int parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ExprError("unexpected end of expression");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double value = std::strtod(src_.c_str() + pos_, &end);
            pos_ = static_cast<size_t>(end - src_.c_str());
            return push(Op::Num, -1, -1, value);
        }
        if (c == '(') {
            ++pos_;
            const int inner = parse_expr();
            if (!eat(')')) throw ExprError("missing ')' in expression");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string name = src_.substr(start, pos_ - start);
            if (eat('(')) {
                const int arg = parse_expr();
                if (!eat(')')) throw ExprError("missing ')' after " + name);
                if (name == "sin") return push(Op::Sin, arg);
                if (name == "cos") return push(Op::Cos, arg);
                if (name == "exp") return push(Op::Exp, arg);
                if (name == "sech") return push(Op::Sech, arg);
                if (name == "sqrt") return push(Op::Sqrt, arg);
                throw ExprError("unknown function '" + name + "'");
            }
            for (size_t i = 0; i < vars_.size(); ++i)
                if (vars_[i] == name) return push(Op::Var, -1, -1, static_cast<double>(i));
            throw ExprError("unknown identifier '" + name + "'");
        }
        throw ExprError(std::string("unexpected character '") + c + "' in expression");
    }

    const std::string& src_;
    const std::vector<std::string>& vars_;
    Expr& out_;
    size_t pos_ = 0;
};

Expr Expr::parse(const std::string& source, const std::vector<std::string>& variables) {
    Expr e;
    ExprParser(source, variables, e).run();
    return e;
}

Expr Expr::parse_x(const std::string& source) { return parse(source, {"x"}); }
Expr Expr::parse_p(const std::string& source) { return parse(source, {"p1", "p2", "p3"}); }

double Expr::eval(const std::vector<double>& args) const {
    if (nodes_.empty()) throw ExprError("evaluating empty expression");
    std::vector<double> value(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::Num: value[i] = n.num; break;
            case Op::Var: value[i] = args.at(static_cast<size_t>(n.num)); break;
            case Op::Add: value[i] = value[n.a] + value[n.b]; break;
            case Op::Sub: value[i] = value[n.a] - value[n.b]; break;
            case Op::Mul: value[i] = value[n.a] * value[n.b]; break;
            case Op::Div: value[i] = value[n.a] / value[n.b]; break;
            case Op::Pow: value[i] = std::pow(value[n.a], value[n.b]); break;
            case Op::Neg: value[i] = -value[n.a]; break;
            case Op::Sin: value[i] = std::sin(value[n.a]); break;
            case Op::Cos: value[i] = std::cos(value[n.a]); break;
            case Op::Exp: value[i] = std::exp(value[n.a]); break;
            case Op::Sech: value[i] = fsech(value[n.a]); break;
            case Op::Sqrt: value[i] = std::sqrt(value[n.a]); break;
        }
    }
    return value.back();
}

Dual2 Expr::eval(const std::vector<Dual2>& args) const {
    if (nodes_.empty()) throw ExprError("evaluating empty expression");
    std::vector<Dual2> value(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::Num: value[i] = Dual2::constant(n.num); break;
            case Op::Var: value[i] = args.at(static_cast<size_t>(n.num)); break;
            case Op::Add: value[i] = value[n.a] + value[n.b]; break;
            case Op::Sub: value[i] = value[n.a] - value[n.b]; break;
            case Op::Mul: value[i] = value[n.a] * value[n.b]; break;
            case Op::Div: value[i] = value[n.a] / value[n.b]; break;
            case Op::Pow: value[i] = pow(value[n.a], value[n.b]); break;
            case Op::Neg: value[i] = -value[n.a]; break;
            case Op::Sin: value[i] = sin(value[n.a]); break;
            case Op::Cos: value[i] = cos(value[n.a]); break;
            case Op::Exp: value[i] = exp(value[n.a]); break;
            case Op::Sech: value[i] = sech(value[n.a]); break;
            case Op::Sqrt: value[i] = sqrt(value[n.a]); break;
        }
    }
    return value.back();
}

std::array<double, 3> Expr::derivatives2(double x) const {
    const Dual2 r = eval(std::vector<Dual2>{Dual2::variable(x)});
    return {r.v, r.d1, r.d2};
}

Eigen::Vector3d Expr::gradient(const Eigen::Vector3d& p) const {
    Eigen::Vector3d g;
    for (int k = 0; k < 3; ++k) {
        std::vector<Dual2> args = {Dual2::constant(p[0]), Dual2::constant(p[1]),
                                   Dual2::constant(p[2])};
        args[k] = Dual2::variable(p[k]);
        g[k] = eval(args).d1;
    }
    return g;
}

} // namespace wgspec
