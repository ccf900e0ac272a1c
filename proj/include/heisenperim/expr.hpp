#pragma once

// Tiny arithmetic expression grammar for graph surfaces: +, -, *, /, ^
// (constant exponent), abs(...), numbers, x, y. Expressions differentiate
// symbolically, so graph surfaces built from them carry exact first and
// second derivatives.

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "heisenperim/surfaces.hpp"

namespace heis {

class Expr {
  public:
    using Ptr = std::shared_ptr<const Expr>;

    enum class Op { num, var_x, var_y, add, sub, mul, div, pow, neg, abs };

    static Ptr number(double v) { return std::make_shared<Expr>(Op::num, v); }
    static Ptr var(char which) {
        return std::make_shared<Expr>(which == 'x' ? Op::var_x : Op::var_y, 0.0);
    }
    static Ptr make(Op op, Ptr a, Ptr b = nullptr) {
        return std::make_shared<Expr>(op, std::move(a), std::move(b));
    }

    Expr(Op op, double v) : op_(op), value_(v) {}
    Expr(Op op, Ptr a, Ptr b) : op_(op), a_(std::move(a)), b_(std::move(b)) {}

    double eval(double x, double y) const {
        switch (op_) {
            case Op::num: return value_;
            case Op::var_x: return x;
            case Op::var_y: return y;
            case Op::add: return a_->eval(x, y) + b_->eval(x, y);
            case Op::sub: return a_->eval(x, y) - b_->eval(x, y);
            case Op::mul: return a_->eval(x, y) * b_->eval(x, y);
            case Op::div: return a_->eval(x, y) / b_->eval(x, y);
            case Op::pow: return std::pow(a_->eval(x, y), b_->value_);
            case Op::neg: return -a_->eval(x, y);
            case Op::abs: return std::abs(a_->eval(x, y));
        }
        return 0.0;
    }

    // Symbolic derivative; d|u| = sgn(u) u'.
    Ptr diff(char var) const {
        const auto zero = number(0.0);
        switch (op_) {
            case Op::num: return zero;
            case Op::var_x: return number(var == 'x' ? 1.0 : 0.0);
            case Op::var_y: return number(var == 'y' ? 1.0 : 0.0);
            case Op::add: return simplify(Op::add, a_->diff(var), b_->diff(var));
            case Op::sub: return simplify(Op::sub, a_->diff(var), b_->diff(var));
            case Op::mul:
                return simplify(Op::add, simplify(Op::mul, a_->diff(var), b_),
                                simplify(Op::mul, a_, b_->diff(var)));
            case Op::div:
                return simplify(
                    Op::div,
                    simplify(Op::sub, simplify(Op::mul, a_->diff(var), b_),
                             simplify(Op::mul, a_, b_->diff(var))),
                    simplify(Op::mul, b_, b_));
            case Op::pow: {
                // d(u^c) = c u^(c-1) u' for constant exponent c.
                const double c = b_->value_;
                return simplify(Op::mul, number(c),
                                simplify(Op::mul, make(Op::pow, a_, number(c - 1.0)),
                                         a_->diff(var)));
            }
            case Op::neg: return simplify(Op::neg, a_->diff(var), nullptr);
            case Op::abs: {
                // sgn(u) u' written as u / |u| * u'; zero set handled by the
                // quadrature's kink tolerance.
                const Ptr sgn = simplify(Op::div, a_, make(Op::abs, a_));
                return simplify(Op::mul, sgn, a_->diff(var));
            }
        }
        return zero;
    }

    bool is_const(double v) const { return op_ == Op::num && value_ == v; }
    Op op() const { return op_; }
    double value() const { return value_; }
    const Ptr& child_a() const { return a_; }

  private:
    static Ptr simplify(Op op, Ptr a, Ptr b) {
        switch (op) {
            case Op::add:
                if (a->is_const(0.0)) return b;
                if (b && b->is_const(0.0)) return a;
                break;
            case Op::sub:
                if (b && b->is_const(0.0)) return a;
                break;
            case Op::mul:
                if (a->is_const(0.0) || (b && b->is_const(0.0))) return number(0.0);
                if (a->is_const(1.0)) return b;
                if (b && b->is_const(1.0)) return a;
                break;
            case Op::div:
                if (a->is_const(0.0)) return number(0.0);
                if (b && b->is_const(1.0)) return a;
                break;
            case Op::neg:
                if (a->is_const(0.0)) return a;
                return make(Op::neg, a, nullptr);
            default: break;
        }
        return make(op, std::move(a), std::move(b));
    }

    Op op_;
    double value_ = 0.0;
    Ptr a_, b_;
};

namespace detail {

class ExprParser {
  public:
    explicit ExprParser(std::string src) : src_(std::move(src)) {}

    Expr::Ptr parse() {
        Expr::Ptr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size())
            throw std::invalid_argument("expression: trailing input at '" + src_.substr(pos_) + "'");
        return e;
    }

  private:
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

    Expr::Ptr parse_sum() {
        Expr::Ptr e = parse_product();
        for (;;) {
            if (eat('+'))
                e = Expr::make(Expr::Op::add, e, parse_product());
            else if (eat('-'))
                e = Expr::make(Expr::Op::sub, e, parse_product());
            else
                return e;
        }
    }

    Expr::Ptr parse_product() {
        Expr::Ptr e = parse_unary();
        for (;;) {
            if (eat('*'))
                e = Expr::make(Expr::Op::mul, e, parse_unary());
            else if (eat('/'))
                e = Expr::make(Expr::Op::div, e, parse_unary());
            else
                return e;
        }
    }

    // Unary minus binds looser than '^': -x^2 is -(x^2).
    Expr::Ptr parse_unary() {
        if (eat('-')) return Expr::make(Expr::Op::neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    Expr::Ptr parse_power() {
        Expr::Ptr base = parse_atom();
        if (eat('^')) {
            Expr::Ptr exp = parse_unary();
            // Fold a leading minus on a numeric exponent.
            if (exp->op() == Expr::Op::neg && exp->child_a() &&
                exp->child_a()->op() == Expr::Op::num)
                exp = Expr::number(-exp->child_a()->value());
            if (exp->op() != Expr::Op::num)
                throw std::invalid_argument("expression: exponent must be a constant");
            return Expr::make(Expr::Op::pow, base, exp);
        }
        return base;
    }

    Expr::Ptr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw std::invalid_argument("expression: unexpected end");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr::Ptr e = parse_sum();
            if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(src_.substr(pos_), &used);
            pos_ += used;
            return Expr::number(v);
        }
        if (src_.compare(pos_, 3, "abs") == 0) {
            pos_ += 3;
            if (!eat('(')) throw std::invalid_argument("expression: abs needs '('");
            Expr::Ptr e = parse_sum();
            if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
            return Expr::make(Expr::Op::abs, e);
        }
        if (c == 'x' || c == 'y') {
            ++pos_;
            return Expr::var(c);
        }
        throw std::invalid_argument(std::string("expression: unexpected character '") + c + "'");
    }

    std::string src_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr::Ptr parse_expression(const std::string& src) {
    return detail::ExprParser(src).parse();
}

// Graph surface from an expression string, with exact rule-based derivatives.
inline GraphSurface graph_from_expression(const std::string& src, Polygon2 domain) {
    const Expr::Ptr f = parse_expression(src);
    const Expr::Ptr fx = f->diff('x');
    const Expr::Ptr fy = f->diff('y');
    const Expr::Ptr fxx = fx->diff('x');
    const Expr::Ptr fxy = fx->diff('y');
    const Expr::Ptr fyy = fy->diff('y');
    GraphSurface s;
    s.f = [f](double x, double y) { return f->eval(x, y); };
    s.fx = [fx](double x, double y) { return fx->eval(x, y); };
    s.fy = [fy](double x, double y) { return fy->eval(x, y); };
    s.fxx = [fxx](double x, double y) { return fxx->eval(x, y); };
    s.fxy = [fxy](double x, double y) { return fxy->eval(x, y); };
    s.fyy = [fyy](double x, double y) { return fyy->eval(x, y); };
    s.domain = std::move(domain);
    return s;
}

}  // namespace heis
