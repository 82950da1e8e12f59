#pragma once

#include "nonlocal/errors.hpp"

#include <memory>
#include <string>
#include <vector>

namespace nonlocal {

/// Arithmetic expression over the variables x and t: numbers, + - * / ^,
/// unary minus, parentheses, sin cos exp abs sqrt pow, and the constant pi.
/// Precedence ^ > unary minus > * / > + -; ^ associates to the right, the
/// other binary operators to the left.
class Expr {
public:
    Expr() = default;

    /// Throws ValidationError with the byte offset and the expected tokens
    /// on malformed input.
    static Expr parse(const std::string& text);

    /// Evaluation is total on finite inputs except division by zero and even
    /// roots of negative numbers, which throw NumericalError.
    double operator()(double x, double t = 0.0) const;

    bool uses_t() const { return uses_t_; }
    const std::string& text() const { return text_; }
    bool empty() const { return nodes_.empty(); }

private:
    struct Node {
        enum class Op {
            Number, VarX, VarT, Add, Sub, Mul, Div, Pow, Neg,
            Sin, Cos, Exp, Abs, Sqrt
        };
        Op op;
        double value = 0.0;
        int a = -1;
        int b = -1;
    };

    double eval_node(int idx, double x, double t) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    bool uses_t_ = false;
    std::string text_;

    friend class ExprParser;
};

}  // namespace nonlocal
