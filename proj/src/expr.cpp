#include "nonlocal/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace nonlocal {

namespace {

[[noreturn]] void syntax_error(std::size_t offset, std::size_t text_size,
                               const std::string& expected) {
    std::ostringstream msg;
    if (offset >= text_size) {
        msg << "syntax error at end-of-input (offset " << offset << "), expected " << expected;
    } else {
        msg << "syntax error at offset " << offset << ", expected " << expected;
    }
    throw ValidationError(msg.str());
}

}  // namespace

class ExprParser {
public:
    explicit ExprParser(const std::string& text) : text_(text) {}

    Expr run() {
        Expr e;
        e.text_ = text_;
        nodes_ = &e.nodes_;
        uses_t_ = &e.uses_t_;
        pos_ = 0;
        e.root_ = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) syntax_error(pos_, text_.size(), "end of expression");
        return e;
    }

private:
    using Node = Expr::Node;

    const std::string& text_;
    std::size_t pos_ = 0;
    std::vector<Node>* nodes_ = nullptr;
    bool* uses_t_ = nullptr;

    int add(Node n) {
        nodes_->push_back(n);
        return static_cast<int>(nodes_->size()) - 1;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    int parse_sum() {
        int lhs = parse_term();
        for (;;) {
            if (consume('+')) {
                lhs = add({Node::Op::Add, 0.0, lhs, parse_term()});
            } else if (consume('-')) {
                lhs = add({Node::Op::Sub, 0.0, lhs, parse_term()});
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (consume('*')) {
                lhs = add({Node::Op::Mul, 0.0, lhs, parse_unary()});
            } else if (consume('/')) {
                lhs = add({Node::Op::Div, 0.0, lhs, parse_unary()});
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        if (consume('-')) return add({Node::Op::Neg, 0.0, parse_unary(), -1});
        return parse_power();
    }

    int parse_power() {
        const int base = parse_primary();
        if (consume('^')) {
            // Right associative; the exponent may carry a unary minus.
            return add({Node::Op::Pow, 0.0, base, parse_unary()});
        }
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) {
            syntax_error(pos_, text_.size(), "a number, variable, function, or \"(\"");
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        if (c == '(') {
            ++pos_;
            const int inner = parse_sum();
            if (!consume(')')) syntax_error(pos_, text_.size(), "\")\"");
            return inner;
        }
        syntax_error(pos_, text_.size(), "a number, variable, function, or \"(\"");
    }

    int parse_number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) syntax_error(pos_, text_.size(), "a number");
        pos_ += static_cast<std::size_t>(end - begin);
        return add({Node::Op::Number, v, -1, -1});
    }

    int parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "x") return add({Node::Op::VarX, 0.0, -1, -1});
        if (name == "t") {
            *uses_t_ = true;
            return add({Node::Op::VarT, 0.0, -1, -1});
        }
        if (name == "pi") return add({Node::Op::Number, M_PI, -1, -1});

        Node::Op op;
        if (name == "sin") op = Node::Op::Sin;
        else if (name == "cos") op = Node::Op::Cos;
        else if (name == "exp") op = Node::Op::Exp;
        else if (name == "abs") op = Node::Op::Abs;
        else if (name == "sqrt") op = Node::Op::Sqrt;
        else if (name == "pow") {
            if (!consume('(')) syntax_error(pos_, text_.size(), "\"(\" after pow");
            const int a = parse_sum();
            if (!consume(',')) syntax_error(pos_, text_.size(), "\",\" between pow arguments");
            const int b = parse_sum();
            if (!consume(')')) syntax_error(pos_, text_.size(), "\")\"");
            return add({Node::Op::Pow, 0.0, a, b});
        } else {
            syntax_error(start, text_.size(),
                         "one of the variables x, t, constant pi, or functions "
                         "sin cos exp abs sqrt pow");
        }
        if (!consume('(')) syntax_error(pos_, text_.size(), "\"(\" after " + name);
        const int a = parse_sum();
        if (!consume(')')) syntax_error(pos_, text_.size(), "\")\"");
        return add({op, 0.0, a, -1});
    }
};

Expr Expr::parse(const std::string& text) { return ExprParser(text).run(); }

double Expr::eval_node(int idx, double x, double t) const {
    const Node& n = nodes_[idx];
    switch (n.op) {
        case Node::Op::Number: return n.value;
        case Node::Op::VarX: return x;
        case Node::Op::VarT: return t;
        case Node::Op::Add: return eval_node(n.a, x, t) + eval_node(n.b, x, t);
        case Node::Op::Sub: return eval_node(n.a, x, t) - eval_node(n.b, x, t);
        case Node::Op::Mul: return eval_node(n.a, x, t) * eval_node(n.b, x, t);
        case Node::Op::Div: {
            const double d = eval_node(n.b, x, t);
            if (d == 0.0) throw NumericalError("expression: division by zero");
            return eval_node(n.a, x, t) / d;
        }
        case Node::Op::Pow: {
            const double base = eval_node(n.a, x, t);
            const double expo = eval_node(n.b, x, t);
            const double r = std::pow(base, expo);
            if (!std::isfinite(r) && std::isfinite(base) && std::isfinite(expo)) {
                throw NumericalError(
                    "expression: pow produced a non-finite value (division by zero or even root "
                    "of a negative number)");
            }
            return r;
        }
        case Node::Op::Neg: return -eval_node(n.a, x, t);
        case Node::Op::Sin: return std::sin(eval_node(n.a, x, t));
        case Node::Op::Cos: return std::cos(eval_node(n.a, x, t));
        case Node::Op::Exp: return std::exp(eval_node(n.a, x, t));
        case Node::Op::Abs: return std::abs(eval_node(n.a, x, t));
        case Node::Op::Sqrt: {
            const double v = eval_node(n.a, x, t);
            if (v < 0.0) throw NumericalError("expression: square root of a negative number");
            return std::sqrt(v);
        }
    }
    throw NumericalError("expression: corrupt node");
}

double Expr::operator()(double x, double t) const {
    if (nodes_.empty()) throw ValidationError("expression: empty");
    return eval_node(root_, x, t);
}

}  // namespace nonlocal
