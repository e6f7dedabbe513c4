#include "zkflat/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "zkflat/error.hpp"

namespace zkflat {

struct Expr::Node {
    enum class Op { Const, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt };
    Op op = Op::Const;
    double value = 0.0;
    std::unique_ptr<Node> a, b;

    double eval(double x, double y) const {
        switch (op) {
            case Op::Const: return value;
            case Op::VarX: return x;
            case Op::VarY: return y;
            case Op::Add: return a->eval(x, y) + b->eval(x, y);
            case Op::Sub: return a->eval(x, y) - b->eval(x, y);
            case Op::Mul: return a->eval(x, y) * b->eval(x, y);
            case Op::Div: return a->eval(x, y) / b->eval(x, y);
            case Op::Pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Op::Neg: return -a->eval(x, y);
            case Op::Sin: return std::sin(a->eval(x, y));
            case Op::Cos: return std::cos(a->eval(x, y));
            case Op::Exp: return std::exp(a->eval(x, y));
            case Op::Sqrt: return std::sqrt(a->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using Node = Expr::Node;
using NodePtr = std::unique_ptr<Node>;

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_unique<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (true) {
            if (eat('+'))
                lhs = make(Node::Op::Add, std::move(lhs), parse_term());
            else if (eat('-'))
                lhs = make(Node::Op::Sub, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        while (true) {
            if (eat('*'))
                lhs = make(Node::Op::Mul, std::move(lhs), parse_unary());
            else if (eat('/'))
                lhs = make(Node::Op::Div, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return make(Node::Op::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (eat('^')) return make(Node::Op::Pow, std::move(base), parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip();
        require(pos < s.size(), "expr: unexpected end of input");
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            const double v = std::stod(s.substr(pos), &used);
            pos += used;
            auto n = make(Node::Op::Const);
            n->value = v;
            return n;
        }
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            require(eat(')'), "expr: missing ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t end = pos;
            while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
            const std::string name = s.substr(pos, end - pos);
            pos = end;
            if (name == "x") return make(Node::Op::VarX);
            if (name == "y") return make(Node::Op::VarY);
            if (name == "pi") {
                auto n = make(Node::Op::Const);
                n->value = 3.14159265358979323846264338327950288;
                return n;
            }
            Node::Op op;
            if (name == "sin")
                op = Node::Op::Sin;
            else if (name == "cos")
                op = Node::Op::Cos;
            else if (name == "exp")
                op = Node::Op::Exp;
            else if (name == "sqrt")
                op = Node::Op::Sqrt;
            else
                throw Error("expr: unknown identifier '" + name + "'");
            require(eat('('), "expr: expected '(' after " + name);
            NodePtr arg = parse_expr();
            require(eat(')'), "expr: missing ')' after " + name + " argument");
            return make(op, std::move(arg));
        }
        throw Error(std::string("expr: unexpected character '") + c + "'");
    }
};

} // namespace

Expr::Expr() = default;
Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(Expr&&) noexcept = default;
Expr::~Expr() = default;

Expr Expr::parse(const std::string& text) {
    Parser p(text);
    Expr e;
    e.root_ = p.parse_expr();
    p.skip();
    require(p.pos == text.size(), "expr: trailing characters after expression");
    return e;
}

double Expr::eval(double x, double y) const {
    require(root_ != nullptr, "expr: empty expression");
    return root_->eval(x, y);
}

} // namespace zkflat
