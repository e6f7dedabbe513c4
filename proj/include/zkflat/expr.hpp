#pragma once

#include <memory>
#include <string>

namespace zkflat {

/// Tiny arithmetic expression evaluator over variables x, y: numbers, pi,
/// + - * / ^, parentheses, and sin/cos/exp/sqrt calls. Used for initial-data
/// specs like "x*(x+1)*sin(pi*y)".
class Expr {
public:
    static Expr parse(const std::string& text);
    double eval(double x, double y) const;

    Expr(Expr&&) noexcept;
    Expr& operator=(Expr&&) noexcept;
    ~Expr();

    struct Node;

private:
    Expr();
    std::unique_ptr<Node> root_;
};

} // namespace zkflat
