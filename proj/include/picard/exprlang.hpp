#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace picard::expr {

/// Variable bindings for evaluation.
using EvalContext = std::map<std::string, double, std::less<>>;

class ParseError : public std::runtime_error {
public:
    ParseError(std::string what, size_t offset)
        : std::runtime_error(std::move(what)), offset(offset) {}

    size_t offset;  // byte offset into the source text
};

class EvalError : public std::runtime_error {
public:
    EvalError(std::string what, std::string subexpr)
        : std::runtime_error(std::move(what)), subexpr(std::move(subexpr)) {}

    std::string subexpr;
};

namespace detail {
struct Node;
}

/// Parsed arithmetic expression. Immutable and shareable; evaluation is pure.
class Expr {
public:
    double eval(const EvalContext& ctx) const;

    /// Fully parenthesized rendering; parse(print()) reproduces the tree.
    std::string print() const;

    friend Expr parse(std::string_view text, const std::set<std::string>& declared_vars);
    friend bool structurally_equal(const Expr& a, const Expr& b);
    friend std::set<std::string> variables(const Expr& e);

private:
    std::shared_ptr<const detail::Node> root_;
};

/// Recursive-descent parser. Precedence: ^ (right) > unary - > * / > + -.
/// Functions: exp log sin cos sqrt abs tanh (unary), min max pow (binary).
/// Identifiers must belong to declared_vars.
Expr parse(std::string_view text, const std::set<std::string>& declared_vars);

bool structurally_equal(const Expr& a, const Expr& b);

/// Names of the variables the expression references.
std::set<std::string> variables(const Expr& e);

}  // namespace picard::expr
