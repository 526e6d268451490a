#include "picard/exprlang.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace picard::expr {

namespace detail {

struct Node {
    enum class Kind { number, variable, negate, binary, call1, call2 };

    Kind kind;
    double number = 0.0;
    std::string name;  // variable or function name
    char op = 0;       // + - * / ^
    std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

std::string print_node(const Node& n) {
    switch (n.kind) {
        case Node::Kind::number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            return buf;
        }
        case Node::Kind::variable:
            return n.name;
        case Node::Kind::negate:
            return "(-" + print_node(*n.a) + ")";
        case Node::Kind::binary:
            return "(" + print_node(*n.a) + n.op + print_node(*n.b) + ")";
        case Node::Kind::call1:
            return n.name + "(" + print_node(*n.a) + ")";
        case Node::Kind::call2:
            return n.name + "(" + print_node(*n.a) + "," + print_node(*n.b) + ")";
    }
    return {};
}

double eval_node(const Node& n, const EvalContext& ctx) {
    switch (n.kind) {
        case Node::Kind::number:
            return n.number;
        case Node::Kind::variable: {
            const auto it = ctx.find(n.name);
            if (it == ctx.end()) throw EvalError("unbound variable: " + n.name, n.name);
            return it->second;
        }
        case Node::Kind::negate:
            return -eval_node(*n.a, ctx);
        case Node::Kind::binary: {
            const double a = eval_node(*n.a, ctx);
            const double b = eval_node(*n.b, ctx);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': {
                    const double v = std::pow(a, b);
                    if (std::isnan(v) || (a == 0.0 && b < 0.0))
                        throw EvalError("domain error in exponentiation", print_node(n));
                    return v;
                }
            }
            return 0.0;
        }
        case Node::Kind::call1: {
            const double a = eval_node(*n.a, ctx);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "log") {
                if (a < 0.0) throw EvalError("log of a negative number", print_node(n));
                return std::log(a);
            }
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "sqrt") {
                if (a < 0.0) throw EvalError("sqrt of a negative number", print_node(n));
                return std::sqrt(a);
            }
            if (n.name == "abs") return std::abs(a);
            if (n.name == "tanh") return std::tanh(a);
            return 0.0;
        }
        case Node::Kind::call2: {
            const double a = eval_node(*n.a, ctx);
            const double b = eval_node(*n.b, ctx);
            if (n.name == "min") return std::min(a, b);
            if (n.name == "max") return std::max(a, b);
            // pow
            const double v = std::pow(a, b);
            if (std::isnan(v) || (a == 0.0 && b < 0.0))
                throw EvalError("domain error in pow", print_node(n));
            return v;
        }
    }
    return 0.0;
}

bool equal_nodes(const Node& x, const Node& y) {
    if (x.kind != y.kind || x.op != y.op || x.name != y.name) return false;
    if (x.kind == Node::Kind::number) return x.number == y.number;
    if (x.a && (!y.a || !equal_nodes(*x.a, *y.a))) return false;
    if (x.b && (!y.b || !equal_nodes(*x.b, *y.b))) return false;
    return true;
}

namespace {

bool is_unary_fn(std::string_view s) {
    return s == "exp" || s == "log" || s == "sin" || s == "cos" || s == "sqrt" || s == "abs" ||
           s == "tanh";
}
bool is_binary_fn(std::string_view s) { return s == "min" || s == "max" || s == "pow"; }

class Parser {
public:
    Parser(std::string_view text, const std::set<std::string>& vars)
        : text_(text), vars_(vars) {}

    NodePtr run() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    const std::set<std::string>& vars_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("parse error at offset " + std::to_string(pos_) + ": " + what, pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        NodePtr left = parse_product();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return left;
            ++pos_;
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::binary;
            n->op = c;
            n->a = std::move(left);
            n->b = parse_product();
            left = std::move(n);
        }
    }

    NodePtr parse_product() {
        NodePtr left = parse_unary();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return left;
            ++pos_;
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::binary;
            n->op = c;
            n->a = std::move(left);
            n->b = parse_unary();
            left = std::move(n);
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::negate;
            n->a = parse_unary();
            return n;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (peek() == '^') {
            ++pos_;
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::binary;
            n->op = '^';
            n->a = std::move(base);
            n->b = parse_unary();  // right-associative; exponent may be signed
            return n;
        }
        return base;
    }

    NodePtr parse_primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("expected a number, variable, function call, or '('");
    }

    NodePtr parse_number() {
        skip_ws();
        double value = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{}) fail("malformed number");
        pos_ = static_cast<size_t>(ptr - text_.data());
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->number = value;
        return n;
    }

    NodePtr parse_ident() {
        skip_ws();
        const size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        if (peek() == '(') {
            const bool unary = is_unary_fn(name);
            const bool binary = is_binary_fn(name);
            if (!unary && !binary) {
                pos_ = start;
                fail("unknown function: " + name);
            }
            ++pos_;  // '('
            auto n = std::make_shared<Node>();
            n->kind = unary ? Node::Kind::call1 : Node::Kind::call2;
            n->name = name;
            n->a = parse_sum();
            if (binary) {
                if (!consume(',')) fail("expected ',' (function " + name + " takes 2 arguments)");
                n->b = parse_sum();
            } else if (peek() == ',') {
                fail("function " + name + " takes 1 argument");
            }
            if (!consume(')')) fail("expected ')'");
            return n;
        }

        if (is_unary_fn(name) || is_binary_fn(name)) {
            pos_ = start;
            fail("function " + name + " requires arguments");
        }
        if (!vars_.count(name)) {
            pos_ = start;
            fail("unknown identifier: " + name);
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::variable;
        n->name = name;
        return n;
    }
};

}  // namespace
}  // namespace detail

double Expr::eval(const EvalContext& ctx) const { return detail::eval_node(*root_, ctx); }

std::string Expr::print() const { return detail::print_node(*root_); }

Expr parse(std::string_view text, const std::set<std::string>& declared_vars) {
    if (text.empty()) throw ParseError("empty expression", 0);
    Expr e;
    e.root_ = detail::Parser(text, declared_vars).run();
    return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    return detail::equal_nodes(*a.root_, *b.root_);
}

namespace {
void collect_vars(const detail::Node& n, std::set<std::string>& out) {
    if (n.kind == detail::Node::Kind::variable) out.insert(n.name);
    if (n.a) collect_vars(*n.a, out);
    if (n.b) collect_vars(*n.b, out);
}
}  // namespace

std::set<std::string> variables(const Expr& e) {
    std::set<std::string> out;
    collect_vars(*e.root_, out);
    return out;
}

}  // namespace picard::expr
