#pragma once

// Entry formulas: a small arithmetic language for k(x, y) kernels and a(i, j)
// infinite-matrix entries.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | base ('^' factor)?
//   base   := number | var | func '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables are i, j (indices >= 1) or x, y (points of [0,1]); a formula may not mix
// the two. Functions: exp(a), min(a, b), max(a, b). '^' is right-associative and binds
// tighter than unary minus, so -2^2 = -4.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace hadamard {

enum class FormulaDomain { constant, indices, unit_square };

inline const char* to_string(FormulaDomain d) {
    switch (d) {
        case FormulaDomain::constant: return "constant";
        case FormulaDomain::indices: return "indices";
        case FormulaDomain::unit_square: return "unit_square";
    }
    return "?";
}

namespace expr {

enum class Op { number, var_first, var_second, neg, add, sub, mul, div, pow, exp, min, max };

struct Node {
    Op op = Op::number;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;
};

using NodePtr = std::shared_ptr<const Node>;

inline double eval(const Node& n, double a, double b) {
    switch (n.op) {
        case Op::number: return n.value;
        case Op::var_first: return a;
        case Op::var_second: return b;
        case Op::neg: return -eval(*n.lhs, a, b);
        case Op::add: return eval(*n.lhs, a, b) + eval(*n.rhs, a, b);
        case Op::sub: return eval(*n.lhs, a, b) - eval(*n.rhs, a, b);
        case Op::mul: return eval(*n.lhs, a, b) * eval(*n.rhs, a, b);
        case Op::div: return eval(*n.lhs, a, b) / eval(*n.rhs, a, b);
        case Op::pow: return std::pow(eval(*n.lhs, a, b), eval(*n.rhs, a, b));
        case Op::exp: return std::exp(eval(*n.lhs, a, b));
        case Op::min: return std::fmin(eval(*n.lhs, a, b), eval(*n.rhs, a, b));
        case Op::max: return std::fmax(eval(*n.lhs, a, b), eval(*n.rhs, a, b));
    }
    return std::nan("");
}

/// Fully parenthesized source text; parsing it yields an identical tree.
inline std::string print(const Node& n, FormulaDomain d) {
    const bool idx = d == FormulaDomain::indices;
    auto bin = [&](const char* sym) { return "(" + print(*n.lhs, d) + " " + sym + " " + print(*n.rhs, d) + ")"; };
    switch (n.op) {
        case Op::number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            return buf;
        }
        case Op::var_first: return idx ? "i" : "x";
        case Op::var_second: return idx ? "j" : "y";
        case Op::neg: return "(-" + print(*n.lhs, d) + ")";
        case Op::add: return bin("+");
        case Op::sub: return bin("-");
        case Op::mul: return bin("*");
        case Op::div: return bin("/");
        case Op::pow: return bin("^");
        case Op::exp: return "exp(" + print(*n.lhs, d) + ")";
        case Op::min: return "min(" + print(*n.lhs, d) + ", " + print(*n.rhs, d) + ")";
        case Op::max: return "max(" + print(*n.lhs, d) + ", " + print(*n.rhs, d) + ")";
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        auto n = expression();
        skip_ws();
        if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return n;
    }

    FormulaDomain domain() const { return domain_; }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    FormulaDomain domain_ = FormulaDomain::constant;

    [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, pos_); }
    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw parse_error(what, at); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but input ended");
            fail(std::string("expected '") + c + "'");
        }
    }

    static NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        n->value = v;
        return n;
    }

    NodePtr expression() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Op::add, lhs, term());
            else if (accept('-')) lhs = make(Op::sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        auto lhs = factor();
        for (;;) {
            if (accept('*')) lhs = make(Op::mul, lhs, factor());
            else if (accept('/')) lhs = make(Op::div, lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() {
        if (accept('-')) return make(Op::neg, factor());
        auto b = base();
        if (accept('^')) return make(Op::pow, b, factor());
        return b;
    }

    void use_domain(FormulaDomain d, std::size_t at) {
        if (domain_ != FormulaDomain::constant && domain_ != d) fail_at("formula mixes i/j with x/y", at);
        domain_ = d;
    }

    NodePtr base() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (accept('(')) {
            auto e = expression();
            expect(')');
            return e;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                pos_ = q;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        const auto [end, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || end != src_.data() + pos_ || !std::isfinite(v)) fail_at("malformed number", start);
        return make(Op::number, nullptr, nullptr, v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "i" || name == "j") {
            use_domain(FormulaDomain::indices, start);
            return make(name == "i" ? Op::var_first : Op::var_second);
        }
        if (name == "x" || name == "y") {
            use_domain(FormulaDomain::unit_square, start);
            return make(name == "x" ? Op::var_first : Op::var_second);
        }
        Op op;
        std::size_t arity;
        if (name == "exp") op = Op::exp, arity = 1;
        else if (name == "min") op = Op::min, arity = 2;
        else if (name == "max") op = Op::max, arity = 2;
        else fail_at("unknown identifier '" + std::string(name) + "'", start);
        expect('(');
        auto a = expression();
        NodePtr b;
        if (arity == 2) {
            expect(',');
            b = expression();
        }
        expect(')');
        return make(op, a, b);
    }
};

}  // namespace expr

/// A parsed entry formula, checked to be finite and >= 0 on its domain.
class EntryFormula {
public:
    /// Samples used at construction: x, y on a 33-point grid of [0,1]; i, j in 1..32.
    static constexpr std::size_t kSampleGrid = 32;

    EntryFormula() = default;

    const std::string& source() const noexcept { return source_; }
    FormulaDomain domain() const noexcept { return domain_; }
    const expr::Node& ast() const { return *ast_; }

    double operator()(double a, double b) const { return expr::eval(*ast_, a, b); }

    /// Value at (a, b), or domain_error naming the point when it is negative or not finite.
    double checked(double a, double b) const {
        const double v = (*this)(a, b);
        if (!std::isfinite(v) || v < 0.0) {
            const bool idx = domain_ == FormulaDomain::indices;
            char buf[160];
            std::snprintf(buf, sizeof buf, "formula '%s' gives %g at (%s=%.17g, %s=%.17g)", source_.c_str(), v,
                          idx ? "i" : "x", a, idx ? "j" : "y", b);
            throw domain_error(buf);
        }
        return v;
    }

    std::string to_string() const { return expr::print(*ast_, domain_); }

    friend EntryFormula parse_entry_expr(std::string_view source, std::optional<FormulaDomain> expected);

private:
    std::string source_;
    FormulaDomain domain_ = FormulaDomain::constant;
    expr::NodePtr ast_;

    void validate_samples() const {
        const std::size_t g = kSampleGrid;
        const bool idx = domain_ == FormulaDomain::indices;
        for (std::size_t p = 0; p <= g; ++p) {
            for (std::size_t q = 0; q <= g; ++q) {
                if (idx && (p == 0 || q == 0)) continue;
                const double a = idx ? static_cast<double>(p) : static_cast<double>(p) / static_cast<double>(g);
                const double b = idx ? static_cast<double>(q) : static_cast<double>(q) / static_cast<double>(g);
                checked(a, b);
            }
        }
    }
};

/// Parses and validates by sampling. With `expected` set, a formula over the other
/// variable pair is rejected; a constant formula takes the expected domain.
inline EntryFormula parse_entry_expr(std::string_view source, std::optional<FormulaDomain> expected = std::nullopt) {
    expr::Parser p(source);
    EntryFormula f;
    f.ast_ = p.parse();
    f.source_ = std::string(source);
    f.domain_ = p.domain();
    if (expected) {
        if (f.domain_ == FormulaDomain::constant) {
            f.domain_ = *expected;
        } else if (f.domain_ != *expected) {
            throw domain_error(std::string("formula '") + f.source_ + "' is over " + to_string(f.domain_) +
                               " variables but " + to_string(*expected) + " variables are required");
        }
    }
    f.validate_samples();
    return f;
}

}  // namespace hadamard
