#pragma once

// Tiny arithmetic expression compiler for sequence rules such as "1-2^-j"
// or "q^(j-1)". One free variable (name chosen by the caller) plus named
// constants; operators + - * / ^ (right associative), unary minus, and the
// functions exp, log, sqrt, abs.

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace cosub {

class Expression {
public:
    using Fn = std::function<double(double)>;

    Expression() = default;

    static Expression parse(const std::string& text, const std::string& variable = "j",
                            const std::map<std::string, double>& constants = {}) {
        Parser p{text, variable, constants, 0};
        Fn f = p.expr();
        p.skip_ws();
        if (p.pos != text.size())
            throw std::invalid_argument("unexpected '" + text.substr(p.pos) + "' in expression '" + text + "'");
        Expression e;
        e.fn_ = std::move(f);
        e.text_ = text;
        return e;
    }

    double operator()(double x) const {
        if (!fn_) throw std::logic_error("empty expression");
        return fn_(x);
    }
    [[nodiscard]] const std::string& text() const { return text_; }
    [[nodiscard]] bool empty() const { return !fn_; }

private:
    struct Parser {
        const std::string& s;
        const std::string& var;
        const std::map<std::string, double>& consts;
        std::size_t pos;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        Fn expr() {
            Fn lhs = term();
            for (;;) {
                if (eat('+')) {
                    Fn rhs = term();
                    lhs = [lhs, rhs](double x) { return lhs(x) + rhs(x); };
                } else if (eat('-')) {
                    Fn rhs = term();
                    lhs = [lhs, rhs](double x) { return lhs(x) - rhs(x); };
                } else {
                    return lhs;
                }
            }
        }
        Fn term() {
            Fn lhs = unary();
            for (;;) {
                if (eat('*')) {
                    Fn rhs = unary();
                    lhs = [lhs, rhs](double x) { return lhs(x) * rhs(x); };
                } else if (eat('/')) {
                    Fn rhs = unary();
                    lhs = [lhs, rhs](double x) { return lhs(x) / rhs(x); };
                } else {
                    return lhs;
                }
            }
        }
        Fn unary() {
            if (eat('-')) {
                Fn inner = unary();
                return [inner](double x) { return -inner(x); };
            }
            if (eat('+')) return unary();
            return power();
        }
        Fn power() {
            Fn base = primary();
            if (eat('^')) {
                Fn exponent = unary();
                return [base, exponent](double x) { return std::pow(base(x), exponent(x)); };
            }
            return base;
        }
        Fn primary() {
            skip_ws();
            if (pos >= s.size()) throw std::invalid_argument("unexpected end of expression '" + s + "'");
            if (eat('(')) {
                Fn inner = expr();
                if (!eat(')')) throw std::invalid_argument("missing ')' in expression '" + s + "'");
                return inner;
            }
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                const double v = std::stod(s.substr(pos), &used);
                pos += used;
                return [v](double) { return v; };
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const std::size_t start = pos;
                while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
                const std::string name = s.substr(start, pos - start);
                if (name == var) return [](double x) { return x; };
                if (auto it = consts.find(name); it != consts.end()) {
                    const double v = it->second;
                    return [v](double) { return v; };
                }
                double (*fn)(double) = nullptr;
                if (name == "exp") fn = [](double v) { return std::exp(v); };
                else if (name == "log") fn = [](double v) { return std::log(v); };
                else if (name == "sqrt") fn = [](double v) { return std::sqrt(v); };
                else if (name == "abs") fn = [](double v) { return std::abs(v); };
                if (fn == nullptr) throw std::invalid_argument("unknown identifier '" + name + "' in expression '" + s + "'");
                if (!eat('(')) throw std::invalid_argument("expected '(' after " + name);
                Fn arg = expr();
                if (!eat(')')) throw std::invalid_argument("missing ')' in expression '" + s + "'");
                return [fn, arg](double x) { return fn(arg(x)); };
            }
            throw std::invalid_argument(std::string("unexpected character '") + c + "' in expression '" + s + "'");
        }
    };

    Fn fn_;
    std::string text_;
};

}  // namespace cosub
