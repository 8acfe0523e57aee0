#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "fluxtrap/expr.hpp"

namespace fluxtrap {

// Expression grammar (see docs/expression-grammar.md for the EBNF):
//
//   expr     = term { ("+" | "-") term } ;
//   term     = factor { ("*" | "/") factor } ;
//   factor   = "-" factor | power ;
//   power    = atom [ "^" exponent ] ;
//   exponent = [ "-" ] integer | "(" [ "-" ] integer ")" ;
//   atom     = integer | identifier | "(" expr ")" ;
//
// Identifiers must be registered in the symbol table; integers are
// unsigned decimal literals of unbounded size.

namespace detail {

class ExprParser {
public:
    ExprParser(std::string_view text, SymbolTablePtr table)
        : text_(text), table_(std::move(table)) {}

    Expr run() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input '" +
                                 std::string(1, text_[pos_]) + "'",
                             pos_);
        return e;
    }

private:
    Expr parse_expr() {
        Expr acc = parse_term();
        while (true) {
            skip_ws();
            if (match('+'))
                acc = acc + parse_term();
            else if (match('-'))
                acc = acc - parse_term();
            else
                return acc;
        }
    }

    Expr parse_term() {
        Expr acc = parse_factor();
        while (true) {
            skip_ws();
            if (match('*'))
                acc = acc * parse_factor();
            else if (match('/')) {
                std::size_t at = pos_;
                Expr d = parse_factor();
                if (d.is_zero()) throw ParseError("division by zero", at);
                acc = acc / d;
            } else
                return acc;
        }
    }

    Expr parse_factor() {
        skip_ws();
        if (match('-')) return -parse_factor();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        skip_ws();
        if (!match('^')) return base;
        skip_ws();
        bool parens = match('(');
        skip_ws();
        bool neg = match('-');
        skip_ws();
        std::size_t at = pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw ParseError("expected integer exponent", pos_);
        long e = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            e = e * 10 + (text_[pos_] - '0');
            if (e > 1'000'000) throw ParseError("exponent too large", at);
            ++pos_;
        }
        if (parens) {
            skip_ws();
            if (!match(')')) throw ParseError("expected ')' after exponent", pos_);
        }
        if (neg && base.is_zero())
            throw ParseError("zero raised to a negative power", at);
        return base.pow(static_cast<int>(neg ? -e : e));
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            skip_ws();
            if (!match(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            Int v(std::string(text_.substr(start, pos_ - start)), 10);
            return Expr::rational(table_, Rat(v));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            auto s = table_->find(name);
            if (!s)
                throw ParseError("unknown identifier '" + name + "'", start);
            return Expr::symbol(table_, *s);
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool match(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view text_;
    SymbolTablePtr table_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse `text` over the symbols of `table` into canonical form.
inline Expr parse(std::string_view text, const SymbolTablePtr& table) {
    return detail::ExprParser(text, table).run();
}

}  // namespace fluxtrap
