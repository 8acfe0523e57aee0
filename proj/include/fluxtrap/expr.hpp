#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fluxtrap/poly.hpp"
#include "fluxtrap/poly_gcd.hpp"
#include "fluxtrap/symbols.hpp"

namespace fluxtrap {

/// Exact multivariate rational function over the symbols of one table.
///
/// Canonical form: numerator and denominator coprime; denominator
/// nonzero with leading coefficient 1 in the graded-lex order.  Under
/// this normalization structural equality coincides with mathematical
/// equality, which is what the golden fixtures rely on.  Values are
/// immutable after construction and safe to share between threads.
class Expr {
public:
    Expr(SymbolTablePtr table, Poly num, Poly den)
        : table_(std::move(table)), num_(std::move(num)), den_(std::move(den)) {
        normalize();
    }

    static Expr zero(const SymbolTablePtr& t) { return Expr(t, Poly::zero(), Poly::constant(1)); }
    static Expr one(const SymbolTablePtr& t) { return Expr(t, Poly::constant(1), Poly::constant(1)); }

    static Expr integer(const SymbolTablePtr& t, long v) {
        return Expr(t, Poly::constant(Rat(v)), Poly::constant(1));
    }

    static Expr rational(const SymbolTablePtr& t, const Rat& v) {
        return Expr(t, Poly::constant(v), Poly::constant(1));
    }

    static Expr symbol(const SymbolTablePtr& t, Symbol s) {
        if (s.index >= t->size()) throw SymbolError("symbol handle out of range");
        return Expr(t, Poly::variable(s.index), Poly::constant(1));
    }

    const SymbolTablePtr& table() const { return table_; }
    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }

    bool is_one() const {
        return num_.is_constant() && den_.is_constant() &&
               num_.constant_value() == Rat(1) && den_.constant_value() == Rat(1);
    }

    bool is_rational_constant() const { return num_.is_constant() && den_.is_constant(); }

    Rat rational_value() const {
        if (!is_rational_constant()) throw Error("expression is not a rational constant");
        return num_.constant_value() / den_.constant_value();
    }

    bool uses(Symbol s) const {
        return num_.contains(s.index) || den_.contains(s.index);
    }

    std::set<std::uint32_t> used_symbol_indices() const {
        std::vector<std::uint32_t> vars;
        num_.collect_vars(vars);
        den_.collect_vars(vars);
        return {vars.begin(), vars.end()};
    }

    /// True when only parameter symbols occur.
    bool is_parameter_only() const {
        for (std::uint32_t v : used_symbol_indices())
            if (table_->is_phase_symbol(Symbol{v})) return false;
        return true;
    }

    Expr operator-() const { return Expr(table_, -num_, den_); }

    Expr operator+(const Expr& o) const { return add_impl(o, false); }

    Expr operator-(const Expr& o) const { return add_impl(o, true); }

    Expr operator*(const Expr& o) const {
        check_table(o);
        return Expr(table_, num_ * o.num_, den_ * o.den_);
    }

    Expr operator/(const Expr& o) const {
        check_table(o);
        if (o.is_zero()) throw DivisionByZeroError("division by zero expression");
        return Expr(table_, num_ * o.den_, den_ * o.num_);
    }

    Expr pow(int e) const {
        if (e == 0) return one(table_);
        if (e > 0)
            return Expr(table_, num_.pow(static_cast<std::uint32_t>(e)),
                        den_.pow(static_cast<std::uint32_t>(e)));
        if (is_zero())
            throw DivisionByZeroError("zero raised to a negative power");
        return Expr(table_, den_.pow(static_cast<std::uint32_t>(-e)),
                    num_.pow(static_cast<std::uint32_t>(-e)));
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        a.check_table(b);
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    void check_table(const Expr& o) const {
        if (table_.get() != o.table_.get())
            throw SymbolError("expressions belong to different symbol tables");
    }

private:
    /// Sum over the least common denominator: splitting off
    /// gcd(den, o.den) keeps the normalization gcd small, and the very
    /// common equal-denominator case short-circuits entirely.
    Expr add_impl(const Expr& o, bool negate) const {
        check_table(o);
        if (num_.is_zero()) return negate ? -o : o;
        if (o.num_.is_zero()) return *this;
        const Poly& on = o.num_;
        if (den_ == o.den_) {
            Poly n = negate ? num_ - on : num_ + on;
            return Expr(table_, std::move(n), den_);
        }
        Poly g = poly_gcd(den_, o.den_);
        if (g.is_constant())
            return Expr(table_,
                        negate ? num_ * o.den_ - on * den_ : num_ * o.den_ + on * den_,
                        den_ * o.den_);
        Poly da = den_.divide_exact(g);
        Poly db = o.den_.divide_exact(g);
        Poly n = negate ? num_ * db - on * da : num_ * db + on * da;
        return Expr(table_, std::move(n), den_ * db);
    }

    void normalize() {
        if (den_.is_zero())
            throw DivisionByZeroError("denominator is the zero polynomial");
        if (num_.is_zero()) {
            den_ = Poly::constant(1);
            return;
        }
        Poly g = poly_gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = num_.divide_exact(g);
            den_ = den_.divide_exact(g);
        }
        Rat lc = den_.leading_coeff();
        if (lc != Rat(1)) {
            Rat inv = Rat(1) / lc;
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    SymbolTablePtr table_;
    Poly num_;
    Poly den_;
};

/// Exact partial derivative (quotient rule on the canonical fraction).
inline Expr differentiate(const Expr& f, Symbol s) {
    if (s.index >= f.table()->size())
        throw SymbolError("derivative symbol not registered in the expression's table");
    Poly dn = f.num().derivative(s.index);
    Poly dd = f.den().derivative(s.index);
    return Expr(f.table(), dn * f.den() - f.num() * dd, f.den() * f.den());
}

/// Simultaneous substitution.  No substituted symbol may occur in any
/// replacement; a substitution that zeroes a denominator is an error.
inline Expr substitute(const Expr& f,
                       const std::vector<std::pair<Symbol, Expr>>& bindings) {
    const SymbolTablePtr& t = f.table();
    std::set<std::uint32_t> targets;
    for (auto& [s, repl] : bindings) {
        f.check_table(repl);
        if (!targets.insert(s.index).second)
            throw SubstitutionError("symbol '" + t->name(s) + "' bound twice");
    }
    for (auto& [s, repl] : bindings)
        for (std::uint32_t v : repl.used_symbol_indices())
            if (targets.count(v))
                throw SubstitutionError("recursive binding: replacement for '" +
                                        t->name(s) + "' uses substituted symbol '" +
                                        t->name(Symbol{v}) + "'");

    auto eval_poly = [&](const Poly& p) {
        Expr acc = Expr::zero(t);
        for (auto& term : p.terms()) {
            Expr x = Expr::rational(t, term.coeff);
            for (auto& [v, e] : term.mono.factors) {
                Expr base = Expr::symbol(t, Symbol{v});
                for (auto& [s, repl] : bindings)
                    if (s.index == v) {
                        base = repl;
                        break;
                    }
                x = x * base.pow(static_cast<int>(e));
            }
            acc = acc + x;
        }
        return acc;
    };

    Expr n = eval_poly(f.num());
    Expr d = eval_poly(f.den());
    if (d.is_zero())
        throw SubstitutionError("substitution zeroes a denominator");
    return n / d;
}

inline Expr substitute(const Expr& f, Symbol s, const Expr& replacement) {
    return substitute(f, {{s, replacement}});
}

/// Poisson bracket {f, g} = sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i).
inline Expr poisson_bracket(const Expr& f, const Expr& g, const PhaseSpace& ps) {
    f.check_table(g);
    Expr acc = Expr::zero(f.table());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        Symbol q = ps.coordinate(i), p = ps.momentum(i);
        acc = acc + differentiate(f, q) * differentiate(g, p) -
              differentiate(f, p) * differentiate(g, q);
    }
    return acc;
}

/// Exact square root for expressions whose numerator and denominator
/// are perfect-square single terms (the class produced by effective
/// mass/frequency extraction).  Returns nullopt otherwise.
inline std::optional<Expr> sqrt_exact(const Expr& f) {
    auto root_of = [](const Poly& p) -> std::optional<Poly> {
        if (p.is_zero()) return Poly::zero();
        if (p.terms().size() != 1) return std::nullopt;
        const auto& t = p.terms()[0];
        for (auto& [v, e] : t.mono.factors)
            if (e % 2 != 0) return std::nullopt;
        auto c = rat_sqrt(t.coeff);
        if (!c) return std::nullopt;
        Monomial m;
        for (auto& [v, e] : t.mono.factors) m.factors.push_back({v, e / 2});
        return Poly::term(m, *c);
    };
    auto n = root_of(f.num());
    auto d = root_of(f.den());
    if (!n || !d) return std::nullopt;
    return Expr(f.table(), *n, *d);
}

/// True when the expression is visibly positive under the declared
/// parameter positivity: every symbol carries the positive flag and all
/// coefficients on both sides of the fraction share one sign.
inline bool is_positive_under_assumptions(const Expr& f) {
    if (f.is_zero()) return false;
    for (std::uint32_t v : f.used_symbol_indices())
        if (!f.table()->is_positive(Symbol{v})) return false;
    int num_sign = sgn(f.num().leading_coeff());
    for (auto& t : f.num().terms())
        if (sgn(t.coeff) != num_sign) return false;
    for (auto& t : f.den().terms())
        if (sgn(t.coeff) != sgn(f.den().leading_coeff())) return false;
    return num_sign == sgn(f.den().leading_coeff());
}

/// Exponent profile of a monomial restricted to chosen symbols.
using ExponentKey = std::vector<std::uint32_t>;

/// Rewrite f as a polynomial in `syms` with coefficients free of them.
/// The denominator must not involve any of the chosen symbols.
inline std::map<ExponentKey, Expr> collect(const Expr& f,
                                           const std::vector<Symbol>& syms) {
    const SymbolTablePtr& t = f.table();
    for (Symbol s : syms)
        if (f.den().contains(s.index))
            throw ModelError("denominator depends on collected symbol '" +
                             t->name(s) + "'");
    std::map<ExponentKey, Expr> out;
    for (auto& term : f.num().terms()) {
        ExponentKey key(syms.size(), 0);
        Monomial rest = term.mono;
        for (std::size_t k = 0; k < syms.size(); ++k) {
            key[k] = rest.degree_in(syms[k].index);
            rest = rest.without(syms[k].index);
        }
        Expr piece(t, Poly::term(rest, term.coeff), f.den());
        auto it = out.find(key);
        if (it == out.end())
            out.emplace(key, piece);
        else
            it->second = it->second + piece;
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

/// Numeric evaluation with the given symbol values; every symbol that
/// occurs must be bound.
inline double eval_double(const Expr& f, const std::map<std::string, double>& values) {
    auto eval_poly = [&](const Poly& p) {
        double acc = 0.0;
        for (auto& t : p.terms()) {
            double x = rat_to_double(t.coeff);
            for (auto& [v, e] : t.mono.factors) {
                auto it = values.find(f.table()->name(Symbol{v}));
                if (it == values.end())
                    throw Error("no numeric value for symbol '" +
                                f.table()->name(Symbol{v}) + "'");
                x *= std::pow(it->second, static_cast<double>(e));
            }
            acc += x;
        }
        return acc;
    };
    double d = eval_poly(f.den());
    if (d == 0.0) throw DivisionByZeroError("denominator evaluates to zero");
    return eval_poly(f.num()) / d;
}

/// Deterministic pretty-printer; its output re-parses to an equal Expr.
inline std::string to_string(const Expr& f) {
    const SymbolTable& t = *f.table();
    auto poly_str = [&](const Poly& p) {
        if (p.is_zero()) return std::string("0");
        std::string out;
        bool first = true;
        for (auto& term : p.terms()) {
            Rat c = term.coeff;
            bool negative = sgn(c) < 0;
            if (first) {
                if (negative) out += "-";
            } else {
                out += negative ? " - " : " + ";
            }
            first = false;
            Rat a = abs(c);
            std::string vars;
            for (auto& [v, e] : term.mono.factors) {
                if (!vars.empty()) vars += "*";
                vars += t.name(Symbol{v});
                if (e > 1) vars += "^" + std::to_string(e);
            }
            if (vars.empty())
                out += rat_to_string(a);
            else if (a == Rat(1))
                out += vars;
            else
                out += rat_to_string(a) + "*" + vars;
        }
        return out;
    };
    if (f.den().is_constant() && f.den().constant_value() == Rat(1))
        return poly_str(f.num());
    return "(" + poly_str(f.num()) + ")/(" + poly_str(f.den()) + ")";
}

/// Named parameter standing for a defined combination (e.g. a total
/// flux).  Expansion substitutes definitions until none remain.
struct Alias {
    Symbol symbol;
    Expr definition;
};

inline Expr expand_aliases(Expr f, const std::vector<Alias>& aliases) {
    for (int round = 0; round < 16; ++round) {
        bool touched = false;
        for (const Alias& a : aliases) {
            if (f.uses(a.symbol)) {
                f = substitute(f, a.symbol, a.definition);
                touched = true;
            }
        }
        if (!touched) return f;
    }
    throw SubstitutionError("alias definitions do not terminate");
}

}  // namespace fluxtrap
