#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fluxtrap/errors.hpp"
#include "fluxtrap/rational.hpp"
#include "fluxtrap/symbols.hpp"

namespace fluxtrap {

/// Sparse power product: (variable index, exponent) factors sorted by
/// ascending variable index, exponents strictly positive.
struct Monomial {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;

    static Monomial one() { return Monomial{}; }

    static Monomial variable(std::uint32_t var, std::uint32_t exp = 1) {
        Monomial m;
        if (exp > 0) m.factors.push_back({var, exp});
        return m;
    }

    bool is_one() const { return factors.empty(); }

    std::uint64_t total_degree() const {
        std::uint64_t d = 0;
        for (auto& [v, e] : factors) d += e;
        return d;
    }

    std::uint32_t degree_in(std::uint32_t var) const {
        for (auto& [v, e] : factors)
            if (v == var) return e;
        return 0;
    }

    bool contains(std::uint32_t var) const { return degree_in(var) > 0; }

    Monomial operator*(const Monomial& o) const {
        Monomial r;
        r.factors.reserve(factors.size() + o.factors.size());
        std::size_t i = 0, j = 0;
        while (i < factors.size() && j < o.factors.size()) {
            if (factors[i].first < o.factors[j].first)
                r.factors.push_back(factors[i++]);
            else if (factors[i].first > o.factors[j].first)
                r.factors.push_back(o.factors[j++]);
            else {
                r.factors.push_back({factors[i].first,
                                     factors[i].second + o.factors[j].second});
                ++i, ++j;
            }
        }
        while (i < factors.size()) r.factors.push_back(factors[i++]);
        while (j < o.factors.size()) r.factors.push_back(o.factors[j++]);
        return r;
    }

    /// Exact quotient this / o, or nullopt when o does not divide.
    std::optional<Monomial> divide(const Monomial& o) const {
        Monomial r;
        std::size_t i = 0, j = 0;
        while (j < o.factors.size()) {
            while (i < factors.size() && factors[i].first < o.factors[j].first)
                r.factors.push_back(factors[i++]);
            if (i == factors.size() || factors[i].first != o.factors[j].first ||
                factors[i].second < o.factors[j].second)
                return std::nullopt;
            if (factors[i].second > o.factors[j].second)
                r.factors.push_back({factors[i].first,
                                     factors[i].second - o.factors[j].second});
            ++i, ++j;
        }
        while (i < factors.size()) r.factors.push_back(factors[i++]);
        return r;
    }

    Monomial without(std::uint32_t var) const {
        Monomial r;
        for (auto& f : factors)
            if (f.first != var) r.factors.push_back(f);
        return r;
    }

    Monomial pow(std::uint32_t e) const {
        Monomial r;
        if (e == 0) return r;
        for (auto& [v, x] : factors) r.factors.push_back({v, x * e});
        return r;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.factors == b.factors;
    }
};

/// Graded lexicographic comparison over registration order: higher total
/// degree wins; ties break lexicographically with earlier-registered
/// variables more significant.  Returns <0, 0, >0.
inline int grlex_compare(const Monomial& a, const Monomial& b) {
    std::uint64_t da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db ? -1 : 1;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        if (a.factors[i].first != b.factors[j].first)
            // the monomial holding the earlier variable has more weight there
            return a.factors[i].first < b.factors[j].first ? 1 : -1;
        if (a.factors[i].second != b.factors[j].second)
            return a.factors[i].second < b.factors[j].second ? -1 : 1;
        ++i, ++j;
    }
    if (i < a.factors.size()) return 1;
    if (j < b.factors.size()) return -1;
    return 0;
}

struct GrlexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return grlex_compare(a, b) > 0;
    }
};

/// Multivariate polynomial with exact rational coefficients.  Terms are
/// kept sorted in descending graded-lex order with no zero coefficients,
/// so structural equality is mathematical equality.
class Poly {
public:
    struct Term {
        Monomial mono;
        Rat coeff;
    };

    Poly() = default;

    static Poly zero() { return Poly(); }

    static Poly constant(const Rat& c) {
        Poly p;
        if (sgn(c) != 0) p.terms_.push_back({Monomial::one(), c});
        return p;
    }

    static Poly variable(std::uint32_t var) {
        Poly p;
        p.terms_.push_back({Monomial::variable(var), Rat(1)});
        return p;
    }

    static Poly term(const Monomial& m, const Rat& c) {
        Poly p;
        if (sgn(c) != 0) p.terms_.push_back({m, c});
        return p;
    }

    const std::vector<Term>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one());
    }

    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw Error("polynomial is not constant");
        return terms_[0].coeff;
    }

    const Monomial& leading_monomial() const {
        if (terms_.empty()) throw Error("zero polynomial has no leading term");
        return terms_[0].mono;
    }

    const Rat& leading_coeff() const {
        if (terms_.empty()) throw Error("zero polynomial has no leading term");
        return terms_[0].coeff;
    }

    std::uint64_t total_degree() const {
        std::uint64_t d = 0;
        for (auto& t : terms_) d = std::max(d, t.mono.total_degree());
        return d;
    }

    std::uint32_t degree_in(std::uint32_t var) const {
        std::uint32_t d = 0;
        for (auto& t : terms_) d = std::max(d, t.mono.degree_in(var));
        return d;
    }

    bool contains(std::uint32_t var) const {
        for (auto& t : terms_)
            if (t.mono.contains(var)) return true;
        return false;
    }

    void collect_vars(std::vector<std::uint32_t>& vars) const {
        for (auto& t : terms_)
            for (auto& [v, e] : t.mono.factors)
                if (std::find(vars.begin(), vars.end(), v) == vars.end())
                    vars.push_back(v);
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }

    Poly operator+(const Poly& o) const {
        Poly r;
        r.terms_.reserve(terms_.size() + o.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < terms_.size() && j < o.terms_.size()) {
            int c = grlex_compare(terms_[i].mono, o.terms_[j].mono);
            if (c > 0)
                r.terms_.push_back(terms_[i++]);
            else if (c < 0)
                r.terms_.push_back(o.terms_[j++]);
            else {
                Rat s = terms_[i].coeff + o.terms_[j].coeff;
                if (sgn(s) != 0) r.terms_.push_back({terms_[i].mono, s});
                ++i, ++j;
            }
        }
        while (i < terms_.size()) r.terms_.push_back(terms_[i++]);
        while (j < o.terms_.size()) r.terms_.push_back(o.terms_[j++]);
        return r;
    }

    Poly operator-(const Poly& o) const { return *this + (-o); }

    Poly operator*(const Poly& o) const {
        if (is_zero() || o.is_zero()) return Poly();
        std::map<Monomial, Rat, GrlexGreater> acc;
        for (auto& a : terms_)
            for (auto& b : o.terms_) {
                Monomial m = a.mono * b.mono;
                auto [it, inserted] = acc.try_emplace(std::move(m), a.coeff * b.coeff);
                if (!inserted) it->second += a.coeff * b.coeff;
            }
        Poly r;
        r.terms_.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (sgn(c) != 0) r.terms_.push_back({m, c});
        return r;
    }

    Poly scaled(const Rat& c) const {
        if (sgn(c) == 0) return Poly();
        Poly r = *this;
        for (auto& t : r.terms_) t.coeff *= c;
        return r;
    }

    Poly pow(std::uint32_t e) const {
        Poly r = Poly::constant(Rat(1));
        Poly b = *this;
        while (e > 0) {
            if (e & 1u) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    /// Exact division; throws if `d` does not divide this polynomial.
    Poly divide_exact(const Poly& d) const {
        if (d.is_zero()) throw DivisionByZeroError("polynomial division by zero");
        Poly q;
        Poly rem = *this;
        while (!rem.is_zero()) {
            auto m = rem.leading_monomial().divide(d.leading_monomial());
            if (!m) throw Error("polynomial division is not exact");
            Rat c = rem.leading_coeff() / d.leading_coeff();
            Poly t = Poly::term(*m, c);
            q = q + t;
            rem = rem - t * d;
        }
        return q;
    }

    Poly derivative(std::uint32_t var) const {
        Poly r;
        for (auto& t : terms_) {
            std::uint32_t e = t.mono.degree_in(var);
            if (e == 0) continue;
            Monomial m = t.mono.without(var);
            if (e > 1) m = m * Monomial::variable(var, e - 1);
            r = r + Poly::term(m, t.coeff * Rat(static_cast<long>(e)));
        }
        return r;
    }

    /// Coefficients of this polynomial viewed as univariate in `var`;
    /// index k holds the coefficient of var^k.
    std::vector<Poly> coefficients_in(std::uint32_t var) const {
        std::vector<Poly> out(degree_in(var) + 1);
        for (auto& t : terms_) {
            std::uint32_t e = t.mono.degree_in(var);
            out[e] = out[e] + Poly::term(t.mono.without(var), t.coeff);
        }
        return out;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (!(a.terms_[i].mono == b.terms_[i].mono) ||
                a.terms_[i].coeff != b.terms_[i].coeff)
                return false;
        return true;
    }

    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

private:
    std::vector<Term> terms_;
};

/// Rebuild sum_k coeffs[k] * var^k.
inline Poly from_coefficients(const std::vector<Poly>& coeffs, std::uint32_t var) {
    Poly r;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        r = r + coeffs[k] * Poly::term(Monomial::variable(var, static_cast<std::uint32_t>(k)),
                                       Rat(1));
    return r;
}

/// Rational content: gcd of numerators over lcm of denominators, signed
/// so that dividing by it leaves integer coprime coefficients with a
/// positive leading coefficient.
inline Rat rational_content(const Poly& p) {
    if (p.is_zero()) return Rat(1);
    Int num_gcd = 0, den_lcm = 1;
    for (auto& t : p.terms()) {
        num_gcd = int_gcd(num_gcd, rat_num(t.coeff));
        den_lcm = int_lcm(den_lcm, rat_den(t.coeff));
    }
    Rat c = make_rat(num_gcd, den_lcm);
    if (sgn(p.leading_coeff()) < 0) c = -c;
    return c;
}

/// Integer-coprime, positive-leading-coefficient scalar multiple of p.
inline Poly primitive_part(const Poly& p) {
    if (p.is_zero()) return p;
    return p.scaled(Rat(1) / rational_content(p));
}

}  // namespace fluxtrap
