#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fluxtrap/poly.hpp"

namespace fluxtrap {

namespace detail {

/// Per-variable minimum exponent over all terms (the monomial content).
inline Monomial monomial_content(const Poly& p) {
    Monomial m = p.terms()[0].mono;
    for (auto& t : p.terms()) {
        if (m.factors.empty()) break;
        Monomial next;
        for (auto& [v, e] : m.factors) {
            std::uint32_t d = t.mono.degree_in(v);
            if (d > 0) next.factors.push_back({v, std::min(e, d)});
        }
        m = next;
    }
    return m;
}

inline Poly divide_monomial(const Poly& p, const Monomial& m) {
    if (m.is_one()) return p;
    Poly q;
    for (auto& t : p.terms()) {
        auto d = t.mono.divide(m);
        q = q + Poly::term(*d, t.coeff);
    }
    return q;
}

inline std::optional<Poly> try_divide(const Poly& num, const Poly& den) {
    Poly q;
    Poly rem = num;
    while (!rem.is_zero()) {
        auto m = rem.leading_monomial().divide(den.leading_monomial());
        if (!m) return std::nullopt;
        Poly t = Poly::term(*m, rem.leading_coeff() / den.leading_coeff());
        q = q + t;
        rem = rem - t * den;
    }
    return q;
}

/// r = lc(v)^(deg u - deg v + 1) * u  mod v, exactly; the trailing
/// power padding keeps the subresultant divisions exact even when a
/// reduction step drops the degree by more than one.
inline Poly pseudo_remainder(const Poly& u, const Poly& v, std::uint32_t var) {
    std::uint32_t dv = v.degree_in(var);
    std::uint32_t du = u.degree_in(var);
    if (du < dv) return u;
    Poly lc_v = v.coefficients_in(var)[dv];
    Poly r = u;
    std::uint32_t e = du - dv + 1;
    while (!r.is_zero()) {
        std::uint32_t dr = r.degree_in(var);
        if (dr < dv) break;
        Poly lc_r = r.coefficients_in(var)[dr];
        Poly shift = Poly::term(Monomial::variable(var, dr - dv), Rat(1));
        r = r * lc_v - lc_r * shift * v;
        --e;
    }
    if (e > 0 && !r.is_zero()) r = r * lc_v.pow(e);
    return r;
}

inline Poly gcd_primitive(const Poly& a, const Poly& b);

/// gcd of the univariate-in-var coefficients (the content w.r.t. var).
inline Poly content_in(const Poly& p, std::uint32_t var) {
    std::vector<Poly> cs = p.coefficients_in(var);
    Poly g;
    for (auto& c : cs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? primitive_part(c) : gcd_primitive(g, c);
        if (g.is_constant()) break;
    }
    return g.is_zero() ? Poly::constant(Rat(1)) : g;
}

/// Main variable for the recursion: present in both polynomials, with
/// the smallest min-degree (fewest remainder steps); ties break on the
/// registration order.
inline std::optional<std::uint32_t> choose_main_var(const Poly& a, const Poly& b) {
    std::vector<std::uint32_t> vars;
    a.collect_vars(vars);
    std::optional<std::uint32_t> best;
    std::uint32_t best_deg = 0;
    for (std::uint32_t v : vars) {
        std::uint32_t da = a.degree_in(v), db = b.degree_in(v);
        if (da == 0 || db == 0) continue;
        std::uint32_t d = std::min(da, db);
        if (!best || d < best_deg || (d == best_deg && v < *best)) {
            best = v;
            best_deg = d;
        }
    }
    return best;
}

/// Subresultant polynomial remainder sequence (Knuth 4.6.1C / Collins,
/// Brown-Traub).  Keeps pseudo-remainder growth polynomial without the
/// per-step multivariate content computations of the primitive PRS.
inline Poly gcd_primitive(const Poly& a, const Poly& b) {
    if (a.is_zero()) return primitive_part(b);
    if (b.is_zero()) return primitive_part(a);
    if (a.is_constant() || b.is_constant()) return Poly::constant(Rat(1));
    if (a == b || a == -b) return primitive_part(a);

    auto var_opt = choose_main_var(a, b);
    if (!var_opt) return Poly::constant(Rat(1));  // no shared variable
    std::uint32_t var = *var_opt;

    // quick exits: one side divides the other
    if (auto q = try_divide(a, b)) {
        (void)q;
        return primitive_part(b);
    }
    if (auto q = try_divide(b, a)) {
        (void)q;
        return primitive_part(a);
    }

    Poly cont_a = content_in(a, var);
    Poly cont_b = content_in(b, var);
    Poly u = cont_a.is_constant() ? primitive_part(a) : a.divide_exact(cont_a);
    Poly v = cont_b.is_constant() ? primitive_part(b) : b.divide_exact(cont_b);
    if (u.degree_in(var) < v.degree_in(var)) std::swap(u, v);

    Poly g = Poly::constant(Rat(1));
    Poly h = Poly::constant(Rat(1));
    while (true) {
        std::uint32_t delta = u.degree_in(var) - v.degree_in(var);
        Poly r = pseudo_remainder(u, v, var);
        if (r.is_zero()) break;
        if (r.degree_in(var) == 0) {
            v = Poly::constant(Rat(1));
            break;
        }
        u = v;
        Poly scale = g * h.pow(delta);
        v = r.divide_exact(scale);
        g = u.coefficients_in(var)[u.degree_in(var)];
        if (delta == 1)
            h = g;
        else if (delta > 1)
            h = g.pow(delta).divide_exact(h.pow(delta - 1));
    }
    Poly pp = v.is_constant() ? Poly::constant(Rat(1))
                              : v.divide_exact(content_in(v, var));
    return primitive_part(gcd_primitive(cont_a, cont_b) * pp);
}

/// Monomial-content split followed by the subresultant gcd; no peel.
inline Poly gcd_plain(const Poly& a, const Poly& b) {
    Monomial ma = monomial_content(a);
    Monomial mb = monomial_content(b);
    Monomial shared;
    std::size_t i = 0, j = 0;
    while (i < ma.factors.size() && j < mb.factors.size()) {
        if (ma.factors[i].first < mb.factors[j].first)
            ++i;
        else if (ma.factors[i].first > mb.factors[j].first)
            ++j;
        else {
            shared.factors.push_back({ma.factors[i].first,
                                      std::min(ma.factors[i].second,
                                               mb.factors[j].second)});
            ++i, ++j;
        }
    }
    Poly a_red = divide_monomial(primitive_part(a), ma);
    Poly b_red = divide_monomial(primitive_part(b), mb);
    Poly core = gcd_primitive(a_red, b_red);
    return primitive_part(core * Poly::term(shared, Rat(1)));
}

/// Square-free part p / gcd(p, dp/dx_1, ..., dp/dx_n); equals p when p
/// carries no repeated factors.  Expects p monomial-free.
inline Poly squarefree_part(const Poly& p) {
    std::vector<std::uint32_t> vars;
    p.collect_vars(vars);
    Poly g = p;
    for (std::uint32_t v : vars) {
        Poly d = p.derivative(v);
        if (d.is_zero()) continue;
        g = gcd_plain(g, d);
        if (g.is_constant()) return p;
    }
    if (g.is_constant()) return p;
    return primitive_part(p.divide_exact(g.scaled(Rat(1) / rational_content(g))));
}

}  // namespace detail

/// Greatest common divisor over the rational coefficient field,
/// returned integer-primitive with positive leading coefficient.
/// gcd(0, p) = primitive(p); gcd of two nonzero constants is 1.
///
/// Denominators in this engine are typically small irreducibles raised
/// to a power, so the second argument is peeled square-free layer by
/// layer via gcd(A, S*C) = gcd(A, S) * gcd(A / gcd(A,S), C); each layer
/// then reduces against a small (often monic) divisor.
inline Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return primitive_part(b);
    if (b.is_zero()) return primitive_part(a);

    Monomial ma = detail::monomial_content(a);
    Monomial mb = detail::monomial_content(b);
    Monomial shared;
    {
        std::size_t i = 0, j = 0;
        while (i < ma.factors.size() && j < mb.factors.size()) {
            if (ma.factors[i].first < mb.factors[j].first)
                ++i;
            else if (ma.factors[i].first > mb.factors[j].first)
                ++j;
            else {
                shared.factors.push_back(
                    {ma.factors[i].first,
                     std::min(ma.factors[i].second, mb.factors[j].second)});
                ++i, ++j;
            }
        }
    }
    Poly acc = Poly::constant(Rat(1));
    Poly a_red = detail::divide_monomial(primitive_part(a), ma);
    Poly b_red = detail::divide_monomial(primitive_part(b), mb);
    while (!a_red.is_constant() && !b_red.is_constant()) {
        Poly s = detail::squarefree_part(b_red);
        if (s == b_red) {
            acc = acc * detail::gcd_primitive(a_red, b_red);
            break;
        }
        Poly d = detail::gcd_primitive(a_red, s);
        b_red = primitive_part(b_red.divide_exact(s));
        if (d.is_constant()) continue;
        acc = acc * d;
        a_red = primitive_part(a_red.divide_exact(d));
    }
    return primitive_part(acc * Poly::term(shared, Rat(1)));
}

}  // namespace fluxtrap
