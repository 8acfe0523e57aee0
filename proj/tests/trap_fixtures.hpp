#pragma once

// Shared symbol-table setups and a small deterministic expression
// generator used across the test suites.

#include <cstdint>
#include <string>
#include <vector>

#include "fluxtrap/expr.hpp"
#include "fluxtrap/parser.hpp"
#include "fluxtrap/symbols.hpp"

namespace trap_test {

using namespace fluxtrap;

struct TrapSetup {
    SymbolTablePtr table;
    PhaseSpace ps;
    std::vector<Symbol> velocities;
    Symbol x1, x2, v1, v2, p1, p2;
    Symbol mu, omega_c, omega_0, omega_P, a, q, c, hbar, pi, Ek;

    Expr operator()(const std::string& text) const { return parse(text, table); }
};

/// Planar combined-trap phase space with the full parameter set.
inline TrapSetup make_trap_setup() {
    TrapSetup s;
    s.table = std::make_shared<SymbolTable>();
    s.x1 = s.table->register_coordinate("x1");
    s.x2 = s.table->register_coordinate("x2");
    s.v1 = s.table->register_velocity("v1", s.x1);
    s.v2 = s.table->register_velocity("v2", s.x2);
    s.p1 = s.table->register_momentum("p1");
    s.p2 = s.table->register_momentum("p2");
    s.mu = s.table->register_parameter("mu", true);
    s.omega_c = s.table->register_parameter("omega_c", true);
    s.omega_0 = s.table->register_parameter("omega_0", true);
    s.omega_P = s.table->register_parameter("omega_P", true);
    s.a = s.table->register_parameter("a", true);
    s.q = s.table->register_parameter("q", true);
    s.c = s.table->register_parameter("c", true);
    s.hbar = s.table->register_parameter("hbar", true);
    s.pi = s.table->register_parameter("pi", true);
    s.Ek = s.table->register_parameter("Ek", true);
    s.ps = PhaseSpace(*s.table, {{s.x1, s.p1}, {s.x2, s.p2}});
    s.velocities = {s.v1, s.v2};
    return s;
}

// Lagrangians of the three trap configurations.
inline const char* kLagrangianFull =
    "1/2*mu*(v1^2 + v2^2)"
    " - 1/2*mu*omega_c*(v1*x2 - v2*x1)"
    " - mu*omega_0*a^2*(v1*x2 - v2*x1)/(2*(x1^2 + x2^2))"
    " - 1/2*mu*omega_P^2*(x1^2 + x2^2)";

inline const char* kLagrangianNoSpectator =
    "1/2*mu*(v1^2 + v2^2)"
    " - mu*omega_0*a^2*(v1*x2 - v2*x1)/(2*(x1^2 + x2^2))"
    " - 1/2*mu*omega_P^2*(x1^2 + x2^2)";

inline const char* kLagrangianNoFlux =
    "1/2*mu*(v1^2 + v2^2)"
    " - 1/2*mu*omega_c*(v1*x2 - v2*x1)"
    " - 1/2*mu*omega_P^2*(x1^2 + x2^2)";

/// xorshift-based deterministic generator for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_;
    }

    long range(long lo, long hi) {  // inclusive
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

/// Random polynomial expression in the phase-space symbols (plus an
/// occasional parameter), bounded total degree, small coefficients.
inline Expr random_poly_expr(const TrapSetup& s, Rng& rng, int max_degree = 3,
                             int n_terms = 4) {
    std::vector<Symbol> pool = {s.x1, s.x2, s.p1, s.p2, s.mu, s.omega_c};
    Expr acc = Expr::zero(s.table);
    for (int t = 0; t < n_terms; ++t) {
        long coeff = rng.range(-4, 4);
        if (coeff == 0) continue;
        Expr term = Expr::rational(s.table, make_rat(coeff, rng.range(1, 3)));
        int degree = static_cast<int>(rng.range(0, max_degree));
        for (int d = 0; d < degree; ++d) {
            Symbol v = pool[static_cast<std::size_t>(rng.range(0, 3))];  // phase symbols
            term = term * Expr::symbol(s.table, v);
        }
        if (rng.range(0, 3) == 0)
            term = term * Expr::symbol(s.table, pool[4 + rng.range(0, 1)]);
        acc = acc + term;
    }
    return acc;
}

}  // namespace trap_test
