#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fluxtrap/parser.hpp"
#include "fluxtrap/quantize.hpp"

#include "trap_fixtures.hpp"

using namespace fluxtrap;
using trap_test::make_trap_setup;

namespace {

struct ReducedFixture {
    trap_test::TrapSetup s;
    HamiltonianModel h0;
    ConstraintAnalysis analysis;
    ReducedCanonicalSystem sys;
};

ReducedFixture reduced_fixture(const char* lagrangian_text) {
    auto s = make_trap_setup();
    auto model = decompose_lagrangian(s(lagrangian_text), s.ps);
    auto full = legendre(model);
    auto [h0, l0] = kinetic_limit_reduce(full.hamiltonian, model,
                                         s("1/2*hbar*omega_c"));
    auto primaries = legendre(l0).primaries;
    auto analysis = analyze_constraints(h0, primaries, s.ps);
    auto sys = reduce(analysis, h0);
    return ReducedFixture{s, h0, analysis, sys};
}

}  // namespace

TEST_CASE("effective mass and frequency of the reduced trap system") {
    auto f = reduced_fixture(trap_test::kLagrangianFull);
    auto osc = recognize_oscillator(f.sys);
    CHECK(osc.effective_mass == f.s("mu*omega_c^2/omega_P^2"));
    CHECK(osc.effective_frequency == f.s("omega_P^2/omega_c"));
    CHECK(osc.zero_point_offset == f.s("1/2*hbar*omega_c"));

    // same oscillator with the flux switched off
    auto g = reduced_fixture(trap_test::kLagrangianNoFlux);
    auto osc2 = recognize_oscillator(g.sys);
    CHECK(osc2.effective_mass == g.s("mu*omega_c^2/omega_P^2"));
    CHECK(osc2.effective_frequency == g.s("omega_P^2/omega_c"));
    CHECK(osc2.zero_point_offset == g.s("1/2*hbar*omega_c"));
}

TEST_CASE("plain oscillator Hamiltonians are recognized directly") {
    auto t = std::make_shared<SymbolTable>();
    auto x = t->register_coordinate("x");
    auto p = t->register_momentum("p");
    t->register_parameter("m", true);
    t->register_parameter("Omega", true);
    ReducedCanonicalSystem sys{
        {CanonicalPair{x, p, Expr::symbol(t, x), Expr::symbol(t, p)}},
        {},
        {},
        parse("p^2/(2*m) + 1/2*m*Omega^2*x^2", t)};
    auto osc = recognize_oscillator(sys);
    CHECK(osc.effective_mass == parse("m", t));
    CHECK(osc.effective_frequency == parse("Omega", t));
    CHECK(osc.zero_point_offset.is_zero());
}

TEST_CASE("out-of-class Hamiltonians are rejected") {
    auto t = std::make_shared<SymbolTable>();
    auto x = t->register_coordinate("x");
    auto p = t->register_momentum("p");
    t->register_parameter("m", true);
    auto make_sys = [&](const char* text) {
        return ReducedCanonicalSystem{
            {CanonicalPair{x, p, Expr::symbol(t, x), Expr::symbol(t, p)}},
            {},
            {},
            parse(text, t)};
    };
    CHECK_THROWS_AS(recognize_oscillator(make_sys("p^2 + x^2 + x*p")), QuantizeError);
    CHECK_THROWS_AS(recognize_oscillator(make_sys("p^2 + x^3")), QuantizeError);
    CHECK_THROWS_AS(recognize_oscillator(make_sys("p^2 - m*x^2")), QuantizeError);
    CHECK_THROWS_AS(recognize_oscillator(make_sys("p^2")), QuantizeError);
}

TEST_CASE("oscillator spectrum is the exact ladder formula") {
    auto f = reduced_fixture(trap_test::kLagrangianFull);
    auto osc = recognize_oscillator(f.sys);
    auto spectrum = oscillator_spectrum(osc, 3, f.s.hbar);
    REQUIRE(spectrum.levels.size() == 4);
    CHECK(*spectrum.levels[0].energy ==
          f.s("1/2*hbar*omega_P^2/omega_c + 1/2*hbar*omega_c"));
    CHECK(*spectrum.levels[2].energy ==
          f.s("5/2*hbar*omega_P^2/omega_c + 1/2*hbar*omega_c"));

    // spacing is hbar*omega*, independent of the flux parameter
    Expr spacing = *spectrum.levels[1].energy - *spectrum.levels[0].energy;
    CHECK(spacing == f.s("hbar*omega_P^2/omega_c"));
    CHECK(differentiate(spacing, f.s.omega_0).is_zero());
}

TEST_CASE("generic ladder formula for a plain oscillator") {
    auto t = std::make_shared<SymbolTable>();
    t->register_coordinate("x");
    t->register_momentum("p");
    t->register_parameter("m", true);
    auto omega = t->register_parameter("Omega", true);
    auto hbar = t->register_parameter("hbar", true);
    OscillatorForm osc{parse("m", t), Expr::symbol(t, omega), Expr::zero(t)};
    auto spectrum = oscillator_spectrum(osc, 3, hbar);
    CHECK(*spectrum.levels[3].energy == parse("7/2*hbar*Omega", t));
}

TEST_CASE("kinetic-energy oscillator has the half-quantum ground level") {
    auto s = make_trap_setup();
    OscillatorForm osc{s("mu"), s("omega_c"), s("0")};
    auto spectrum = oscillator_spectrum(osc, 0, s.hbar);
    CHECK(*spectrum.levels[0].energy == s("1/2*hbar*omega_c"));
}

TEST_CASE("angular momentum carries the flux-induced fractional offset") {
    auto f = reduced_fixture(trap_test::kLagrangianFull);
    auto& s = f.s;
    auto osc = recognize_oscillator(f.sys);
    auto j = angular_momentum_reduce(s("x1*p2 - x2*p1"), f.sys, osc, s.hbar);

    // the fractional part equals q*Phi_0/(2*pi*c) once the total-flux
    // alias Phi_0 = pi a^2 B_0, B_0 = mu omega_0 c / q is expanded
    CHECK(j.fractional_offset == s("mu*omega_0*a^2/2"));
    CHECK(j.ladder_coefficient == s("hbar"));
    CHECK(j.number_offset == s("1/2"));
    CHECK(j.zero_point == s("hbar/2 + mu*omega_0*a^2/2"));

    // the induced offset does not depend on the spectator or trap scales
    CHECK(differentiate(j.fractional_offset, s.omega_c).is_zero());
    CHECK(differentiate(j.fractional_offset, s.omega_P).is_zero());
    CHECK(differentiate(j.fractional_offset, s.mu) == s("omega_0*a^2/2"));
    Expr alpha_term = j.fractional_offset / s("mu");
    CHECK(differentiate(alpha_term, s.mu).is_zero());
}

TEST_CASE("without flux the zero-point angular momentum is the bare half") {
    auto f = reduced_fixture(trap_test::kLagrangianNoFlux);
    auto& s = f.s;
    auto osc = recognize_oscillator(f.sys);
    auto j = angular_momentum_reduce(s("x1*p2 - x2*p1"), f.sys, osc, s.hbar);
    CHECK(j.fractional_offset.is_zero());
    CHECK(j.zero_point == s("hbar/2"));
}

TEST_CASE("flux-off limit of the full result matches the no-flux system") {
    auto f = reduced_fixture(trap_test::kLagrangianFull);
    auto g = reduced_fixture(trap_test::kLagrangianNoFlux);
    auto jf = angular_momentum_reduce(f.s("x1*p2 - x2*p1"), f.sys,
                                      recognize_oscillator(f.sys), f.s.hbar);
    auto jg = angular_momentum_reduce(g.s("x1*p2 - x2*p1"), g.sys,
                                      recognize_oscillator(g.sys), g.s.hbar);
    Expr limit = substitute(jf.zero_point, f.s.omega_0, f.s("0"));
    CHECK(to_string(limit) == to_string(jg.zero_point));

    // difference of the two zero points is exactly the induced offset
    Expr diff = jf.zero_point - parse(to_string(jg.zero_point), f.s.table);
    CHECK(diff == f.s("mu*omega_0*a^2/2"));
}

TEST_CASE("Landau levels from the mechanical momenta") {
    auto s = make_trap_setup();
    auto h = legendre(decompose_lagrangian(s(trap_test::kLagrangianNoFlux), s.ps))
                 .hamiltonian;
    auto momenta = mechanical_momenta(h);
    auto spectrum = landau_levels(momenta, 1, s.hbar);
    CHECK(spectrum.kind == Spectrum::Kind::landau);
    CHECK(*spectrum.levels[0].energy == s("1/2*hbar*omega_c"));
    CHECK(*spectrum.levels[1].energy == s("3/2*hbar*omega_c"));

    // the canonical pair Q = K1/c0, Pi = K2 has unit bracket
    Expr c0 = momenta.bracket_matrix[0][1];
    Expr q = momenta.components[0] / c0;
    CHECK(poisson_bracket(q, momenta.components[1], s.ps).is_one());
}

TEST_CASE("Landau levels agree with the full-trap kinetic spectrum") {
    auto s = make_trap_setup();
    auto h = legendre(decompose_lagrangian(s(trap_test::kLagrangianFull), s.ps))
                 .hamiltonian;
    auto spectrum = landau_levels(mechanical_momenta(h), 2, s.hbar);
    OscillatorForm equivalent{s("mu"), s("omega_c"), s("0")};
    auto direct = oscillator_spectrum(equivalent, 2, s.hbar);
    for (std::size_t n = 0; n < 3; ++n)
        CHECK(*spectrum.levels[n].energy == *direct.levels[n].energy);
}

TEST_CASE("commuting mechanical momenta have no Landau levels") {
    auto s = make_trap_setup();
    auto h = legendre(decompose_lagrangian(s(trap_test::kLagrangianNoSpectator), s.ps))
                 .hamiltonian;
    CHECK_THROWS_AS(landau_levels(mechanical_momenta(h), 1, s.hbar),
                    CommutingMomentaError);
}
