#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fluxtrap/expr.hpp"
#include "fluxtrap/parser.hpp"
#include "fluxtrap/poly_gcd.hpp"

#include "trap_fixtures.hpp"

using namespace fluxtrap;
using trap_test::make_trap_setup;
using trap_test::Rng;

TEST_CASE("monomial order is graded lexicographic over registration order") {
    auto s = make_trap_setup();
    // x1^2 > x1*x2 > x2^2 > x1 > x2 > 1
    Poly p = s("x2 + x1^2 + 1 + x1*x2 + x2^2 + x1").num();
    REQUIRE(p.terms().size() == 6);
    CHECK(p.terms()[0].mono == Monomial::variable(s.x1.index, 2));
    CHECK(p.terms()[1].mono == (Monomial::variable(s.x1.index) * Monomial::variable(s.x2.index)));
    CHECK(p.terms()[2].mono == Monomial::variable(s.x2.index, 2));
    CHECK(p.terms()[3].mono == Monomial::variable(s.x1.index));
    CHECK(p.terms()[4].mono == Monomial::variable(s.x2.index));
    CHECK(p.terms()[5].mono == Monomial::one());
}

TEST_CASE("polynomial gcd strips common factors") {
    auto s = make_trap_setup();
    Expr f = s("(x1 + x2)*(x1 - x2)");
    Expr g = s("(x1 + x2)*(x1 + 2*x2)");
    Poly d = poly_gcd(f.num(), g.num());
    CHECK(d == s("x1 + x2").num());

    // gcd over several variables with rational coefficients
    Poly d2 = poly_gcd(s("3/2*x1^2*p1 + 3/2*x1*x2*p1").num(),
                       s("2*x1^2 + 2*x1*x2").num());
    CHECK(d2 == s("x1^2 + x1*x2").num());

    CHECK(poly_gcd(Poly::zero(), s("2*x1").num()) == s("x1").num());
    CHECK(poly_gcd(s("5").num(), s("7").num()) == Poly::constant(1));
}

TEST_CASE("rational functions normalize to a unique canonical form") {
    auto s = make_trap_setup();
    CHECK(s("(x1^2+x2^2)/(x1^2+x2^2)").is_one());
    CHECK(s("(x1^2 - x2^2)/(x1 + x2)") == s("x1 - x2"));
    CHECK(s("1/2 + 1/3") == s("5/6"));

    // denominator leading coefficient is 1 after normalization
    Expr e = s("x1/(2*x2 + 2*x1)");
    CHECK(e.den().leading_coeff() == Rat(1));
    CHECK(e == s("(1/2*x1)/(x1 + x2)"));
}

TEST_CASE("canonical-form uniqueness: (f + g) - g == f on random inputs") {
    auto s = make_trap_setup();
    Rng rng(12345);
    for (int i = 0; i < 200; ++i) {
        Expr f = trap_test::random_poly_expr(s, rng);
        Expr g = trap_test::random_poly_expr(s, rng);
        if (i % 3 == 0) g = g / s("x1^2 + x2^2");  // exercise fractions too
        CHECK((f + g) - g == f);
    }
}

TEST_CASE("parse handles the canonical angular momentum") {
    auto s = make_trap_setup();
    Expr j = s("x1*p2 - x2*p1");
    Expr built = Expr::symbol(s.table, s.x1) * Expr::symbol(s.table, s.p2) -
                 Expr::symbol(s.table, s.x2) * Expr::symbol(s.table, s.p1);
    CHECK(j == built);
    CHECK(s("0").is_zero());
    CHECK(s("x1^0").is_one());
    CHECK(s("2^3") == s("8"));
    CHECK(s("x1^-2") == Expr::one(s.table) / s("x1^2"));
    CHECK(s("-x1^2") == -s("x1^2"));
}

TEST_CASE("parse reports positions and unknown identifiers") {
    auto s = make_trap_setup();
    CHECK_THROWS_AS(s("x1 + "), ParseError);
    CHECK_THROWS_AS(s("x1 + bogus"), ParseError);
    CHECK_THROWS_WITH_AS(s("x1 + bogus"),
                         doctest::Contains("unknown identifier 'bogus'"), ParseError);
    try {
        s("x1 + bogus");
    } catch (const ParseError& e) {
        CHECK(e.position() == 5);
    }
    CHECK_THROWS_AS(s("(x1"), ParseError);
    CHECK_THROWS_AS(s("x1/(x2 - x2)"), ParseError);
    CHECK_THROWS_AS(s("x1 $ x2"), ParseError);
}

TEST_CASE("printer output re-parses to an equal expression") {
    auto s = make_trap_setup();
    Rng rng(777);
    for (int i = 0; i < 200; ++i) {
        Expr f = trap_test::random_poly_expr(s, rng);
        if (i % 2 == 0) f = f / s("x1^2 + x2^2 + 1");
        CHECK(parse(to_string(f), s.table) == f);
    }
    CHECK(to_string(s("0")) == "0");
    CHECK(to_string(s("x1*p2 - x2*p1")) == "x1*p2 - x2*p1");
}

TEST_CASE("differentiate applies the quotient rule exactly") {
    auto s = make_trap_setup();
    Expr f = s("x2/(x1^2 + x2^2)");
    CHECK(differentiate(f, s.x1) == s("-2*x1*x2/(x1^2 + x2^2)^2"));
    CHECK(differentiate(s("x1*p2 - x2*p1"), s.p1) == s("-x2"));
    CHECK(differentiate(s("mu*omega_c^2"), s.x1).is_zero());
}

TEST_CASE("substitute is simultaneous and guards against misuse") {
    auto s = make_trap_setup();
    CHECK(substitute(s("x1*p2"), s.x1, s("0")).is_zero());

    // simultaneous, not sequential
    Expr f = substitute(s("x1 + p1"), {{s.x1, s("p2")}, {s.p1, s("x2")}});
    CHECK(f == s("p2 + x2"));

    CHECK_THROWS_AS(substitute(s("x1"), {{s.x1, s("x1 + 1")}}), SubstitutionError);
    CHECK_THROWS_AS(substitute(s("x1"), {{s.x1, s("x2")}, {s.x2, s("1")}}),
                    SubstitutionError);
    CHECK_THROWS_AS(substitute(s("1/x1"), s.x1, s("0")), SubstitutionError);
}

TEST_CASE("eliminating momenta turns J_z into flux plus harmonic form") {
    auto s = make_trap_setup();
    Expr j = s("x1*p2 - x2*p1");
    Expr p1_of_x = s("-1/2*mu*omega_c*x2 - mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))");
    Expr p2_of_x = s("1/2*mu*omega_c*x1 + mu*omega_0*a^2*x1/(2*(x1^2 + x2^2))");
    Expr reduced = substitute(j, {{s.p1, p1_of_x}, {s.p2, p2_of_x}});

    // flux parameter enters through the defined total-flux alias
    auto b0 = s.table->register_parameter("B_0", true);
    auto phi0 = s.table->register_parameter("Phi_0", true);
    std::vector<Alias> aliases = {
        {phi0, s("pi*a^2*B_0")},
        {b0, s("mu*omega_0*c/q")},
    };
    Expr golden = expand_aliases(
        s("q*Phi_0/(2*pi*c) + 1/2*mu*omega_c*(x1^2 + x2^2)"), aliases);
    CHECK(reduced == golden);
    CHECK(reduced == s("mu*omega_0*a^2/2 + 1/2*mu*omega_c*(x1^2 + x2^2)"));
}

TEST_CASE("flux-free constraint is solved identically by its elimination") {
    auto s = make_trap_setup();
    Expr phi1 = s("p1 + 1/2*mu*omega_c*x2");
    CHECK(substitute(phi1, s.p1, s("-1/2*mu*omega_c*x2")).is_zero());
}

TEST_CASE("exact square roots of monomial squares") {
    auto s = make_trap_setup();
    auto r = sqrt_exact(s("omega_P^4/omega_c^2"));
    REQUIRE(r.has_value());
    CHECK(*r == s("omega_P^2/omega_c"));
    CHECK(sqrt_exact(s("9/4*mu^2")) == s("3/2*mu"));
    CHECK(!sqrt_exact(s("omega_P^3")).has_value());
    CHECK(!sqrt_exact(s("x1^2 + x2^2")).has_value());
}

TEST_CASE("positivity is tracked through declared parameter flags") {
    auto s = make_trap_setup();
    CHECK(is_positive_under_assumptions(s("mu*omega_c^2/omega_P^2")));
    CHECK(is_positive_under_assumptions(s("mu + omega_c")));
    CHECK(!is_positive_under_assumptions(s("mu - omega_c")));
    CHECK(!is_positive_under_assumptions(s("x1^2")));  // not a flagged parameter
}

TEST_CASE("numeric evaluation binds symbols by name") {
    auto s = make_trap_setup();
    double v = eval_double(s("mu*omega_c^2/omega_P^2"),
                           {{"mu", 2.0}, {"omega_c", 3.0}, {"omega_P", 1.5}});
    CHECK(v == doctest::Approx(8.0));
    CHECK_THROWS_AS(eval_double(s("mu"), {}), Error);
}

TEST_CASE("collect splits off chosen symbols with expression coefficients") {
    auto s = make_trap_setup();
    auto parts = collect(s("1/2*mu*(v1^2 + v2^2) - mu*omega_P^2*x1*v1"), {s.v1, s.v2});
    REQUIRE(parts.size() == 3);
    CHECK(parts.at({2, 0}) == s("mu/2"));
    CHECK(parts.at({0, 2}) == s("mu/2"));
    CHECK(parts.at({1, 0}) == s("-mu*omega_P^2*x1"));
    CHECK_THROWS_AS(collect(s("1/x1"), {s.x1}), ModelError);
}

TEST_CASE("gcd property: divides both inputs and leaves coprime quotients") {
    auto s = make_trap_setup();
    Rng rng(31337);
    for (int i = 0; i < 120; ++i) {
        // build a, b with a planted common factor
        Expr g = trap_test::random_poly_expr(s, rng, 2, 2);
        Expr u = trap_test::random_poly_expr(s, rng, 2, 2);
        Expr v = trap_test::random_poly_expr(s, rng, 2, 2);
        if (g.is_zero() || u.is_zero() || v.is_zero()) continue;
        Poly a = (g * u).num();
        Poly b = (g * v).num();
        Poly d = poly_gcd(a, b);

        // d divides both
        CHECK_NOTHROW(a.divide_exact(d));
        CHECK_NOTHROW(b.divide_exact(d));
        // the planted factor divides d
        Poly planted = primitive_part(g.num());
        CHECK_NOTHROW(d.divide_exact(poly_gcd(d, planted)));
        CHECK(poly_gcd(d, planted) == planted);
        // quotients are coprime
        Poly qa = a.divide_exact(d);
        Poly qb = b.divide_exact(d);
        CHECK(poly_gcd(qa, qb).is_constant());
    }
}

TEST_CASE("gcd handles repeated factors and monomial content") {
    auto s = make_trap_setup();
    Expr rho2 = s("x1^2 + x2^2");
    Poly a = (rho2.pow(3) * s("x1^2*mu")).num();
    Poly b = (rho2.pow(2) * s("x1*omega_c")).num();
    Poly d = poly_gcd(a, b);
    CHECK(d == (rho2.pow(2) * s("x1")).num());

    CHECK(poly_gcd(rho2.pow(4).num(), rho2.pow(4).num()) == rho2.pow(4).num());
    CHECK(poly_gcd(s("x1*x2^2").num(), s("x1^3*x2").num()) == s("x1*x2").num());
}

TEST_CASE("symbolic arithmetic agrees with numeric evaluation") {
    auto s = make_trap_setup();
    Rng rng(911);
    std::map<std::string, double> at = {
        {"x1", 1.3}, {"x2", -0.7}, {"p1", 0.4}, {"p2", 2.1},
        {"mu", 1.9}, {"omega_c", 0.6}};
    for (int i = 0; i < 100; ++i) {
        Expr f = trap_test::random_poly_expr(s, rng, 3, 3);
        Expr g = trap_test::random_poly_expr(s, rng, 3, 3);
        double fv = eval_double(f, at), gv = eval_double(g, at);
        CHECK(eval_double(f + g, at) == doctest::Approx(fv + gv).epsilon(1e-10));
        CHECK(eval_double(f * g, at) == doctest::Approx(fv * gv).epsilon(1e-10));
        if (std::abs(gv) > 1e-6)
            CHECK(eval_double(f / g, at) == doctest::Approx(fv / gv).epsilon(1e-10));
    }
}
