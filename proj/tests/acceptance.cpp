// Acceptance suite: one criterion per numbered block, one PASS/FAIL
// line each, every tolerance pinned in code.  The suite exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fluxtrap/numeric/secular.hpp"
#include "fluxtrap/report.hpp"

#include "trap_fixtures.hpp"

using namespace fluxtrap;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
    int criteria_failed = 0;
    bool current_ok = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            current_ok = false;
            notes.push_back(what);
        }
    }

    void criterion(int index, const std::string& title,
                   const std::function<void()>& body, double budget_seconds) {
        current_ok = true;
        notes.clear();
        auto t0 = Clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            current_ok = false;
            notes.push_back(std::string("exception: ") + e.what());
        }
        double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        if (elapsed > budget_seconds) {
            current_ok = false;
            notes.push_back("runtime " + std::to_string(elapsed) +
                            " s exceeds budget " + std::to_string(budget_seconds) +
                            " s");
        }
        std::printf("[%d] %s - %s (%.2f s)\n", index,
                    current_ok ? "PASS" : "FAIL", title.c_str(), elapsed);
        for (const auto& n : notes) std::printf("      %s\n", n.c_str());
        if (!current_ok) ++criteria_failed;
    }
};

struct FixtureRun {
    Scenario scenario;
    Report report;
    std::vector<GoldenCheck> checks;
};

FixtureRun run_fixture(const std::string& name) {
    Scenario sc = load_scenario(name);
    RunOptions opt;
    opt.with_numeric = false;
    Report report = run_scenario(sc, opt);
    auto checks = verify_goldens(report, sc);
    return FixtureRun{std::move(sc), std::move(report), std::move(checks)};
}

}  // namespace

int main() {
    Harness h;

    // ------------------------------------------------------------------
    h.criterion(1, "combined-trap fixture, symbolic end-to-end, exact", [&] {
        auto run = run_fixture("combined-trap-with-flux");
        auto& r = run.report;
        auto t = r.table;
        auto val = [&](const char* key) { return r.symbolic_values.at(key); };
        auto expand = [&](const char* text) {
            return expand_aliases(parse(text, t), r.aliases);
        };

        h.check(val("primary_constraint_1") ==
                    expand("p1 + 1/2*mu*omega_c*x2 + mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))"),
                "primary constraint 1 differs");
        h.check(val("primary_constraint_2") ==
                    expand("p2 - 1/2*mu*omega_c*x1 - mu*omega_0*a^2*x1/(2*(x1^2 + x2^2))"),
                "primary constraint 2 differs");
        h.check(val("constraint_matrix_11").is_zero() &&
                    val("constraint_matrix_12") == expand("mu*omega_c") &&
                    val("constraint_matrix_21") == expand("-mu*omega_c") &&
                    val("constraint_matrix_22").is_zero(),
                "constraint matrix is not mu*omega_c*eps");

        // Dirac bracket of the surviving coordinates, as stated.  The
        // engine computes the opposite orientation (see the fixture's
        // recorded-claim discrepancy); this sub-check is kept faithful
        // to the stated value and fails honestly.
        Expr dirac = val("dirac_x1_x2");
        h.check(dirac == expand("1/(mu*omega_c)"),
                "{x1,x2}_D: computed " + to_string(dirac) +
                    ", stated 1/(mu*omega_c); engine derivation and the "
                    "recorded-claim diagnostics carry both orientations");

        h.check(val("effective_mass") == expand("mu*omega_c^2/omega_P^2"),
                "effective mass differs");
        h.check(val("effective_frequency") == expand("omega_P^2/omega_c"),
                "effective frequency differs");
        Expr mu_star = val("effective_mass"), omega_star = val("effective_frequency");
        Expr rebuilt = parse("p^2", t) / (Expr::integer(t, 2) * mu_star) +
                       Expr::rational(t, make_rat(1, 2)) * mu_star * omega_star *
                           omega_star * parse("x^2", t) +
                       expand("1/2*hbar*omega_c");
        h.check(val("reduced_hamiltonian") == rebuilt,
                "reduced Hamiltonian is not in the (mu*, omega*) oscillator form");

        h.check(val("zero_point_angular_momentum") ==
                    expand("hbar/2 + q*Phi_0/(2*pi*c)"),
                "zero-point angular momentum differs");
        h.check(val("fractional_offset") == expand("q*Phi_0/(2*pi*c)"),
                "induced fractional offset differs");

        for (auto& c : run.checks)
            if (!c.is_claim)
                h.check(c.passed, "fixture golden '" + c.key + "' failed");
    }, 5.0);

    // ------------------------------------------------------------------
    h.criterion(2, "spectator-off fixture: blocked quantization with diagnostics", [&] {
        auto run = run_fixture("spectator-off");
        auto& r = run.report;
        auto t = r.table;
        auto val = [&](const char* key) { return r.symbolic_values.at(key); };
        auto expand = [&](const char* text) {
            return expand_aliases(parse(text, t), r.aliases);
        };

        h.check(val("constraint_matrix_11").is_zero() &&
                    val("constraint_matrix_12").is_zero() &&
                    val("constraint_matrix_21").is_zero() &&
                    val("constraint_matrix_22").is_zero(),
                "primary constraint matrix is not identically zero");
        h.check(val("secondary_constraint_1") == expand("-mu*omega_P^2*x1"),
                "secondary constraint 1 differs");
        h.check(val("secondary_constraint_2") == expand("-mu*omega_P^2*x2"),
                "secondary constraint 2 differs");
        h.check(r.string_values.at("outcome") == "quantization_blocked",
                "outcome is not quantization_blocked");

        // engine-computed secondary/primary brackets recorded alongside
        // the recorded claim, flagged without failing
        h.check(val("secondary_primary_bracket_11") == expand("-mu*omega_P^2"),
                "computed {phi2_1, phi_1} not recorded verbatim");
        h.check(r.json.contains("claim_discrepancies") &&
                    r.json["claim_discrepancies"].size() == 2,
                "claim discrepancies not flagged as expected");
        for (auto& c : run.checks)
            if (!c.is_claim)
                h.check(c.passed, "fixture golden '" + c.key + "' failed");
    }, 5.0);

    // ------------------------------------------------------------------
    h.criterion(3, "flux-off fixture: integer zero point and Landau levels", [&] {
        auto run = run_fixture("flux-off");
        auto& r = run.report;
        auto t = r.table;
        auto val = [&](const char* key) { return r.symbolic_values.at(key); };
        auto expand = [&](const char* text) { return parse(text, t); };

        h.check(val("primary_constraint_1") == expand("p1 + 1/2*mu*omega_c*x2"),
                "primary constraint 1 differs");
        h.check(val("primary_constraint_2") == expand("p2 - 1/2*mu*omega_c*x1"),
                "primary constraint 2 differs");
        h.check(val("constraint_matrix_12") == expand("mu*omega_c"),
                "constraint matrix differs from the combined-trap one");
        h.check(val("kinetic_level_0") == expand("1/2*hbar*omega_c") &&
                    val("kinetic_level_1") == expand("3/2*hbar*omega_c") &&
                    val("kinetic_level_2") == expand("5/2*hbar*omega_c"),
                "Landau levels are not hbar*omega_c*(n + 1/2)");
        h.check(val("zero_point_angular_momentum") == expand("hbar/2"),
                "zero-point angular momentum is not exactly hbar/2");
        h.check(val("fractional_offset").is_zero(),
                "fractional offset is not exactly zero");
        for (auto& c : run.checks)
            if (!c.is_claim)
                h.check(c.passed, "fixture golden '" + c.key + "' failed");
    }, 5.0);

    // ------------------------------------------------------------------
    h.criterion(4, "gauge suite: potential, Hamiltonian and observable", [&] {
        auto run = run_fixture("combined-trap-with-flux");
        auto& r = run.report;
        auto t = r.table;
        h.check(r.symbolic_values.at("transformed_potential_1").is_zero() &&
                    r.symbolic_values.at("transformed_potential_2").is_zero(),
                "flux potential plus gauge gradient is not zero");
        h.check(r.string_values.at("gauge_hamiltonian_matches") == "true",
                "transformed Hamiltonian does not equal the flux-free one");
        Expr jp = r.symbolic_values.at("gauge_jz");
        Expr direct = r.symbolic_values.at("angular_momentum_coordinates");
        h.check(jp == direct,
                "gauge-transformed J differs from the direct reduction");
        Expr expected = expand_aliases(
            parse("q*Phi_0/(2*pi*c) + 1/2*mu*omega_c*(x1^2 + x2^2)", t), r.aliases);
        h.check(jp == expected, "gauge-transformed J has the wrong closed form");
    }, 5.0);

    // ------------------------------------------------------------------
    h.criterion(5, "mechanical momenta brackets and randomized properties", [&] {
        auto s = trap_test::make_trap_setup();
        auto with_flux = mechanical_momenta(
            legendre(decompose_lagrangian(s(trap_test::kLagrangianFull), s.ps))
                .hamiltonian);
        auto no_flux = mechanical_momenta(
            legendre(decompose_lagrangian(s(trap_test::kLagrangianNoFlux), s.ps))
                .hamiltonian);
        auto no_spectator = mechanical_momenta(
            legendre(decompose_lagrangian(s(trap_test::kLagrangianNoSpectator), s.ps))
                .hamiltonian);
        h.check(with_flux.bracket_matrix[0][1] == s("mu*omega_c"),
                "{K1, K2} with flux term is not mu*omega_c");
        h.check(no_flux.bracket_matrix[0][1] == s("mu*omega_c"),
                "{K1, K2} without flux term is not mu*omega_c");
        h.check(no_spectator.bracket_matrix[0][1].is_zero(),
                "{K1, K2} without the spectator field is not zero");

        trap_test::Rng rng(20260808);
        int cases = 200;
        for (int i = 0; i < cases; ++i) {
            Expr f = trap_test::random_poly_expr(s, rng);
            Expr g = trap_test::random_poly_expr(s, rng);
            if (poisson_bracket(f, g, s.ps) != -poisson_bracket(g, f, s.ps)) {
                h.check(false, "antisymmetry failed at case " + std::to_string(i));
                break;
            }
        }
        for (int i = 0; i < cases; ++i) {
            Expr f = trap_test::random_poly_expr(s, rng, 2);
            Expr g = trap_test::random_poly_expr(s, rng, 2);
            Expr k = trap_test::random_poly_expr(s, rng, 2);
            Expr lhs = poisson_bracket(f * g, k, s.ps);
            Expr rhs = f * poisson_bracket(g, k, s.ps) +
                       poisson_bracket(f, k, s.ps) * g;
            if (lhs != rhs) {
                h.check(false, "Leibniz failed at case " + std::to_string(i));
                break;
            }
        }
        for (int i = 0; i < cases; ++i) {
            Expr f = trap_test::random_poly_expr(s, rng, 3, 3);
            Expr g = trap_test::random_poly_expr(s, rng, 3, 3);
            Expr k = trap_test::random_poly_expr(s, rng, 3, 3);
            Expr cyc = poisson_bracket(f, poisson_bracket(g, k, s.ps), s.ps) +
                       poisson_bracket(g, poisson_bracket(k, f, s.ps), s.ps) +
                       poisson_bracket(k, poisson_bracket(f, g, s.ps), s.ps);
            if (!cyc.is_zero()) {
                h.check(false, "Jacobi failed at case " + std::to_string(i));
                break;
            }
        }
    }, 120.0);

    // ------------------------------------------------------------------
    h.criterion(6, "numeric flux shift and closed-form spectra", [&] {
        using namespace fluxtrap::numeric;

        // integer flux relabeling at matched grids
        RadialGrid grid_a{18.0, 1500, 0.0, 1.0};
        auto ra = radial_spectrum(NumericScenario{0.25, 1.0, 0.5}, 1, grid_a, 4);
        auto rb = radial_spectrum(NumericScenario{1.25, 1.0, 0.5}, 0, grid_a, 4);
        for (int k = 0; k < 4; ++k) {
            double rel = std::abs(ra.energies[k] - rb.energies[k]) /
                         std::abs(rb.energies[k]);
            h.check(rel < 1e-8, "flux-shift sectors differ at level " +
                                    std::to_string(k) + " by " + std::to_string(rel));
        }

        // closed form pre-validated against the independent dense oracle
        // (coarse grids; the oracle discretizes the sqrt(r)-transformed
        // operator on a regular mesh and diagonalizes densely)
        {
            NumericScenario s{0.0, 1.0, 0.5};
            const int n = 520;
            const double r_max = 14.0, h_step = r_max / n;
            const int dim = n - 1;
            std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
            const double nu = 1.0;
            const double omega2 = s.omega_p * s.omega_p + 0.25 * s.omega_c * s.omega_c;
            for (int j = 0; j < dim; ++j) {
                double rr = (j + 1) * h_step;
                a[j][j] = 1.0 / (h_step * h_step) +
                          (nu * nu - 0.25) / (2.0 * rr * rr) +
                          0.5 * s.omega_c * nu + 0.5 * omega2 * rr * rr;
                if (j + 1 < dim) a[j][j + 1] = a[j + 1][j] = -0.5 / (h_step * h_step);
            }
            for (int sweep = 0; sweep < 30; ++sweep) {
                double off = 0.0;
                for (int p = 0; p < dim; ++p)
                    for (int q = p + 1; q < dim; ++q) off += a[p][q] * a[p][q];
                if (off < 1e-18) break;
                for (int p = 0; p < dim; ++p)
                    for (int q = p + 1; q < dim; ++q) {
                        if (std::abs(a[p][q]) < 1e-300) continue;
                        double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                        double tt = std::copysign(1.0, theta) /
                                    (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                        double cc = 1.0 / std::sqrt(tt * tt + 1.0), ss = tt * cc;
                        for (int i = 0; i < dim; ++i) {
                            double aip = a[i][p], aiq = a[i][q];
                            a[i][p] = cc * aip - ss * aiq;
                            a[i][q] = ss * aip + cc * aiq;
                        }
                        for (int i = 0; i < dim; ++i) {
                            double api = a[p][i], aqi = a[q][i];
                            a[p][i] = cc * api - ss * aqi;
                            a[q][i] = ss * api + cc * aqi;
                        }
                    }
            }
            std::vector<double> ev(dim);
            for (int i = 0; i < dim; ++i) ev[i] = a[i][i];
            std::sort(ev.begin(), ev.end());
            for (int k = 0; k < 3; ++k) {
                double fd = fock_darwin_level(k, 1, s);
                double rel = std::abs(ev[k] - fd) / fd;
                h.check(rel < 5e-4, "dense oracle disagrees with the closed form "
                                    "at level " + std::to_string(k) + " (" +
                                    std::to_string(rel) + ")");
            }
        }

        // closed-form match at zero flux on a fine (>= 2000 point) grid
        NumericScenario s0{0.0, 1.0, 0.5};
        RadialGrid fine{14.0, 8000, 0.0, 1.0};
        for (int m : {0, 1, -1}) {
            auto result = radial_spectrum(s0, m, fine, 3);
            for (int k = 0; k < 3; ++k) {
                double fd = fock_darwin_level(k, m, s0);
                double rel = std::abs(result.energies[k] - fd) / fd;
                h.check(rel < 1e-6, "m=" + std::to_string(m) + " level " +
                                        std::to_string(k) + " off closed form by " +
                                        std::to_string(rel));
            }
        }
    }, 60.0);

    // ------------------------------------------------------------------
    h.criterion(7, "secular frequency against the effective potential", [&] {
        using namespace fluxtrap::numeric;
        const double amplitude = 0.70710678118654752440;  // Omega = 1 exactly
        auto error_at = [&](double ratio) {
            double predicted = 1.0 / (4.0 * ratio);
            double duration = 40.0 * 2.0 * M_PI / predicted;
            double extracted =
                secular_frequency(amplitude, 1.0, ratio, 1.0, 1.0, duration);
            return std::abs(extracted - predicted) / predicted;
        };
        double e20 = error_at(20.0);
        double e50 = error_at(50.0);
        double e100 = error_at(100.0);
        h.check(e50 < 0.02, "ratio-50 error " + std::to_string(e50) +
                                " exceeds the 2% tolerance");
        h.check(e20 > e50 && e50 > e100,
                "error not monotone: e(20)=" + std::to_string(e20) +
                    " e(50)=" + std::to_string(e50) +
                    " e(100)=" + std::to_string(e100));
    }, 120.0);

    // ------------------------------------------------------------------
    h.criterion(8, "trajectory conservation in the trap fields", [&] {
        using namespace fluxtrap::numeric;
        NumericScenario full{0.5, 1.0, 0.5};
        TrajectoryState init{1.0, 0.0, 0.1, 0.8, 0.0};
        double period = 2.0 * M_PI / full.omega_c;
        double dt = 0.002;
        auto steps = static_cast<std::int64_t>(1000.0 * period / dt);
        auto result = integrate_trajectory(full, init, dt, steps);
        h.check(result.energy_drift < 1e-6,
                "energy drift " + std::to_string(result.energy_drift));
        h.check(result.jz_drift < 1e-6,
                "canonical J_z drift " + std::to_string(result.jz_drift));

        NumericScenario magnetic{0.0, 1.0, 0.0};
        TrajectoryState circ{2.0, 0.0, 0.0, -2.0, 0.0};
        auto steps_mag = static_cast<std::int64_t>(1000.0 * period / 0.01);
        auto mag = integrate_trajectory(magnetic, circ, 0.01, steps_mag);
        h.check(mag.speed_drift / 1000.0 < 1e-10,
                "speed drift per period " + std::to_string(mag.speed_drift / 1000.0));
    }, 60.0);

    std::printf("%d of 8 criteria failed\n", h.criteria_failed);
    return h.criteria_failed;
}
