#pragma once

#include <vector>

#include "fluxtrap/dirac.hpp"
#include "fluxtrap/mechanics.hpp"

namespace fluxtrap {

/// Gauge function chi known only through its rational gradient and the
/// increment it picks up per loop around the origin.  chi itself is an
/// arctangent and never becomes an expression; everything the
/// transformation needs is rational.
struct GaugeFunction {
    std::vector<Expr> gradient;
    Expr winding_constant;
};

/// Validate curl(gradient) = 0 away from the origin and wrap.
inline GaugeFunction make_gauge_function(std::vector<Expr> gradient,
                                         Expr winding_constant, Symbol x1,
                                         Symbol x2) {
    if (gradient.size() != 2)
        throw ModelError("gauge gradient must have two components");
    Expr curl = differentiate(gradient[1], x1) - differentiate(gradient[0], x2);
    if (!curl.is_zero())
        throw ModelError("gauge gradient is not curl-free: " + to_string(curl));
    return GaugeFunction{std::move(gradient), std::move(winding_constant)};
}

/// Gradient of chi = -(coeff/2) * arctan(x2/x1) together with its loop
/// increment -pi*coeff; for coeff = B0 a^2 this gauges the flux-line
/// potential away.
inline GaugeFunction make_flux_gauge(const Expr& coeff, Symbol x1, Symbol x2,
                                     const Expr& pi) {
    const SymbolTablePtr& t = coeff.table();
    Expr sx1 = Expr::symbol(t, x1), sx2 = Expr::symbol(t, x2);
    Expr rho2 = sx1 * sx1 + sx2 * sx2;
    Expr two = Expr::integer(t, 2);
    std::vector<Expr> grad = {coeff * sx2 / (two * rho2),
                              -coeff * sx1 / (two * rho2)};
    return make_gauge_function(std::move(grad), -pi * coeff, x1, x2);
}

/// A' = A + grad(chi), componentwise.
inline std::vector<Expr> transform_potential(const std::vector<Expr>& potential,
                                             const GaugeFunction& g) {
    if (potential.size() != g.gradient.size())
        throw ModelError("potential and gauge gradient dimensions differ");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < potential.size(); ++i)
        out.push_back(potential[i] + g.gradient[i]);
    return out;
}

/// Conjugation by exp(i q chi / c hbar) shifts each mechanical
/// momentum: K_i -> K_i - (q/c) grad_i(chi), which is the same as
/// replacing the vector potential by A + grad(chi) inside the kinetic
/// part.  The rest of the Hamiltonian is untouched.
inline HamiltonianModel transform_hamiltonian(const HamiltonianModel& h,
                                              const GaugeFunction& g,
                                              const Expr& charge_over_c) {
    if (!h.kinetic)
        throw ModelError("gauge transformation needs a designated kinetic part");
    if (h.kinetic->momenta.size() != g.gradient.size())
        throw ModelError("kinetic momenta and gauge gradient dimensions differ");
    KineticForm kin{{}, h.kinetic->mass};
    for (std::size_t i = 0; i < g.gradient.size(); ++i)
        kin.momenta.push_back(h.kinetic->momenta[i] -
                              charge_over_c * g.gradient[i]);
    Expr rest = h.rest();
    return HamiltonianModel{h.table, h.ps, kin.reconstruct() + rest, kin};
}

/// Transform the angular momentum J = x1 p2 - x2 p1 and evaluate it on
/// the constraint surface of the transformed system.  The conjugation
/// adds the constant -(q/c)(x1 g2 - x2 g1) (the flux term); the
/// elimination map of the analysis turns the remainder into the
/// harmonic coordinate form.
inline Expr transform_observable_and_reduce(const Expr& j, const GaugeFunction& g,
                                            const ConstraintAnalysis& analysis,
                                            const PhaseSpace& ps,
                                            const Expr& charge_over_c) {
    if (analysis.outcome != AnalysisOutcome::reducible)
        throw QuantizationBlockedError(
            "gauge-transformed system has no invertible constraint matrix");
    const SymbolTablePtr& t = j.table();
    Expr sx1 = Expr::symbol(t, ps.coordinate(0));
    Expr sx2 = Expr::symbol(t, ps.coordinate(1));
    Expr jp = j - charge_over_c * (sx1 * g.gradient[1] - sx2 * g.gradient[0]);
    auto elimination = detail::solve_constraints(analysis.constraints, ps,
                                                 /*momenta_only=*/true, "gauge");
    return detail::apply_bindings(jp, elimination);
}

}  // namespace fluxtrap
