#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fluxtrap/constraint.hpp"
#include "fluxtrap/expr.hpp"
#include "fluxtrap/linalg.hpp"

namespace fluxtrap {

/// Lagrangian restricted to the class
///     L = 1/2 v^T M v + A(x).v - V(x) + const
/// with a constant (parameter-only) symmetric mass matrix and
/// velocity-linear coefficients.  Every trap configuration handled by
/// the engine lives in this class, and constraint extraction then
/// reduces to linear algebra over the null space of M.
struct LagrangianModel {
    SymbolTablePtr table;
    PhaseSpace ps;
    std::vector<Symbol> velocities;
    ExprMatrix mass_matrix;
    ExprVector velocity_coeffs;
    Expr potential;
    Expr constant;

    Expr reconstruct() const {
        Expr l = constant - potential;
        for (std::size_t i = 0; i < velocities.size(); ++i) {
            Expr vi = Expr::symbol(table, velocities[i]);
            l = l + velocity_coeffs[i] * vi;
            for (std::size_t j = 0; j < velocities.size(); ++j)
                l = l + Expr::rational(table, make_rat(1, 2)) * mass_matrix[i][j] *
                            vi * Expr::symbol(table, velocities[j]);
        }
        return l;
    }
};

/// Designated kinetic part (sum K_i^2) / (2 mass) with K_i affine in
/// the momenta.
struct KineticForm {
    ExprVector momenta;
    Expr mass;

    Expr reconstruct() const {
        const SymbolTablePtr& t = mass.table();
        Expr s = Expr::zero(t);
        for (const Expr& k : momenta) s = s + k * k;
        return s / (Expr::integer(t, 2) * mass);
    }
};

struct HamiltonianModel {
    SymbolTablePtr table;
    PhaseSpace ps;
    Expr expr;
    std::optional<KineticForm> kinetic;

    /// Everything outside the designated kinetic part.
    Expr rest() const {
        if (!kinetic) return expr;
        return expr - kinetic->reconstruct();
    }
};

struct MechanicalMomenta {
    ExprVector components;
    ExprMatrix bracket_matrix;  // {K_i, K_j}
    Expr mass;
};

struct LegendreResult {
    ExprVector momenta_defs;  // p_i = (M v + A)_i
    std::size_t hessian_rank = 0;
    std::vector<Constraint> primaries;
    HamiltonianModel hamiltonian;
};

namespace detail {

/// Split a velocity-free expression into its parameter-only part and
/// the coordinate-dependent remainder.  Only meaningful when the
/// denominator itself is parameter-only.
inline std::pair<Expr, Expr> split_constant_part(const Expr& e) {
    const SymbolTablePtr& t = e.table();
    bool den_param_only = true;
    std::vector<std::uint32_t> den_vars;
    e.den().collect_vars(den_vars);
    for (std::uint32_t v : den_vars)
        if (t->is_phase_symbol(Symbol{v})) den_param_only = false;
    if (!den_param_only) return {Expr::zero(t), e};

    Poly const_part, rest_part;
    for (auto& term : e.num().terms()) {
        bool param_only = true;
        for (auto& [v, ex] : term.mono.factors)
            if (t->is_phase_symbol(Symbol{v})) param_only = false;
        if (param_only)
            const_part = const_part + Poly::term(term.mono, term.coeff);
        else
            rest_part = rest_part + Poly::term(term.mono, term.coeff);
    }
    return {Expr(t, const_part, e.den()), Expr(t, rest_part, e.den())};
}

}  // namespace detail

/// Decompose a Lagrangian into (M, A, V, const).  Errors when the
/// expression is cubic or higher in the velocities or when a velocity
/// quadratic coefficient depends on the coordinates.
inline LagrangianModel decompose_lagrangian(const Expr& lagrangian,
                                            const PhaseSpace& ps) {
    const SymbolTablePtr& t = lagrangian.table();
    for (std::uint32_t v : lagrangian.used_symbol_indices())
        if (t->kind(Symbol{v}) == SymbolKind::momentum)
            throw ModelError("Lagrangian contains momentum symbol '" +
                             t->name(Symbol{v}) + "'");
    std::vector<Symbol> vels;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto v = t->velocity_of(ps.coordinate(i));
        if (!v)
            throw ModelError("coordinate '" + t->name(ps.coordinate(i)) +
                             "' has no paired velocity symbol");
        vels.push_back(*v);
    }

    auto parts = collect(lagrangian, vels);
    std::size_t n = vels.size();
    LagrangianModel model{t, ps, vels, make_matrix(n, n, t),
                          ExprVector(n, Expr::zero(t)), Expr::zero(t),
                          Expr::zero(t)};

    for (auto& [key, coeff] : parts) {
        std::uint32_t total = 0;
        for (std::uint32_t e : key) total += e;
        if (total > 2)
            throw ModelError("Lagrangian is cubic or higher in the velocities");
        if (total == 2) {
            if (!coeff.is_parameter_only())
                throw ModelError("velocity-quadratic coefficient depends on "
                                 "coordinates (mass matrix must be constant)");
            std::size_t i = 0, j = 0;
            bool diagonal = false;
            for (std::size_t k = 0; k < n; ++k)
                if (key[k] == 2) { i = j = k; diagonal = true; }
            if (!diagonal) {
                std::vector<std::size_t> idx;
                for (std::size_t k = 0; k < n; ++k)
                    if (key[k] == 1) idx.push_back(k);
                i = idx[0];
                j = idx[1];
            }
            if (i == j)
                model.mass_matrix[i][i] = Expr::integer(t, 2) * coeff;
            else {
                model.mass_matrix[i][j] = coeff;
                model.mass_matrix[j][i] = coeff;
            }
        } else if (total == 1) {
            std::size_t i = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (key[k] == 1) i = k;
            for (std::uint32_t v : coeff.used_symbol_indices()) {
                SymbolKind kind = t->kind(Symbol{v});
                if (kind == SymbolKind::momentum || kind == SymbolKind::velocity)
                    throw ModelError("velocity-linear coefficient contains '" +
                                     t->name(Symbol{v}) + "'");
            }
            model.velocity_coeffs[i] = coeff;
        } else {
            auto [c, rest] = detail::split_constant_part(coeff);
            model.constant = c;
            model.potential = -rest;
        }
    }
    return model;
}

/// Legendre transform with singular-Hessian detection.  Rank
/// deficiency is a result, not an error: each null direction of the
/// mass matrix emits a primary constraint n^T (p - A) = 0.
inline LegendreResult legendre(const LagrangianModel& model) {
    const SymbolTablePtr& t = model.table;
    std::size_t n = model.ps.size();

    ExprVector momenta_defs;
    for (std::size_t i = 0; i < n; ++i) {
        Expr def = model.velocity_coeffs[i];
        for (std::size_t j = 0; j < n; ++j)
            def = def + model.mass_matrix[i][j] * Expr::symbol(t, model.velocities[j]);
        momenta_defs.push_back(def);
    }

    ExprVector p_minus_a;
    for (std::size_t i = 0; i < n; ++i)
        p_minus_a.push_back(Expr::symbol(t, model.ps.momentum(i)) -
                            model.velocity_coeffs[i]);

    std::size_t rank = matrix_rank(model.mass_matrix);

    if (rank == n) {
        auto minv = matrix_inverse(model.mass_matrix);
        Expr h = model.potential - model.constant;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                h = h + Expr::rational(t, make_rat(1, 2)) * p_minus_a[i] *
                            (*minv)[i][j] * p_minus_a[j];
        std::optional<KineticForm> kin;
        bool isotropic = true;
        for (std::size_t i = 0; i < n && isotropic; ++i)
            for (std::size_t j = 0; j < n && isotropic; ++j)
                if (i == j ? model.mass_matrix[i][j] != model.mass_matrix[0][0]
                           : !model.mass_matrix[i][j].is_zero())
                    isotropic = false;
        if (isotropic)
            kin = KineticForm{p_minus_a, model.mass_matrix[0][0]};
        return LegendreResult{momenta_defs, rank, {},
                              HamiltonianModel{t, model.ps, h, kin}};
    }

    if (rank == 0) {
        std::vector<Constraint> primaries;
        for (std::size_t i = 0; i < n; ++i)
            primaries.push_back(Constraint{p_minus_a[i], 1,
                                           ConstraintClass::undetermined});
        return LegendreResult{
            momenta_defs, rank, std::move(primaries),
            HamiltonianModel{t, model.ps, model.potential - model.constant,
                             std::nullopt}};
    }

    // Partially singular mass matrices never occur in the trap models;
    // constraints would mix with a reduced kinetic block.
    throw ModelError("mass matrix of intermediate rank " + std::to_string(rank) +
                     " is not supported");
}

/// Rebuild a Lagrangian from an invertible-mass Hamiltonian (inverse of
/// `legendre` on the supported class).
inline LagrangianModel inverse_legendre(const HamiltonianModel& h) {
    if (!h.kinetic)
        throw ModelError("inverse Legendre transform needs a designated kinetic part");
    const SymbolTablePtr& t = h.table;
    std::size_t n = h.ps.size();
    LagrangianModel model{t, h.ps, {}, make_matrix(n, n, t),
                          ExprVector(n, Expr::zero(t)), Expr::zero(t),
                          Expr::zero(t)};
    for (std::size_t i = 0; i < n; ++i) {
        auto v = t->velocity_of(h.ps.coordinate(i));
        if (!v) throw ModelError("missing velocity symbol for inverse Legendre");
        model.velocities.push_back(*v);
        model.mass_matrix[i][i] = h.kinetic->mass;
        model.velocity_coeffs[i] =
            Expr::symbol(t, h.ps.momentum(i)) - h.kinetic->momenta[i];
    }
    auto [c, rest] = detail::split_constant_part(h.rest());
    model.potential = rest;
    model.constant = -c;
    return model;
}

/// Mechanical momenta of the designated kinetic part together with
/// their Poisson bracket matrix.  Canonical quantization reads the
/// commutator off as [K_i, K_j] = i hbar {K_i, K_j}.
inline MechanicalMomenta mechanical_momenta(const HamiltonianModel& h) {
    if (!h.kinetic)
        throw ModelError("Hamiltonian has no designated kinetic part");
    const SymbolTablePtr& t = h.table;
    std::size_t n = h.kinetic->momenta.size();
    for (const Expr& k : h.kinetic->momenta)
        for (std::size_t i = 0; i < h.ps.size(); ++i)
            if (k.num().degree_in(h.ps.momentum(i).index) > 1 ||
                k.den().contains(h.ps.momentum(i).index))
                throw ModelError("kinetic momenta must be affine in the momenta");
    for (std::uint32_t v : h.rest().used_symbol_indices())
        if (t->kind(Symbol{v}) == SymbolKind::momentum)
            throw ModelError("kinetic designation does not exhaust the momenta");

    MechanicalMomenta out{h.kinetic->momenta, make_matrix(n, n, t), h.kinetic->mass};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.bracket_matrix[i][j] =
                poisson_bracket(out.components[i], out.components[j], h.ps);
    return out;
}

/// Formal kinetic-energy limit: the kinetic operator is replaced by the
/// scalar eigenvalue `level`, the mass matrix collapses to zero and the
/// Lagrangian constant absorbs -level.  A zero level is rejected: the
/// velocities would vanish identically and all dynamics would be lost.
inline std::pair<HamiltonianModel, LagrangianModel> kinetic_limit_reduce(
    const HamiltonianModel& h, const LagrangianModel& l, const Expr& level) {
    if (!level.is_parameter_only())
        throw ModelError("kinetic level must be a parameter-only expression");
    if (level.is_zero())
        throw ModelError("zero kinetic-energy level is excluded: the momenta "
                         "all vanish and no dynamics survives the limit");
    if (!h.kinetic)
        throw ModelError("Hamiltonian has no designated kinetic part");

    HamiltonianModel h0{h.table, h.ps, h.rest() + level, std::nullopt};
    LagrangianModel l0 = l;
    for (auto& row : l0.mass_matrix)
        for (auto& e : row) e = Expr::zero(l.table);
    l0.constant = l0.constant - level;
    return {h0, l0};
}

}  // namespace fluxtrap
