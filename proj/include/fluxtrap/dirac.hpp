#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fluxtrap/constraint.hpp"
#include "fluxtrap/linalg.hpp"
#include "fluxtrap/mechanics.hpp"

namespace fluxtrap {

/// Bracket matrix C_ab = {phi_a, phi_b} of a constraint set, with
/// invertibility decided symbolically over the rational-function field
/// in the parameters (nondegenerate parameters are nonzero by
/// declaration, so mu*omega_c has an inverse).
struct ConstraintMatrix {
    ExprMatrix entries;
    Expr determinant;
    bool invertible = false;
    std::optional<ExprMatrix> inverse;
};

enum class AnalysisOutcome { reducible, quantization_blocked };

inline const char* to_string(AnalysisOutcome o) {
    return o == AnalysisOutcome::reducible ? "reducible" : "quantization_blocked";
}

struct DiracTableEntry {
    std::string lhs, rhs;
    Expr value;
};

/// Full output of the consistency algorithm.  `matrix` is the bracket
/// matrix of the primary constraints: the matrix whose inverse defines
/// the Dirac brackets; when it is singular the quantization is blocked.
/// `full_matrix` covers every generation and is kept for diagnostics,
/// including the case where later generations carry nonzero brackets
/// that recorded reference values say should vanish.
struct ConstraintAnalysis {
    std::vector<Constraint> constraints;
    ConstraintMatrix matrix;
    ConstraintMatrix full_matrix;
    AnalysisOutcome outcome = AnalysisOutcome::quantization_blocked;
    std::optional<std::vector<DiracTableEntry>> dirac_table;
    std::size_t n_primaries = 0;
};

/// Surviving canonical structure after the second-class constraints are
/// eliminated: fresh (position, momentum) symbols scaled to unit Dirac
/// bracket, the elimination map for the dependent variables, and the
/// Hamiltonian rewritten in the new pair.
struct CanonicalPair {
    Symbol position;
    Symbol momentum;
    Expr position_def;  // in the original variables
    Expr momentum_def;
};

struct ReducedCanonicalSystem {
    std::vector<CanonicalPair> independent_pairs;
    std::vector<std::pair<Symbol, Expr>> elimination_map;  // dependent -> independents
    std::vector<std::pair<Symbol, Expr>> pair_rewrite;     // independent -> new pair
    Expr reduced_hamiltonian;
};

enum class ReductionChoice { coordinates_independent };

namespace detail {

/// Apply single-symbol bindings repeatedly until none of the bound
/// symbols remains.  Bindings are applied one at a time, so chains
/// (p -> f(x), x -> 0) resolve without simultaneous-substitution rules
/// getting in the way; cycles are caught by the pass guard.
inline Expr apply_bindings(Expr e,
                           const std::vector<std::pair<Symbol, Expr>>& bindings) {
    std::size_t guard = (bindings.size() + 2) * (bindings.size() + 2);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [s, r] : bindings) {
            if (e.uses(s)) {
                e = substitute(e, s, r);
                changed = true;
            }
        }
        if (changed && guard-- == 0)
            throw SubstitutionError("elimination map does not resolve");
    }
    return e;
}

inline std::optional<std::pair<Symbol, Expr>> solve_affine_for(const Expr& constraint,
                                                               Symbol v) {
    if (constraint.den().contains(v.index)) return std::nullopt;
    if (constraint.num().degree_in(v.index) != 1) return std::nullopt;
    auto coeffs = constraint.num().coefficients_in(v.index);
    if (coeffs[1].contains(v.index)) return std::nullopt;
    return std::make_pair(v, Expr(constraint.table(), -coeffs[0], coeffs[1]));
}

/// Solve constraints one by one for a not-yet-eliminated variable,
/// reducing each constraint by the bindings found so far.  Momenta are
/// preferred; coordinates are used only when `momenta_only` is false.
inline std::vector<std::pair<Symbol, Expr>> solve_constraints(
    const std::vector<Constraint>& constraints, const PhaseSpace& ps,
    bool momenta_only, const char* context) {
    std::vector<std::pair<Symbol, Expr>> bindings;
    std::vector<Symbol> preference;
    for (std::size_t i = 0; i < ps.size(); ++i) preference.push_back(ps.momentum(i));
    if (!momenta_only)
        for (std::size_t i = 0; i < ps.size(); ++i)
            preference.push_back(ps.coordinate(i));

    for (const Constraint& c : constraints) {
        Expr reduced = apply_bindings(c.expr, bindings);
        if (reduced.is_zero()) continue;  // implied by earlier constraints
        bool solved = false;
        for (Symbol v : preference) {
            bool taken = false;
            for (auto& [s, r] : bindings) taken = taken || s == v;
            if (taken) continue;
            if (auto sol = solve_affine_for(reduced, v)) {
                bindings.push_back(*sol);
                solved = true;
                break;
            }
        }
        if (!solved)
            throw ConstraintError(std::string(context) +
                                  ": constraint cannot be solved affinely for an "
                                  "independent variable (" + to_string(reduced) + ")");
    }
    return bindings;
}

}  // namespace detail

/// Dirac consistency iteration.  The total Hamiltonian attaches
/// multipliers to the primary constraints, so
///     phi_a' = {phi_a, H} + lambda_b {phi_a, phi_b} ~ 0.
/// Rows with a nonzero bracket against some primary determine their
/// multiplier and stop.  Rows whose brackets all vanish push
/// {phi_a, H}, restricted to the constraint surface, into the next
/// generation when it does not already vanish there.
inline std::vector<Constraint> consistency_chain(const HamiltonianModel& h,
                                                 const std::vector<Constraint>& primaries,
                                                 const PhaseSpace& ps,
                                                 int max_generation = 5) {
    if (max_generation < 2)
        throw ConstraintError("max_generation must be at least 2");
    if (primaries.empty()) return {};

    std::vector<Constraint> chain = primaries;
    for (auto& c : chain) c.generation = 1;

    int generation = 1;
    while (true) {
        auto surface =
            detail::solve_constraints(chain, ps, /*momenta_only=*/false, "surface");
        std::vector<Constraint> fresh;
        for (const Constraint& ca : chain) {
            bool row_zero = true;
            for (const Constraint& cb : primaries) {
                Expr br = detail::apply_bindings(
                    poisson_bracket(ca.expr, cb.expr, ps), surface);
                if (!br.is_zero()) {
                    row_zero = false;
                    break;
                }
            }
            if (!row_zero) continue;
            Expr hdot = detail::apply_bindings(poisson_bracket(ca.expr, h.expr, ps),
                                               surface);
            if (hdot.is_zero()) continue;
            bool duplicate = false;
            for (const Constraint& f : fresh)
                duplicate = duplicate || f.expr == hdot || f.expr == -hdot;
            if (!duplicate)
                fresh.push_back(Constraint{hdot, generation + 1,
                                           ConstraintClass::undetermined});
        }
        if (fresh.empty()) return chain;
        ++generation;
        if (generation > max_generation)
            throw ConstraintError("consistency chain did not stabilize within " +
                                  std::to_string(max_generation) + " generations");
        chain.insert(chain.end(), fresh.begin(), fresh.end());
    }
}

/// Bracket matrix of a constraint list.  Entries involving generation g
/// are evaluated on the surface of the generations below g.
inline ConstraintMatrix build_constraint_matrix(const std::vector<Constraint>& constraints,
                                                const PhaseSpace& ps,
                                                const SymbolTablePtr& table) {
    std::size_t n = constraints.size();
    ConstraintMatrix cm{make_matrix(n, n, table), Expr::one(table), true,
                        std::nullopt};
    if (n == 0) {
        cm.inverse = ExprMatrix{};
        return cm;
    }

    int max_gen = 1;
    for (auto& c : constraints) max_gen = std::max(max_gen, c.generation);
    std::vector<std::vector<std::pair<Symbol, Expr>>> surface_below(
        static_cast<std::size_t>(max_gen) + 1);
    for (int g = 2; g <= max_gen; ++g) {
        std::vector<Constraint> lower;
        for (auto& c : constraints)
            if (c.generation < g) lower.push_back(c);
        surface_below[static_cast<std::size_t>(g)] =
            detail::solve_constraints(lower, ps, false, "surface");
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Expr br = poisson_bracket(constraints[i].expr, constraints[j].expr, ps);
            int g = std::max(constraints[i].generation, constraints[j].generation);
            if (g >= 2)
                br = detail::apply_bindings(br, surface_below[static_cast<std::size_t>(g)]);
            cm.entries[i][j] = br;
        }

    cm.determinant = determinant(cm.entries);
    cm.invertible = !cm.determinant.is_zero();
    if (cm.invertible) cm.inverse = matrix_inverse(cm.entries);
    return cm;
}

/// Dirac bracket {f, g}_D = {f, g} - {f, phi_a} (C^-1)_ab {phi_b, g}.
/// With no constraints this is exactly the Poisson bracket.
inline Expr dirac_bracket(const Expr& f, const Expr& g, const ConstraintMatrix& cm,
                          const std::vector<Constraint>& constraints,
                          const PhaseSpace& ps) {
    if (!cm.invertible)
        throw NonInvertibleMatrixError(
            "constraint matrix is not invertible; Dirac brackets cannot be defined");
    Expr acc = poisson_bracket(f, g, ps);
    std::size_t n = constraints.size();
    for (std::size_t a = 0; a < n; ++a) {
        Expr fa = poisson_bracket(f, constraints[a].expr, ps);
        if (fa.is_zero()) continue;
        for (std::size_t b = 0; b < n; ++b) {
            Expr bg = poisson_bracket(constraints[b].expr, g, ps);
            if (bg.is_zero()) continue;
            acc = acc - fa * (*cm.inverse)[a][b] * bg;
        }
    }
    return acc;
}

/// Run the full constraint algorithm: generate the chain, build the
/// primary bracket matrix that defines the Dirac structure, classify
/// the constraints against the full-chain matrix, and either produce
/// the Dirac table or report that quantization is blocked.
inline ConstraintAnalysis analyze_constraints(const HamiltonianModel& h,
                                              const std::vector<Constraint>& primaries,
                                              const PhaseSpace& ps,
                                              int max_generation = 5) {
    const SymbolTablePtr& t = h.table;
    ConstraintAnalysis out{
        {}, ConstraintMatrix{{}, Expr::one(t), true, ExprMatrix{}},
        ConstraintMatrix{{}, Expr::one(t), true, ExprMatrix{}},
        AnalysisOutcome::reducible, std::nullopt, primaries.size()};
    out.constraints = consistency_chain(h, primaries, ps, max_generation);

    std::vector<Constraint> prim(out.constraints.begin(),
                                 out.constraints.begin() +
                                     static_cast<std::ptrdiff_t>(primaries.size()));
    out.matrix = build_constraint_matrix(prim, ps, t);
    out.full_matrix = build_constraint_matrix(out.constraints, ps, t);

    for (std::size_t i = 0; i < out.constraints.size(); ++i) {
        bool row_zero = true;
        for (std::size_t j = 0; j < out.constraints.size(); ++j)
            row_zero = row_zero && out.full_matrix.entries[i][j].is_zero();
        out.constraints[i].cls =
            row_zero ? ConstraintClass::first_class : ConstraintClass::second_class;
    }

    if (!out.matrix.invertible || out.constraints.size() != primaries.size()) {
        out.outcome = AnalysisOutcome::quantization_blocked;
        return out;
    }

    out.outcome = AnalysisOutcome::reducible;
    std::vector<Symbol> vars;
    for (std::size_t i = 0; i < ps.size(); ++i) vars.push_back(ps.coordinate(i));
    for (std::size_t i = 0; i < ps.size(); ++i) vars.push_back(ps.momentum(i));
    std::vector<DiracTableEntry> table;
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            table.push_back(DiracTableEntry{
                t->name(vars[i]), t->name(vars[j]),
                dirac_bracket(Expr::symbol(t, vars[i]), Expr::symbol(t, vars[j]),
                              out.matrix, prim, ps)});
    out.dirac_table = std::move(table);
    return out;
}

/// Eliminate the dependent variables of a reducible analysis and build
/// the surviving canonical pair, scaled so its Dirac bracket is exactly
/// one.  The default (and only) choice keeps the coordinates
/// independent and solves the constraints for the momenta.
inline ReducedCanonicalSystem reduce(const ConstraintAnalysis& analysis,
                                     const HamiltonianModel& h,
                                     ReductionChoice choice =
                                         ReductionChoice::coordinates_independent) {
    (void)choice;
    if (analysis.outcome != AnalysisOutcome::reducible)
        throw QuantizationBlockedError(
            "constraint matrix has no inverse; Dirac brackets cannot be defined and "
            "no quantum dynamics can be established");
    const SymbolTablePtr& t = h.table;
    const PhaseSpace& ps = h.ps;

    auto elimination = detail::solve_constraints(analysis.constraints, ps,
                                                 /*momenta_only=*/true, "reduce");
    if (elimination.size() != analysis.constraints.size())
        throw ConstraintError("reduce: constraints are not independent");
    // express every eliminated momentum purely in the independents
    for (auto& [sym, value] : elimination) {
        for (auto& [other, other_value] : elimination)
            if (!(other == sym) && value.uses(other))
                value = substitute(value, other, other_value);
        for (std::uint32_t v : value.used_symbol_indices())
            if (t->kind(Symbol{v}) == SymbolKind::momentum)
                throw ConstraintError("reduce: circular momentum elimination");
    }

    if (ps.size() != 2 || elimination.size() != 2)
        throw ConstraintError(
            "reduce: only the planar case with both momenta eliminated is supported");

    Symbol y1 = ps.coordinate(0), y2 = ps.coordinate(1);
    Expr d = dirac_bracket(Expr::symbol(t, y1), Expr::symbol(t, y2), analysis.matrix,
                           analysis.constraints, ps);
    if (d.is_zero() || !d.is_parameter_only())
        throw ConstraintError(
            "reduce: Dirac bracket of the surviving coordinates is not a nonzero "
            "parameter expression (" + to_string(d) + ")");

    // {y1, y2/d}_D = 1 holds for either orientation; prefer the one whose
    // momentum scaling 1/d is positive under the declared positivity, so
    // the pair reads p = (positive parameter monomial) * coordinate.
    if (!is_positive_under_assumptions(Expr::one(t) / d)) {
        std::swap(y1, y2);
        d = -d;
    }

    Symbol xs = t->register_coordinate(t->fresh_name("x"));
    Symbol pn = t->register_momentum(t->fresh_name("p"));

    CanonicalPair pair{xs, pn, Expr::symbol(t, y1), Expr::symbol(t, y2) / d};
    Expr unit = dirac_bracket(pair.position_def, pair.momentum_def, analysis.matrix,
                              analysis.constraints, ps);
    if (!unit.is_one())
        throw ConstraintError("reduce: canonical pair scaling failed");

    std::vector<std::pair<Symbol, Expr>> rewrite = {
        {y1, Expr::symbol(t, xs)},
        {y2, d * Expr::symbol(t, pn)}};

    Expr reduced_h = substitute(detail::apply_bindings(h.expr, elimination), rewrite);
    return ReducedCanonicalSystem{{pair}, elimination, rewrite, reduced_h};
}

/// Convenience used by observables: apply the elimination map and then
/// rewrite the survivors in the canonical pair.
inline Expr express_in_pair(const Expr& f, const ReducedCanonicalSystem& sys) {
    return substitute(detail::apply_bindings(f, sys.elimination_map),
                      sys.pair_rewrite);
}

}  // namespace fluxtrap
