#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fluxtrap/dirac.hpp"
#include "fluxtrap/gauge.hpp"
#include "fluxtrap/mechanics.hpp"
#include "fluxtrap/numeric/radial.hpp"
#include "fluxtrap/numeric/trajectory.hpp"
#include "fluxtrap/parser.hpp"
#include "fluxtrap/quantize.hpp"
#include "fluxtrap/scenario.hpp"

namespace fluxtrap {

using ordered_json = nlohmann::ordered_json;

struct RunOptions {
    int n_max = 3;              // oscillator/landau levels to tabulate
    bool with_numeric = true;   // run the numeric section when present
    int max_generation = 5;
};

/// Full pipeline output: the JSON document plus key-addressable values
/// for golden verification.
struct Report {
    std::string scenario_name;
    ordered_json json;
    std::map<std::string, Expr> symbolic_values;
    std::map<std::string, std::string> string_values;
    SymbolTablePtr table;
    std::vector<Alias> aliases;
};

struct GoldenCheck {
    std::string key;
    bool is_claim = false;
    bool passed = false;
    bool missing = false;
    std::string computed;
    std::string expected;
};

namespace detail {

/// Symbols, phase space and parsed expressions of a scenario.
struct Workspace {
    SymbolTablePtr table;
    PhaseSpace ps;
    std::vector<Alias> aliases;
    Expr lagrangian;
    Expr kinetic_level;
    Expr angular_momentum;
    std::optional<Symbol> flux_parameter;
    std::optional<Expr> charge_over_c;
};

inline Workspace build_workspace(const Scenario& sc) {
    auto table = std::make_shared<SymbolTable>();
    std::vector<std::pair<Symbol, Symbol>> pairs;
    for (auto& [coord, vel, mom] : sc.pairs) {
        Symbol c = table->register_coordinate(coord);
        table->register_velocity(vel, c);
        Symbol p = table->register_momentum(mom);
        pairs.push_back({c, p});
    }
    for (auto& [name, positive] : sc.params)
        table->register_parameter(name, positive);
    for (auto& [name, definition] : sc.aliases)
        table->register_parameter(name, true);

    std::vector<Alias> aliases;
    for (auto& [name, definition] : sc.aliases)
        aliases.push_back(Alias{table->require(name), parse(definition, table)});

    PhaseSpace ps(*table, pairs);
    Expr lagrangian = parse(sc.lagrangian_text, table);
    Expr level = parse(sc.kinetic_level_text, table);

    if (ps.size() != 2)
        throw Error("the analysis pipeline handles planar (two-pair) scenarios");
    Expr j = Expr::symbol(table, ps.coordinate(0)) * Expr::symbol(table, ps.momentum(1)) -
             Expr::symbol(table, ps.coordinate(1)) * Expr::symbol(table, ps.momentum(0));

    Workspace w{table, ps, std::move(aliases), lagrangian, level, j,
                std::nullopt, std::nullopt};
    if (!sc.flux_parameter.empty())
        w.flux_parameter = table->require(sc.flux_parameter);
    if (!sc.charge_over_c_text.empty())
        w.charge_over_c = parse(sc.charge_over_c_text, table);
    return w;
}

inline void record(Report& r, ordered_json& stage, const std::string& key,
                   const Expr& value) {
    stage[key] = to_string(value);
    r.symbolic_values.emplace(key, value);
}

inline void record_str(Report& r, ordered_json& stage, const std::string& key,
                       const std::string& value) {
    stage[key] = value;
    r.string_values[key] = value;
}

/// Numeric evaluation of a symbolic value at the scenario's parameter
/// bindings, when every symbol is bound.
inline void annotate_numeric(const Scenario& sc, const Report& r,
                             ordered_json& stage, const std::string& key,
                             const Expr& value) {
    if (sc.numeric_params.empty()) return;
    try {
        stage[key + "_value"] = eval_double(expand_aliases(value, r.aliases),
                                            sc.numeric_params);
    } catch (const Error&) {
        // unbound symbol: skip the annotation
    }
}

}  // namespace detail

/// Serialize a constraint analysis (constraints, matrices, determinant,
/// outcome, Dirac table) into a JSON block.
inline ordered_json to_json(const ConstraintAnalysis& analysis,
                            const SymbolTablePtr& table) {
    ordered_json j;
    ordered_json constraints = ordered_json::array();
    for (auto& c : analysis.constraints) {
        ordered_json entry;
        entry["expr"] = to_string(c.expr);
        entry["generation"] = c.generation;
        entry["class"] = to_string(c.cls);
        constraints.push_back(entry);
    }
    j["constraints"] = constraints;
    ordered_json matrix = ordered_json::array();
    for (auto& row : analysis.matrix.entries) {
        ordered_json jrow = ordered_json::array();
        for (auto& e : row) jrow.push_back(to_string(e));
        matrix.push_back(jrow);
    }
    j["matrix"] = matrix;
    j["determinant"] = to_string(analysis.matrix.determinant);
    j["invertible"] = analysis.matrix.invertible;
    if (analysis.matrix.inverse) {
        ordered_json inv = ordered_json::array();
        for (auto& row : *analysis.matrix.inverse) {
            ordered_json jrow = ordered_json::array();
            for (auto& e : row) jrow.push_back(to_string(e));
            inv.push_back(jrow);
        }
        j["inverse"] = inv;
    }
    ordered_json full = ordered_json::array();
    for (auto& row : analysis.full_matrix.entries) {
        ordered_json jrow = ordered_json::array();
        for (auto& e : row) jrow.push_back(to_string(e));
        full.push_back(jrow);
    }
    j["full_chain_matrix"] = full;
    j["outcome"] = to_string(analysis.outcome);
    if (analysis.dirac_table) {
        ordered_json dt = ordered_json::array();
        for (auto& e : *analysis.dirac_table) {
            ordered_json entry;
            entry["lhs"] = e.lhs;
            entry["rhs"] = e.rhs;
            entry["value"] = to_string(e.value);
            dt.push_back(entry);
        }
        j["dirac_table"] = dt;
    }
    (void)table;
    return j;
}

/// Execute the symbolic pipeline (and the gauge and numeric stages when
/// configured).  Stage errors are embedded in the report; independent
/// later stages still run.  A blocked quantization is a result, not an
/// error: the constraint chain and matrix are still reported.
inline Report run_scenario(const Scenario& sc, const RunOptions& options = {}) {
    auto w = detail::build_workspace(sc);
    Report report{sc.name, ordered_json{}, {}, {}, w.table, w.aliases};
    report.json["schema_version"] = 1;
    report.json["scenario"] = sc.name;

    // --- decomposition -----------------------------------------------------
    ordered_json stage;
    auto model = decompose_lagrangian(w.lagrangian, w.ps);
    {
        ordered_json mass = ordered_json::array();
        for (auto& row : model.mass_matrix) {
            ordered_json jrow = ordered_json::array();
            for (auto& e : row) jrow.push_back(to_string(e));
            mass.push_back(jrow);
        }
        stage["mass_matrix"] = mass;
        detail::record(report, stage, "velocity_coeff_1", model.velocity_coeffs[0]);
        detail::record(report, stage, "velocity_coeff_2", model.velocity_coeffs[1]);
        detail::record(report, stage, "potential", model.potential);
        detail::record(report, stage, "lagrangian_constant", model.constant);
        report.json["decomposition"] = stage;
    }

    // --- Legendre transform of the full Lagrangian --------------------------
    auto full = legendre(model);
    {
        stage = ordered_json{};
        stage["hessian_rank"] = full.hessian_rank;
        detail::record(report, stage, "hamiltonian", full.hamiltonian.expr);
        if (full.hamiltonian.kinetic) {
            detail::record(report, stage, "kinetic_momentum_1",
                           full.hamiltonian.kinetic->momenta[0]);
            detail::record(report, stage, "kinetic_momentum_2",
                           full.hamiltonian.kinetic->momenta[1]);
        }
        report.json["legendre"] = stage;
    }

    // --- mechanical momenta and their brackets ------------------------------
    std::optional<MechanicalMomenta> momenta;
    {
        stage = ordered_json{};
        if (full.hamiltonian.kinetic) {
            momenta = mechanical_momenta(full.hamiltonian);
            ordered_json brackets = ordered_json::array();
            for (std::size_t i = 0; i < 2; ++i) {
                ordered_json row = ordered_json::array();
                for (std::size_t j = 0; j < 2; ++j)
                    row.push_back(to_string(momenta->bracket_matrix[i][j]));
                brackets.push_back(row);
            }
            stage["bracket_matrix"] = brackets;
            detail::record(report, stage, "mech_bracket_12",
                           momenta->bracket_matrix[0][1]);
            Symbol hb = w.table->require("hbar");
            stage["quantum_commutator_12"] =
                "i*" + to_string(Expr::symbol(w.table, hb) *
                                 momenta->bracket_matrix[0][1]);
        } else {
            detail::record_str(report, stage, "skipped",
                               "no designated kinetic part");
        }
        report.json["mechanical_momenta"] = stage;
    }

    // --- kinetic-energy spectrum --------------------------------------------
    {
        stage = ordered_json{};
        if (momenta) {
            try {
                Symbol hb = w.table->require("hbar");
                auto spectrum = landau_levels(*momenta, options.n_max, hb);
                detail::record_str(report, stage, "kinetic_spectrum_kind",
                                   to_string(spectrum.kind));
                ordered_json levels = ordered_json::array();
                for (std::size_t n = 0; n < spectrum.levels.size(); ++n) {
                    detail::record(report, stage,
                                   "kinetic_level_" + std::to_string(n),
                                   *spectrum.levels[n].energy);
                    levels.push_back(to_string(*spectrum.levels[n].energy));
                }
                stage["levels"] = levels;
            } catch (const CommutingMomentaError& e) {
                detail::record_str(report, stage, "kinetic_spectrum_kind",
                                   "continuous");
                stage["reason"] = e.what();
            }
        } else {
            detail::record_str(report, stage, "skipped",
                               "no designated kinetic part");
        }
        report.json["kinetic_spectrum"] = stage;
    }

    // --- kinetic-energy limit ------------------------------------------------
    auto [h0, l0] = kinetic_limit_reduce(full.hamiltonian, model, w.kinetic_level);
    {
        stage = ordered_json{};
        detail::record(report, stage, "limit_hamiltonian", h0.expr);
        detail::record(report, stage, "limit_lagrangian", l0.reconstruct());
        report.json["kinetic_limit"] = stage;
    }

    // --- constraint analysis --------------------------------------------------
    auto reduced_legendre = legendre(l0);
    auto analysis = analyze_constraints(h0, reduced_legendre.primaries, w.ps,
                                        options.max_generation);
    {
        stage = to_json(analysis, w.table);
        std::size_t n_prim = analysis.n_primaries;
        for (std::size_t i = 0; i < n_prim; ++i)
            detail::record(report, stage, "primary_constraint_" + std::to_string(i + 1),
                           analysis.constraints[i].expr);
        for (std::size_t i = n_prim; i < analysis.constraints.size(); ++i)
            detail::record(report, stage,
                           "secondary_constraint_" + std::to_string(i - n_prim + 1),
                           analysis.constraints[i].expr);
        for (std::size_t i = 0; i < n_prim; ++i)
            for (std::size_t j = 0; j < n_prim; ++j)
                detail::record(report, stage,
                               "constraint_matrix_" + std::to_string(i + 1) +
                                   std::to_string(j + 1),
                               analysis.matrix.entries[i][j]);
        if (analysis.matrix.inverse)
            detail::record(report, stage, "constraint_inverse_12",
                           (*analysis.matrix.inverse)[0][1]);
        for (std::size_t i = n_prim; i < analysis.constraints.size(); ++i)
            for (std::size_t j = 0; j < n_prim; ++j)
                detail::record(report, stage,
                               "secondary_primary_bracket_" +
                                   std::to_string(i - n_prim + 1) +
                                   std::to_string(j + 1),
                               analysis.full_matrix.entries[i][j]);
        for (std::size_t i = n_prim; i < analysis.constraints.size(); ++i)
            for (std::size_t j = i + 1; j < analysis.constraints.size(); ++j)
                detail::record(report, stage,
                               "secondary_secondary_bracket_" +
                                   std::to_string(i - n_prim + 1) +
                                   std::to_string(j - n_prim + 1),
                               analysis.full_matrix.entries[i][j]);
        if (analysis.dirac_table)
            for (auto& e : *analysis.dirac_table)
                report.symbolic_values.emplace("dirac_" + e.lhs + "_" + e.rhs,
                                               e.value);
        detail::record_str(report, stage, "outcome", to_string(analysis.outcome));
        report.json["constraints"] = stage;
    }

    // --- reduction and quantization -------------------------------------------
    std::optional<ReducedCanonicalSystem> sys;
    std::optional<OscillatorForm> osc;
    if (analysis.outcome == AnalysisOutcome::reducible) {
        sys = reduce(analysis, h0);
        stage = ordered_json{};
        auto& pair = sys->independent_pairs[0];
        stage["position_symbol"] = w.table->name(pair.position);
        stage["momentum_symbol"] = w.table->name(pair.momentum);
        detail::record(report, stage, "canonical_position", pair.position_def);
        detail::record(report, stage, "canonical_momentum", pair.momentum_def);
        for (auto& [sym, expr] : sys->elimination_map)
            detail::record(report, stage, "elimination_" + w.table->name(sym), expr);
        detail::record(report, stage, "reduced_hamiltonian",
                       sys->reduced_hamiltonian);
        report.json["reduced"] = stage;

        stage = ordered_json{};
        osc = recognize_oscillator(*sys);
        detail::record(report, stage, "effective_mass", osc->effective_mass);
        detail::record(report, stage, "effective_frequency",
                       osc->effective_frequency);
        detail::record(report, stage, "zero_point_energy", osc->zero_point_offset);
        report.json["oscillator"] = stage;

        stage = ordered_json{};
        Symbol hb = w.table->require("hbar");
        auto spectrum = oscillator_spectrum(*osc, options.n_max, hb);
        ordered_json levels = ordered_json::array();
        for (std::size_t n = 0; n < spectrum.levels.size(); ++n) {
            detail::record(report, stage, "energy_level_" + std::to_string(n),
                           *spectrum.levels[n].energy);
            detail::annotate_numeric(sc, report, stage,
                                     "energy_level_" + std::to_string(n),
                                     *spectrum.levels[n].energy);
            levels.push_back(to_string(*spectrum.levels[n].energy));
        }
        stage["levels"] = levels;
        report.json["spectrum"] = stage;

        stage = ordered_json{};
        Expr j_coords = detail::apply_bindings(w.angular_momentum,
                                               sys->elimination_map);
        detail::record(report, stage, "angular_momentum_coordinates", j_coords);
        auto jr = angular_momentum_reduce(w.angular_momentum, *sys, *osc, hb);
        detail::record(report, stage, "fractional_offset", jr.fractional_offset);
        detail::record(report, stage, "ladder_coefficient", jr.ladder_coefficient);
        detail::record(report, stage, "number_offset", jr.number_offset);
        detail::record(report, stage, "zero_point_angular_momentum", jr.zero_point);
        // present the induced offset in total-flux form when the scenario
        // defines the flux alias and the equality holds exactly
        if (w.table->find("Phi_0") && w.table->find("q") && w.table->find("c") &&
            w.table->find("pi")) {
            Expr flux_form = expand_aliases(parse("q*Phi_0/(2*pi*c)", w.table),
                                            w.aliases);
            if (expand_aliases(jr.fractional_offset, w.aliases) == flux_form)
                stage["fractional_offset_flux_form"] = "q*Phi_0/(2*pi*c)";
        }
        detail::annotate_numeric(sc, report, stage, "fractional_offset",
                                 jr.fractional_offset);
        detail::annotate_numeric(sc, report, stage, "zero_point_angular_momentum",
                                 jr.zero_point);
        report.json["angular_momentum"] = stage;
    } else {
        const char* reason = "quantization_blocked: the primary constraint "
                             "matrix has no inverse, so Dirac brackets cannot "
                             "be defined";
        for (const char* name : {"reduced", "oscillator", "spectrum",
                                 "angular_momentum"}) {
            stage = ordered_json{};
            stage["skipped"] = reason;
            report.json[name] = stage;
        }
    }

    // --- gauge check -----------------------------------------------------------
    if (sc.gauge) {
        stage = ordered_json{};
        try {
            if (!w.charge_over_c)
                throw ModelError("gauge section needs charge_over_c");
            std::vector<Expr> a_pot = {parse(sc.gauge->potential_1, w.table),
                                       parse(sc.gauge->potential_2, w.table)};
            for (auto& e : a_pot) e = expand_aliases(e, w.aliases);
            std::vector<Expr> grad = {parse(sc.gauge->gradient_1, w.table),
                                      parse(sc.gauge->gradient_2, w.table)};
            for (auto& e : grad) e = expand_aliases(e, w.aliases);
            Expr winding = expand_aliases(parse(sc.gauge->winding, w.table),
                                          w.aliases);
            auto g = make_gauge_function(grad, winding, w.ps.coordinate(0),
                                         w.ps.coordinate(1));
            auto transformed = transform_potential(a_pot, g);
            detail::record(report, stage, "transformed_potential_1", transformed[0]);
            detail::record(report, stage, "transformed_potential_2", transformed[1]);

            Expr qc = expand_aliases(*w.charge_over_c, w.aliases);
            auto hp = transform_hamiltonian(full.hamiltonian, g, qc);
            detail::record(report, stage, "transformed_hamiltonian", hp.expr);
            bool h_match = false;
            if (w.flux_parameter) {
                Expr no_flux = substitute(full.hamiltonian.expr, *w.flux_parameter,
                                          Expr::zero(w.table));
                h_match = (hp.expr == no_flux);
            }
            detail::record_str(report, stage, "gauge_hamiltonian_matches",
                               h_match ? "true" : "false");

            auto model_p = inverse_legendre(hp);
            auto [h0p, l0p] = kinetic_limit_reduce(hp, model_p, w.kinetic_level);
            auto analysis_p = analyze_constraints(h0p, legendre(l0p).primaries,
                                                  w.ps, options.max_generation);
            Expr jp = transform_observable_and_reduce(w.angular_momentum, g,
                                                      analysis_p, w.ps, qc);
            detail::record(report, stage, "gauge_jz", jp);

            bool j_match = false;
            if (report.symbolic_values.count("angular_momentum_coordinates"))
                j_match = (jp == report.symbolic_values.at(
                                     "angular_momentum_coordinates"));
            detail::record_str(report, stage, "gauge_matches_direct",
                               j_match ? "true" : "false");
            stage["winding_constant"] = to_string(g.winding_constant);
            stage["single_valuedness_note"] =
                "the phase factor built from the multivalued gauge function is "
                "not single-valued; recorded as metadata, not adjudicated";
        } catch (const Error& e) {
            stage["error"] = e.what();
        }
        report.json["gauge"] = stage;
    } else {
        stage = ordered_json{};
        stage["skipped"] = "no gauge section in the scenario";
        report.json["gauge"] = stage;
    }

    // --- numeric cross-checks ----------------------------------------------------
    if (options.with_numeric && !sc.numeric.empty()) {
        stage = ordered_json{};
        try {
            auto get = [&](const char* key, double fallback) {
                auto it = sc.numeric.find(key);
                return it == sc.numeric.end() ? fallback : it->second;
            };
            numeric::NumericScenario ns{get("alpha", 0.0), get("omega_c", 1.0),
                                        get("omega_p", 0.5)};
            numeric::RadialGrid grid{get("r_max", 14.0),
                                     static_cast<int>(get("n_points", 2000)), 0.0,
                                     1e-4};
            int m = static_cast<int>(get("m", 0));
            int k_levels = static_cast<int>(get("k_levels", 3));
            auto radial = numeric::radial_spectrum(ns, m, grid, k_levels);
            ordered_json levels = ordered_json::array();
            ordered_json closed = ordered_json::array();
            for (int k = 0; k < k_levels; ++k) {
                levels.push_back(radial.energies[k]);
                closed.push_back(numeric::fock_darwin_level(k, m, ns));
            }
            stage["radial_levels"] = levels;
            stage["closed_form_levels"] = closed;
            stage["grid_warning"] = radial.grid_warning;
            stage["richardson_delta"] = radial.richardson_delta;
            stage["grid"] = {{"r_max", grid.r_max},
                             {"n_points", grid.n_points},
                             {"m", m},
                             {"alpha", ns.alpha}};

            double dt = get("dt", 0.002);
            double periods = get("periods", 200.0);
            double period = 2.0 * M_PI / std::max(ns.omega_c, ns.omega_p);
            auto steps = static_cast<std::int64_t>(periods * period / dt);
            numeric::TrajectoryState init{1.0, 0.0, 0.1, 0.8, 0.0};
            auto traj = numeric::integrate_trajectory(ns, init, dt, steps);
            stage["trajectory"] = {{"dt", dt},
                                   {"periods", periods},
                                   {"energy_drift", traj.energy_drift},
                                   {"jz_drift", traj.jz_drift},
                                   {"speed_drift", traj.speed_drift}};
        } catch (const Error& e) {
            stage["error"] = e.what();
        }
        report.json["numeric"] = stage;
    } else {
        stage = ordered_json{};
        stage["skipped"] = sc.numeric.empty() ? "no numeric section"
                                              : "numeric stage disabled";
        report.json["numeric"] = stage;
    }

    return report;
}

/// Exact golden verification.  `expect` entries must match; `claim`
/// entries are recorded reference values whose disagreement is flagged
/// as a discrepancy without failing.
inline std::vector<GoldenCheck> verify_goldens(Report& report, const Scenario& sc) {
    std::vector<GoldenCheck> checks;
    for (const GoldenEntry& g : sc.goldens) {
        GoldenCheck check;
        check.key = g.key;
        check.is_claim = g.kind == GoldenEntry::Kind::claim_expr;
        if (g.kind == GoldenEntry::Kind::expect_str) {
            auto it = report.string_values.find(g.key);
            if (it == report.string_values.end()) {
                check.missing = true;
                check.expected = g.value_text;
            } else {
                check.computed = it->second;
                check.expected = g.value_text;
                check.passed = it->second == g.value_text;
            }
        } else {
            auto it = report.symbolic_values.find(g.key);
            if (it == report.symbolic_values.end()) {
                check.missing = true;
                check.expected = g.value_text;
            } else {
                Expr expected = expand_aliases(parse(g.value_text, report.table),
                                               report.aliases);
                Expr computed = expand_aliases(it->second, report.aliases);
                check.computed = to_string(it->second);
                check.expected = g.value_text;
                check.passed = computed == expected;
            }
        }
        checks.push_back(check);
    }

    ordered_json golden_json = ordered_json::array();
    ordered_json discrepancies = ordered_json::array();
    for (auto& c : checks) {
        ordered_json entry;
        entry["key"] = c.key;
        entry["kind"] = c.is_claim ? "claim" : "expect";
        entry["computed"] = c.missing ? "<missing>" : c.computed;
        entry["reference"] = c.expected;
        entry["agrees"] = c.passed;
        golden_json.push_back(entry);
        if (c.is_claim && !c.passed) {
            ordered_json d;
            d["key"] = c.key;
            d["computed"] = c.missing ? "<missing>" : c.computed;
            d["recorded_claim"] = c.expected;
            d["note"] = "engine-computed value disagrees with the recorded "
                        "reference value; both are reported verbatim";
            discrepancies.push_back(d);
        }
    }
    report.json["goldens"] = golden_json;
    report.json["claim_discrepancies"] = discrepancies;
    return checks;
}

}  // namespace fluxtrap
