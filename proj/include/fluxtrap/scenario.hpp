#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fluxtrap/errors.hpp"

namespace fluxtrap {

// Declarative scenario file (see docs/scenario-format.md):
//
//   scenario <name>
//   pair <coordinate> <velocity> <momentum>
//   param <name> [positive]
//   alias <name> = <expression>
//   lagrangian = <expression>
//   kinetic_level = <expression>
//   flux_parameter = <parameter>
//   charge_over_c = <expression>
//   gauge_potential = <expr> ; <expr>
//   gauge_gradient = <expr> ; <expr>
//   gauge_winding = <expr>
//   numeric <key> = <number>
//   numeric param <symbol> = <number>
//   expect <key> = <expression>      exact golden, must match
//   expect_str <key> = <string>      string golden, must match
//   claim <key> = <expression>       recorded reference value; a mismatch
//                                    is flagged as a discrepancy, not a failure
//
// '#' starts a comment; blank lines are ignored.

struct GoldenEntry {
    enum class Kind { expect_expr, expect_str, claim_expr };
    Kind kind;
    std::string key;
    std::string value_text;
};

struct GaugeSection {
    std::string potential_1, potential_2;
    std::string gradient_1, gradient_2;
    std::string winding;
};

struct Scenario {
    std::string name;
    std::vector<std::array<std::string, 3>> pairs;  // coordinate, velocity, momentum
    std::vector<std::pair<std::string, bool>> params;
    std::vector<std::pair<std::string, std::string>> aliases;
    std::string lagrangian_text;
    std::string kinetic_level_text;
    std::string flux_parameter;
    std::string charge_over_c_text;
    std::optional<GaugeSection> gauge;
    std::map<std::string, double> numeric;
    std::map<std::string, double> numeric_params;
    std::vector<GoldenEntry> goldens;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

inline Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw Error("scenario line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line = line.substr(0, pos);
        line = detail::trim(line);
        if (line.empty()) continue;

        auto eq = line.find('=');
        std::string head = detail::trim(eq == std::string::npos ? line
                                                                : line.substr(0, eq));
        std::string value = eq == std::string::npos
                                ? std::string{}
                                : detail::trim(line.substr(eq + 1));
        auto words = detail::split_ws(head);
        if (words.empty()) continue;
        const std::string& directive = words[0];

        if (directive == "scenario") {
            if (words.size() != 2) fail("expected: scenario <name>");
            sc.name = words[1];
        } else if (directive == "pair") {
            if (words.size() != 4) fail("expected: pair <coord> <velocity> <momentum>");
            sc.pairs.push_back({words[1], words[2], words[3]});
        } else if (directive == "param") {
            if (words.size() < 2 || words.size() > 3 ||
                (words.size() == 3 && words[2] != "positive"))
                fail("expected: param <name> [positive]");
            sc.params.push_back({words[1], words.size() == 3});
        } else if (directive == "alias") {
            if (words.size() != 2 || value.empty())
                fail("expected: alias <name> = <expression>");
            sc.aliases.push_back({words[1], value});
        } else if (directive == "lagrangian") {
            sc.lagrangian_text = value;
        } else if (directive == "kinetic_level") {
            sc.kinetic_level_text = value;
        } else if (directive == "flux_parameter") {
            sc.flux_parameter = value;
        } else if (directive == "charge_over_c") {
            sc.charge_over_c_text = value;
        } else if (directive == "gauge_potential" || directive == "gauge_gradient") {
            auto semi = value.find(';');
            if (semi == std::string::npos) fail("expected two components joined by ';'");
            if (!sc.gauge) sc.gauge = GaugeSection{};
            std::string first = detail::trim(value.substr(0, semi));
            std::string second = detail::trim(value.substr(semi + 1));
            if (directive == "gauge_potential") {
                sc.gauge->potential_1 = first;
                sc.gauge->potential_2 = second;
            } else {
                sc.gauge->gradient_1 = first;
                sc.gauge->gradient_2 = second;
            }
        } else if (directive == "gauge_winding") {
            if (!sc.gauge) sc.gauge = GaugeSection{};
            sc.gauge->winding = value;
        } else if (directive == "numeric") {
            double parsed = 0.0;
            try {
                std::size_t used = 0;
                parsed = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                fail("'" + value + "' is not a number");
            }
            if (words.size() == 3 && words[1] == "param") {
                sc.numeric_params[words[2]] = parsed;
            } else if (words.size() == 2) {
                sc.numeric[words[1]] = parsed;
            } else {
                fail("expected: numeric <key> = <number> or numeric param <symbol> = <number>");
            }
        } else if (directive == "expect") {
            if (words.size() != 2) fail("expected: expect <key> = <expression>");
            sc.goldens.push_back({GoldenEntry::Kind::expect_expr, words[1], value});
        } else if (directive == "expect_str") {
            if (words.size() != 2) fail("expected: expect_str <key> = <string>");
            sc.goldens.push_back({GoldenEntry::Kind::expect_str, words[1], value});
        } else if (directive == "claim") {
            if (words.size() != 2) fail("expected: claim <key> = <expression>");
            sc.goldens.push_back({GoldenEntry::Kind::claim_expr, words[1], value});
        } else {
            fail("unknown directive '" + directive + "'");
        }
    }
    if (sc.name.empty()) throw Error("scenario has no name");
    if (sc.pairs.empty()) throw Error("scenario declares no phase-space pairs");
    if (sc.lagrangian_text.empty()) throw Error("scenario has no lagrangian");
    if (sc.kinetic_level_text.empty()) throw Error("scenario has no kinetic_level");
    return sc;
}

// ---------------------------------------------------------------------------
// Built-in fixtures: the three trap configurations with their golden
// blocks.  `expect` entries are engine-verified results; `claim`
// entries are recorded reference values that the report compares and
// flags without failing.
// ---------------------------------------------------------------------------

inline const char* kFixtureCombinedTrap = R"scn(
scenario combined-trap-with-flux

pair x1 v1 p1
pair x2 v2 p2
param mu positive
param omega_c positive
param omega_0 positive
param omega_P positive
param a positive
param q positive
param c positive
param hbar positive
param pi positive
alias B_0 = mu*omega_0*c/q
alias Phi_0 = pi*a^2*B_0

lagrangian = 1/2*mu*(v1^2 + v2^2) - 1/2*mu*omega_c*(v1*x2 - v2*x1) - mu*omega_0*a^2*(v1*x2 - v2*x1)/(2*(x1^2 + x2^2)) - 1/2*mu*omega_P^2*(x1^2 + x2^2)
kinetic_level = 1/2*hbar*omega_c
flux_parameter = omega_0
charge_over_c = q/c

gauge_potential = -B_0*a^2*x2/(2*(x1^2 + x2^2)) ; B_0*a^2*x1/(2*(x1^2 + x2^2))
gauge_gradient = B_0*a^2*x2/(2*(x1^2 + x2^2)) ; -B_0*a^2*x1/(2*(x1^2 + x2^2))
gauge_winding = -pi*B_0*a^2

numeric alpha = 0.5
numeric omega_c = 1.0
numeric omega_p = 0.5
numeric r_max = 14.0
numeric n_points = 2000
numeric m = 0
numeric k_levels = 3
numeric n_max = 3
numeric dt = 0.002
numeric periods = 200
numeric param mu = 1.0
numeric param omega_c = 1.0
numeric param omega_0 = 1.0
numeric param omega_P = 0.5
numeric param a = 1.0
numeric param q = 1.0
numeric param c = 1.0
numeric param hbar = 1.0
numeric param pi = 3.14159265358979323846

expect potential = 1/2*mu*omega_P^2*(x1^2 + x2^2)
expect primary_constraint_1 = p1 + 1/2*mu*omega_c*x2 + mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))
expect primary_constraint_2 = p2 - 1/2*mu*omega_c*x1 - mu*omega_0*a^2*x1/(2*(x1^2 + x2^2))
expect constraint_matrix_12 = mu*omega_c
expect constraint_matrix_21 = -mu*omega_c
expect constraint_inverse_12 = -1/(mu*omega_c)
expect mech_bracket_12 = mu*omega_c
expect kinetic_level_0 = 1/2*hbar*omega_c
expect kinetic_level_1 = 3/2*hbar*omega_c
expect_str outcome = reducible
expect dirac_x1_x2 = -1/(mu*omega_c)
claim dirac_x1_x2 = 1/(mu*omega_c)
expect elimination_p1 = -1/2*mu*omega_c*x2 - mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))
expect elimination_p2 = 1/2*mu*omega_c*x1 + mu*omega_0*a^2*x1/(2*(x1^2 + x2^2))
expect effective_mass = mu*omega_c^2/omega_P^2
expect effective_frequency = omega_P^2/omega_c
expect zero_point_energy = 1/2*hbar*omega_c
expect energy_level_0 = 1/2*hbar*omega_P^2/omega_c + 1/2*hbar*omega_c
expect angular_momentum_coordinates = q*Phi_0/(2*pi*c) + 1/2*mu*omega_c*(x1^2 + x2^2)
expect fractional_offset = q*Phi_0/(2*pi*c)
expect ladder_coefficient = hbar
expect number_offset = 1/2
expect zero_point_angular_momentum = hbar/2 + q*Phi_0/(2*pi*c)
expect_str gauge_hamiltonian_matches = true
expect gauge_jz = q*Phi_0/(2*pi*c) + 1/2*mu*omega_c*(x1^2 + x2^2)
expect_str gauge_matches_direct = true
)scn";

inline const char* kFixtureSpectatorOff = R"scn(
scenario spectator-off

pair x1 v1 p1
pair x2 v2 p2
param mu positive
param omega_0 positive
param omega_P positive
param a positive
param q positive
param c positive
param hbar positive
param pi positive
param Ek positive
alias B_0 = mu*omega_0*c/q
alias Phi_0 = pi*a^2*B_0

lagrangian = 1/2*mu*(v1^2 + v2^2) - mu*omega_0*a^2*(v1*x2 - v2*x1)/(2*(x1^2 + x2^2)) - 1/2*mu*omega_P^2*(x1^2 + x2^2)
kinetic_level = Ek
flux_parameter = omega_0

numeric param mu = 1.0
numeric param omega_0 = 1.0
numeric param omega_P = 0.5
numeric param a = 1.0
numeric param q = 1.0
numeric param c = 1.0
numeric param hbar = 1.0
numeric param pi = 3.14159265358979323846
numeric param Ek = 0.5

expect primary_constraint_1 = p1 + mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))
expect primary_constraint_2 = p2 - mu*omega_0*a^2*x1/(2*(x1^2 + x2^2))
expect constraint_matrix_12 = 0
expect constraint_matrix_21 = 0
expect mech_bracket_12 = 0
expect_str kinetic_spectrum_kind = continuous
expect_str outcome = quantization_blocked
expect secondary_constraint_1 = -mu*omega_P^2*x1
expect secondary_constraint_2 = -mu*omega_P^2*x2
expect secondary_primary_bracket_11 = -mu*omega_P^2
expect secondary_primary_bracket_22 = -mu*omega_P^2
expect secondary_primary_bracket_12 = 0
claim secondary_primary_bracket_11 = 0
claim secondary_primary_bracket_22 = 0
claim secondary_secondary_bracket_12 = 0
)scn";

inline const char* kFixtureFluxOff = R"scn(
scenario flux-off

pair x1 v1 p1
pair x2 v2 p2
param mu positive
param omega_c positive
param omega_P positive
param q positive
param c positive
param hbar positive
param pi positive

lagrangian = 1/2*mu*(v1^2 + v2^2) - 1/2*mu*omega_c*(v1*x2 - v2*x1) - 1/2*mu*omega_P^2*(x1^2 + x2^2)
kinetic_level = 1/2*hbar*omega_c

numeric alpha = 0.0
numeric omega_c = 1.0
numeric omega_p = 0.5
numeric r_max = 14.0
numeric n_points = 2000
numeric m = 0
numeric k_levels = 3
numeric n_max = 3
numeric dt = 0.002
numeric periods = 200
numeric param mu = 1.0
numeric param omega_c = 1.0
numeric param omega_P = 0.5
numeric param q = 1.0
numeric param c = 1.0
numeric param hbar = 1.0
numeric param pi = 3.14159265358979323846

expect primary_constraint_1 = p1 + 1/2*mu*omega_c*x2
expect primary_constraint_2 = p2 - 1/2*mu*omega_c*x1
expect constraint_matrix_12 = mu*omega_c
expect constraint_matrix_21 = -mu*omega_c
expect mech_bracket_12 = mu*omega_c
expect kinetic_level_0 = 1/2*hbar*omega_c
expect kinetic_level_1 = 3/2*hbar*omega_c
expect_str outcome = reducible
expect dirac_x1_x2 = -1/(mu*omega_c)
expect elimination_p1 = -1/2*mu*omega_c*x2
expect elimination_p2 = 1/2*mu*omega_c*x1
expect effective_mass = mu*omega_c^2/omega_P^2
expect effective_frequency = omega_P^2/omega_c
expect zero_point_energy = 1/2*hbar*omega_c
expect angular_momentum_coordinates = 1/2*mu*omega_c*(x1^2 + x2^2)
expect fractional_offset = 0
expect ladder_coefficient = hbar
expect zero_point_angular_momentum = hbar/2
)scn";

inline std::optional<std::string> builtin_scenario_text(const std::string& name) {
    if (name == "combined-trap-with-flux") return std::string(kFixtureCombinedTrap);
    if (name == "spectator-off") return std::string(kFixtureSpectatorOff);
    if (name == "flux-off") return std::string(kFixtureFluxOff);
    return std::nullopt;
}

inline std::vector<std::string> builtin_scenario_names() {
    return {"combined-trap-with-flux", "spectator-off", "flux-off"};
}

/// Load a scenario by built-in fixture name or from a file path.
inline Scenario load_scenario(const std::string& name_or_path) {
    if (auto text = builtin_scenario_text(name_or_path))
        return parse_scenario_text(*text);
    std::ifstream in(name_or_path);
    if (!in)
        throw Error("cannot open scenario '" + name_or_path +
                    "' (not a built-in fixture or readable file)");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

}  // namespace fluxtrap
