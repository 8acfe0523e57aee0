// Scenario runner for the constrained-quantization engine: loads a
// scenario (built-in fixture or file), runs the symbolic pipeline with
// optional gauge and numeric stages, and emits human-readable and JSON
// reports.

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>

#include "fluxtrap/numeric/secular.hpp"
#include "fluxtrap/report.hpp"

namespace {

using namespace fluxtrap;

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write JSON report to '" + path + "'");
    out << j.dump(2) << "\n";
}

void print_goldens(const std::vector<GoldenCheck>& checks) {
    int failed = 0;
    for (const auto& c : checks) {
        if (c.is_claim) {
            if (!c.passed)
                std::cout << "  [claim] " << c.key << ": computed " << c.computed
                          << " vs recorded claim " << c.expected
                          << "  (discrepancy flagged)\n";
            continue;
        }
        std::cout << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.key;
        if (!c.passed)
            std::cout << ": computed " << (c.missing ? "<missing>" : c.computed)
                      << ", expected " << c.expected;
        std::cout << "\n";
        failed += c.passed ? 0 : 1;
    }
    if (failed > 0)
        std::cout << "  " << failed << " golden check(s) failed\n";
}

void print_summary(const Report& report) {
    const auto& j = report.json;
    std::cout << "scenario: " << report.scenario_name << "\n";
    if (j["legendre"].contains("hessian_rank"))
        std::cout << "  hessian rank: " << j["legendre"]["hessian_rank"] << "\n";
    if (j["mechanical_momenta"].contains("mech_bracket_12"))
        std::cout << "  {K1, K2} = "
                  << j["mechanical_momenta"]["mech_bracket_12"].get<std::string>()
                  << "\n";
    if (j["kinetic_spectrum"].contains("kinetic_spectrum_kind"))
        std::cout << "  kinetic spectrum: "
                  << j["kinetic_spectrum"]["kinetic_spectrum_kind"].get<std::string>()
                  << "\n";
    std::cout << "  outcome: " << j["constraints"]["outcome"].get<std::string>()
              << "\n";
    if (j["constraints"].contains("constraint_matrix_12"))
        std::cout << "  constraint matrix C12 = "
                  << j["constraints"]["constraint_matrix_12"].get<std::string>()
                  << "\n";
    if (j["reduced"].contains("reduced_hamiltonian"))
        std::cout << "  reduced H = "
                  << j["reduced"]["reduced_hamiltonian"].get<std::string>() << "\n";
    if (j["oscillator"].contains("effective_mass")) {
        std::cout << "  effective mass = "
                  << j["oscillator"]["effective_mass"].get<std::string>() << "\n";
        std::cout << "  effective frequency = "
                  << j["oscillator"]["effective_frequency"].get<std::string>() << "\n";
    }
    if (j["angular_momentum"].contains("zero_point_angular_momentum")) {
        std::cout << "  zero-point J = "
                  << j["angular_momentum"]["zero_point_angular_momentum"]
                         .get<std::string>()
                  << "\n";
        std::cout << "  flux-induced offset = "
                  << j["angular_momentum"]["fractional_offset"].get<std::string>()
                  << "\n";
    }
    if (j["gauge"].contains("gauge_matches_direct"))
        std::cout << "  gauge check: transformed H matches = "
                  << j["gauge"]["gauge_hamiltonian_matches"].get<std::string>()
                  << ", J' matches direct = "
                  << j["gauge"]["gauge_matches_direct"].get<std::string>() << "\n";
    if (j["numeric"].contains("radial_levels"))
        std::cout << "  radial levels: " << j["numeric"]["radial_levels"].dump()
                  << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained-quantization engine for planar trap scenarios"};
    app.require_subcommand(1);

    std::string scenario_arg, json_path, csv_path;
    int n_max = 3, grid_points = 0, levels = 3, m_sector = 0;
    double alpha_override = std::numeric_limits<double>::quiet_NaN();
    double r_max_override = 0.0, tolerance = 1e-4;
    double dt = 0.002, periods = 200.0;
    bool no_numeric = false, verify = false;

    auto* analyze = app.add_subcommand("analyze", "run the symbolic pipeline");
    analyze->add_option("scenario", scenario_arg, "fixture name or file path")
        ->required();
    analyze->add_option("--json", json_path, "write the JSON report here");
    analyze->add_option("--n-max", n_max, "levels to tabulate");
    analyze->add_flag("--no-numeric", no_numeric, "skip the numeric stage");

    auto* spectrum = app.add_subcommand("spectrum", "radial eigenvalues");
    spectrum->add_option("scenario", scenario_arg, "fixture name or file path")
        ->required();
    spectrum->add_option("--m", m_sector, "angular momentum sector");
    spectrum->add_option("--alpha", alpha_override, "flux fraction override");
    spectrum->add_option("--grid", grid_points, "radial grid points");
    spectrum->add_option("--r-max", r_max_override, "domain radius");
    spectrum->add_option("--levels", levels, "number of levels");
    spectrum->add_option("--tolerance", tolerance, "Richardson warning tolerance");
    spectrum->add_option("--json", json_path, "write the JSON table here");
    spectrum->add_option("--csv", csv_path, "dump levels as CSV");

    auto* simulate = app.add_subcommand("simulate", "trajectory integration");
    simulate->add_option("scenario", scenario_arg, "fixture name or file path")
        ->required();
    simulate->add_option("--dt", dt, "time step");
    simulate->add_option("--periods", periods, "cyclotron periods to integrate");
    simulate->add_option("--json", json_path, "write the JSON summary here");
    simulate->add_option("--csv", csv_path, "dump sampled states as CSV");

    auto* gauge_check = app.add_subcommand("gauge-check", "gauge-transformation check");
    gauge_check->add_option("scenario", scenario_arg, "fixture name or file path")
        ->required();
    gauge_check->add_option("--json", json_path, "write the JSON report here");

    auto* fixtures = app.add_subcommand("fixtures", "built-in fixture set");
    fixtures->add_flag("--verify", verify, "run all fixtures and their goldens");
    fixtures->add_option("--json", json_path, "write the combined JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            Scenario sc = load_scenario(scenario_arg);
            RunOptions opt;
            opt.n_max = n_max;
            opt.with_numeric = !no_numeric;
            Report report = run_scenario(sc, opt);
            auto checks = verify_goldens(report, sc);
            print_summary(report);
            if (!checks.empty()) {
                std::cout << "goldens:\n";
                print_goldens(checks);
            }
            if (!json_path.empty()) write_json(report.json, json_path);
        } else if (spectrum->parsed()) {
            Scenario sc = load_scenario(scenario_arg);
            auto get = [&](const char* key, double fallback) {
                auto it = sc.numeric.find(key);
                return it == sc.numeric.end() ? fallback : it->second;
            };
            numeric::NumericScenario ns{get("alpha", 0.0), get("omega_c", 1.0),
                                        get("omega_p", 0.5)};
            if (!std::isnan(alpha_override)) ns.alpha = alpha_override;
            numeric::RadialGrid grid{
                r_max_override > 0 ? r_max_override : get("r_max", 14.0),
                grid_points > 0 ? grid_points
                                : static_cast<int>(get("n_points", 2000)),
                0.0, tolerance};
            auto result = numeric::radial_spectrum(ns, m_sector, grid, levels);
            ordered_json j;
            j["scenario"] = sc.name;
            j["m"] = m_sector;
            j["alpha"] = ns.alpha;
            j["omega_c"] = ns.omega_c;
            j["omega_p"] = ns.omega_p;
            j["grid"] = {{"r_max", grid.r_max}, {"n_points", grid.n_points}};
            j["levels"] = result.energies;
            ordered_json closed = ordered_json::array();
            for (int k = 0; k < levels; ++k)
                closed.push_back(numeric::fock_darwin_level(k, m_sector, ns));
            j["closed_form"] = closed;
            j["grid_warning"] = result.grid_warning;
            std::cout << "radial spectrum (m = " << m_sector
                      << ", alpha = " << ns.alpha << "):\n";
            for (int k = 0; k < levels; ++k)
                std::cout << "  E_" << k << " = " << result.energies[k]
                          << "   (closed form " << closed[k].get<double>() << ")\n";
            if (result.grid_warning)
                std::cout << "  warning: Richardson check exceeds tolerance\n";
            if (!json_path.empty()) write_json(j, json_path);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                csv << "n,energy,closed_form\n";
                for (int k = 0; k < levels; ++k)
                    csv << k << "," << result.energies[k] << ","
                        << closed[k].get<double>() << "\n";
            }
        } else if (simulate->parsed()) {
            Scenario sc = load_scenario(scenario_arg);
            auto get = [&](const char* key, double fallback) {
                auto it = sc.numeric.find(key);
                return it == sc.numeric.end() ? fallback : it->second;
            };
            numeric::NumericScenario ns{get("alpha", 0.0), get("omega_c", 1.0),
                                        get("omega_p", 0.5)};
            double period = 2.0 * M_PI / std::max(ns.omega_c, ns.omega_p);
            auto steps = static_cast<std::int64_t>(periods * period / dt);
            numeric::TrajectoryState init{1.0, 0.0, 0.1, 0.8, 0.0};
            auto result = numeric::integrate_trajectory(ns, init, dt, steps,
                                                        std::max<std::int64_t>(
                                                            steps / 2000, 1));
            ordered_json j;
            j["scenario"] = sc.name;
            j["dt"] = dt;
            j["periods"] = periods;
            j["energy_drift"] = result.energy_drift;
            j["jz_drift"] = result.jz_drift;
            j["speed_drift"] = result.speed_drift;
            std::cout << "trajectory over " << periods << " periods (dt = " << dt
                      << "):\n  energy drift " << result.energy_drift
                      << "\n  canonical J_z drift " << result.jz_drift
                      << "\n  speed drift " << result.speed_drift << "\n";
            if (!json_path.empty()) write_json(j, json_path);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                csv << "t,x1,x2,v1,v2\n";
                for (auto& st : result.samples)
                    csv << st.time << "," << st.x1 << "," << st.x2 << "," << st.v1
                        << "," << st.v2 << "\n";
            }
        } else if (gauge_check->parsed()) {
            Scenario sc = load_scenario(scenario_arg);
            RunOptions opt;
            opt.with_numeric = false;
            Report report = run_scenario(sc, opt);
            std::cout << "gauge check for " << sc.name << ":\n";
            const auto& g = report.json["gauge"];
            if (g.contains("skipped")) {
                std::cout << "  " << g["skipped"].get<std::string>() << "\n";
            } else if (g.contains("error")) {
                std::cout << "  error: " << g["error"].get<std::string>() << "\n";
            } else {
                std::cout << "  transformed potential = ("
                          << g["transformed_potential_1"].get<std::string>() << ", "
                          << g["transformed_potential_2"].get<std::string>() << ")\n";
                std::cout << "  transformed Hamiltonian matches flux-free form: "
                          << g["gauge_hamiltonian_matches"].get<std::string>() << "\n";
                std::cout << "  J' = " << g["gauge_jz"].get<std::string>() << "\n";
                std::cout << "  equals the ungauged reduction: "
                          << g["gauge_matches_direct"].get<std::string>() << "\n";
            }
            if (!json_path.empty()) write_json(report.json, json_path);
        } else if (fixtures->parsed()) {
            if (!verify) {
                for (const auto& name : builtin_scenario_names())
                    std::cout << name << "\n";
                return 0;
            }
            // fixtures are fully isolated (own tables), so verify them in parallel
            auto run_one = [](const std::string& name) {
                Scenario sc = load_scenario(name);
                RunOptions opt;
                opt.with_numeric = false;
                Report report = run_scenario(sc, opt);
                auto checks = verify_goldens(report, sc);
                return std::make_pair(std::move(report), std::move(checks));
            };
            std::vector<std::future<std::pair<Report, std::vector<GoldenCheck>>>>
                futures;
            for (const auto& name : builtin_scenario_names())
                futures.push_back(std::async(std::launch::async, run_one, name));
            ordered_json combined = ordered_json::array();
            for (auto& f : futures) {
                auto [report, checks] = f.get();
                std::cout << report.scenario_name << ":\n";
                print_goldens(checks);
                combined.push_back(report.json);
            }
            if (!json_path.empty()) write_json(combined, json_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
