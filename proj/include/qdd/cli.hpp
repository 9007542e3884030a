#pragma once

// Command-line front end. Precedence: flags override config-file values
// override defaults. Exit codes: 0 success, 2 validation error, 3
// numeric-invariant violation.

#include "qdd/scenarios.hpp"
#include "qdd/selftest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace qdd::cli {

namespace detail {

inline scenario_kind parse_scenario(const std::string& name) {
    static const std::map<std::string, scenario_kind> table = {
        {"fig1a", scenario_kind::fig1a}, {"fig1b", scenario_kind::fig1b},
        {"fig2", scenario_kind::fig2},   {"fig3", scenario_kind::fig3},
        {"custom", scenario_kind::custom}};
    const auto it = table.find(name);
    if (it == table.end())
        throw validation_error("unknown scenario '" + name +
                               "' (expected fig1a|fig1b|fig2|fig3|custom|selftest)");
    return it->second;
}

inline evolve_method parse_method(const std::string& name) {
    if (name == "diag") return evolve_method::diag;
    if (name == "rk4") return evolve_method::rk4;
    if (name == "both") return evolve_method::both;
    throw validation_error("unknown method '" + name + "' (expected diag|rk4|both)");
}

inline void parse_initial(const std::string& text, scenario_config& cfg) {
    if (text == "ground") {
        cfg.initial = initial_kind::ground;
    } else if (text == "separable10") {
        cfg.initial = initial_kind::separable10;
    } else if (text.rfind("file:", 0) == 0) {
        cfg.initial = initial_kind::file;
        cfg.initial_file = text.substr(5);
    } else {
        throw validation_error("unknown initial state '" + text +
                               "' (expected ground|separable10|file:PATH)");
    }
}

struct cli_settings {
    scenario_config cfg;
    std::string out_path;
    bool emit_gnuplot = false;
    bool initial_given = false;  // set via config or flag; presets respect it
};

inline void apply_config_file(const std::string& path, cli_settings& s) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw validation_error("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "J") s.cfg.model.J = value.get<double>();
            else if (key == "D") s.cfg.model.D = value.get<double>();
            else if (key == "omega") s.cfg.model.omega = value.get<double>();
            else if (key == "nbar") s.cfg.bath.nbar = value.get<double>();
            else if (key == "gamma") s.cfg.bath.gamma = value.get<double>();
            else if (key == "t_max") s.cfg.t_max = value.get<double>();
            else if (key == "steps") s.cfg.steps = value.get<int>();
            else if (key == "initial") { parse_initial(value.get<std::string>(), s.cfg); s.initial_given = true; }
            else if (key == "method") s.cfg.method = parse_method(value.get<std::string>());
            else if (key == "d_range") s.cfg.d_range = parse_range(value.get<std::string>());
            else if (key == "t_range") s.cfg.temperature_range = parse_range(value.get<std::string>());
            else if (key == "out") s.out_path = value.get<std::string>();
            else if (key == "threads") s.cfg.threads = value.get<int>();
            else if (key == "opt_grid") s.cfg.opt_grid = value.get<int>();
            else if (key == "emit_gnuplot") s.emit_gnuplot = value.get<bool>();
            else throw validation_error("config file: unknown key '" + key + "'");
        } catch (const validation_error&) {
            throw;
        } catch (const std::exception&) {
            throw validation_error("config file: bad value for key '" + key + "'");
        }
    }
}

/// The config path must be known before the main parse so flags can
/// override file values; scan for it directly.
inline std::string find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw validation_error("--config requires a path");
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

inline void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file: " + out_path);
    out << text;
    out.flush();
    if (!out) throw numeric_error("failed writing output file: " + out_path);
}

inline int run_selftest_command(const std::string& out_path) {
    const std::vector<check_result> results = run_selftest();
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    int failed = 0;
    for (const check_result& r : results) {
        j["checks"].push_back({{"name", r.name}, {"pass", r.passed}, {"detail", r.detail}});
        if (!r.passed) ++failed;
    }
    j["passed"] = int(results.size()) - failed;
    j["failed"] = failed;
    write_output(out_path, j.dump(2) + "\n");
    if (failed > 0) {
        for (const check_result& r : results)
            if (!r.passed) std::cerr << "selftest failed: " << r.name << " (" << r.detail << ")\n";
        return 3;
    }
    return 0;
}

}  // namespace detail

/// Runs the tool for argv[1..]; returns the process exit code.
inline int run(const std::vector<std::string>& args) {
    try {
        detail::cli_settings s;

        const std::string config_path = detail::find_config_path(args);
        if (!config_path.empty()) detail::apply_config_file(config_path, s);

        std::string scenario_name;
        std::string initial_text, method_text, d_range_text, t_range_text, config_dummy;

        CLI::App app{"Two-qubit decoherence scenarios: quantum discord, classical correlation "
                     "and entanglement under independent thermal reservoirs"};
        app.name("discord-dynamics");
        app.add_option("scenario", scenario_name, "fig1a|fig1b|fig2|fig3|custom|selftest")->required();
        app.add_option("--J", s.cfg.model.J, "exchange coupling (>= 0)");
        app.add_option("--D", s.cfg.model.D, "DM z component");
        app.add_option("--omega", s.cfg.model.omega, "local field");
        app.add_option("--nbar", s.cfg.bath.nbar, "reservoir mean occupation");
        app.add_option("--gamma", s.cfg.bath.gamma, "spontaneous-emission rate");
        app.add_option("--t-max", s.cfg.t_max, "trajectory end time");
        app.add_option("--steps", s.cfg.steps, "trajectory samples (inclusive endpoints)");
        app.add_option("--initial", initial_text, "ground|separable10|file:PATH");
        app.add_option("--method", method_text, "diag|rk4|both");
        app.add_option("--d-range", d_range_text, "fig3 D grid as lo:hi:step");
        app.add_option("--t-range", t_range_text, "fig3 temperature grid as lo:hi:step");
        app.add_option("--out", s.out_path, "output path (default: stdout)");
        app.add_option("--config", config_dummy, "JSON config file (flags take precedence)");
        app.add_option("--threads", s.cfg.threads, "worker threads (0 = hardware)");
        app.add_option("--opt-grid", s.cfg.opt_grid, "measurement-optimizer grid density");
        app.add_flag("--emit-gnuplot", s.emit_gnuplot, "write a companion gnuplot script next to --out");

        std::vector<const char*> argv;
        argv.reserve(args.size() + 1);
        argv.push_back("discord-dynamics");
        for (const std::string& a : args) argv.push_back(a.c_str());
        try {
            app.parse(int(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            std::cout << app.help();
            return 0;
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }

        if (!initial_text.empty()) {
            detail::parse_initial(initial_text, s.cfg);
            s.initial_given = true;
        }
        if (!method_text.empty()) s.cfg.method = detail::parse_method(method_text);
        if (!d_range_text.empty()) s.cfg.d_range = parse_range(d_range_text);
        if (!t_range_text.empty()) s.cfg.temperature_range = parse_range(t_range_text);

        if (scenario_name == "selftest") return detail::run_selftest_command(s.out_path);

        const scenario_kind kind = detail::parse_scenario(scenario_name);
        s.cfg.scenario = kind;
        if (!s.initial_given) s.cfg.initial = scenario_preset(kind).initial;

        std::string csv;
        switch (kind) {
            case scenario_kind::fig2:
                csv = run_compare_j0(s.cfg).csv;
                break;
            case scenario_kind::fig3:
                csv = run_thermal_sweep(s.cfg).csv;
                break;
            default:
                csv = run_evolve(s.cfg).csv;
                break;
        }
        detail::write_output(s.out_path, csv);
        if (s.emit_gnuplot) {
            if (s.out_path.empty())
                throw validation_error("--emit-gnuplot requires --out (the script references the CSV)");
            detail::write_output(s.out_path + ".gp", gnuplot_script(s.cfg, s.out_path));
        }
        return 0;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric invariant violated: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qdd::cli
