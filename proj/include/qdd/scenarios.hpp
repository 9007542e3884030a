#pragma once

// Scenario runners behind the CLI: decoherence trajectories, the
// interacting-vs-free comparison, and the thermal (T, D) discord sweep.
// Output is deterministic CSV (fixed scientific notation, 12 significant
// digits); rows are pure functions of the config and may be computed in
// parallel, the assembly order is fixed.

#include "qdd/correlations.hpp"
#include "qdd/damping_channel.hpp"
#include "qdd/liouville.hpp"
#include "qdd/spin_model.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qdd {

enum class scenario_kind { fig1a, fig1b, fig2, fig3, custom };
enum class evolve_method { diag, rk4, both };
enum class initial_kind { ground, separable10, file };

struct value_range {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;

    int count() const {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) || !(step > 0.0) ||
            hi < lo - 1e-15)
            throw validation_error("range: need lo <= hi and step > 0");
        return int(std::floor((hi - lo) / step + 1e-9)) + 1;
    }
    double at(int k) const { return lo + step * k; }
};

/// Parses "lo:hi:step".
inline value_range parse_range(const std::string& text) {
    value_range r;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw validation_error("range: expected lo:hi:step, got '" + text + "'");
    try {
        std::size_t used = 0;
        r.lo = std::stod(text.substr(0, c1), &used);
        r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1), &used);
        r.step = std::stod(text.substr(c2 + 1), &used);
    } catch (const std::exception&) {
        throw validation_error("range: cannot parse '" + text + "'");
    }
    r.count();
    return r;
}

struct scenario_config {
    scenario_kind scenario = scenario_kind::custom;
    model_params model{1.0, 0.2, 0.1};
    bath_params bath{1.0, 0.1};
    initial_kind initial = initial_kind::ground;
    std::string initial_file;
    double t_max = 30.0;
    int steps = 601;
    evolve_method method = evolve_method::diag;
    value_range d_range{0.0, 3.0, 0.05};
    value_range temperature_range{0.1, 2.0, 0.05};
    int opt_grid = 64;  // measurement-optimizer grid density
    int threads = 0;    // 0 = hardware concurrency

    void validate() const {
        model.validate();
        bath.validate();
        if (steps < 2) throw validation_error("scenario: steps must be >= 2");
        if (!std::isfinite(t_max) || !(t_max > 0.0)) throw validation_error("scenario: t_max must be > 0");
        if (opt_grid < 4) throw validation_error("scenario: optimizer grid must be at least 4");
        d_range.count();
        temperature_range.count();
        if (initial == initial_kind::file && initial_file.empty())
            throw validation_error("scenario: initial=file requires a path");
    }
};

inline scenario_config scenario_preset(scenario_kind kind) {
    scenario_config cfg;
    cfg.scenario = kind;
    if (kind == scenario_kind::fig1b) cfg.initial = initial_kind::separable10;
    return cfg;
}

namespace detail {

inline void for_each_index(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = int(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::mutex mu;
    std::exception_ptr first;
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(threads));
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) {
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

inline void check_measure_ranges(double mutual, double classical, double discord, double ent,
                                 const char* where) {
    const bool ok = mutual >= 0.0 && mutual <= 2.0 + 1e-9 && classical >= 0.0 &&
                    classical <= mutual + 1e-9 && discord >= 0.0 && discord <= mutual + 1e-9 &&
                    ent >= 0.0 && ent <= 1.0 + 1e-9;
    if (!ok)
        throw numeric_error(std::string(where) + ": correlation measures left their ranges (I=" +
                            std::to_string(mutual) + ", C=" + std::to_string(classical) +
                            ", Q=" + std::to_string(discord) + ", E=" + std::to_string(ent) + ")");
}

}  // namespace detail

/// Fixed scientific notation with 12 significant digits.
inline std::string csv_num(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

inline std::vector<double> time_grid(double t_max, int steps) {
    std::vector<double> ts(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) ts[std::size_t(i)] = t_max * double(i) / double(steps - 1);
    return ts;
}

/// Parses a complex token of the form re+imj (the trailing j marks the
/// imaginary part), e.g. 0.5+0j, 1e-3-2.5e-4j.
inline complexd parse_complex_token(const std::string& token) {
    if (token.empty()) throw validation_error("complex: empty token");
    std::string body = token;
    bool has_imag_suffix = false;
    if (body.back() == 'j' || body.back() == 'J') {
        has_imag_suffix = true;
        body.pop_back();
        if (body.empty()) throw validation_error("complex: bare 'j' in '" + token + "'");
    }
    auto to_double = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double x = std::stod(s, &used);
            if (used != s.size()) throw validation_error("complex: trailing junk in '" + token + "'");
            return x;
        } catch (const validation_error&) {
            throw;
        } catch (const std::exception&) {
            throw validation_error("complex: cannot parse '" + token + "'");
        }
    };
    if (!has_imag_suffix) return complexd(to_double(body), 0.0);
    // Split before the sign of the imaginary part (a sign not preceded by
    // an exponent marker, scanning past the leading sign).
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < body.size(); ++i) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) return complexd(0.0, to_double(body));
    return complexd(to_double(body.substr(0, split)), to_double(body.substr(split)));
}

/// Reads a 4x4 density matrix: 4 lines of 4 whitespace-separated re+imj
/// entries, validated against the density-matrix invariants.
inline density_matrix load_density_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open initial-state file: " + path);
    cmatrix m(4, 4);
    std::string line;
    for (int i = 0; i < 4; ++i) {
        if (!std::getline(in, line))
            throw validation_error("initial-state file: expected 4 lines, got " + std::to_string(i));
        std::istringstream row(line);
        for (int j = 0; j < 4; ++j) {
            std::string token;
            if (!(row >> token))
                throw validation_error("initial-state file: line " + std::to_string(i + 1) +
                                       " has fewer than 4 entries");
            m(i, j) = parse_complex_token(token);
        }
    }
    try {
        return density_matrix::from(m);
    } catch (const numeric_error& err) {
        throw validation_error(std::string("initial-state file violates density-matrix invariants: ") +
                               err.what());
    }
}

inline density_matrix initial_state(const scenario_config& cfg) {
    switch (cfg.initial) {
        case initial_kind::ground:
            return density_matrix::pure(ground_state(cfg.model));
        case initial_kind::separable10: {
            cvector e = cvector::Zero(4);
            e(2) = 1.0;  // |10>
            return density_matrix::pure(e);
        }
        case initial_kind::file:
            return load_density_matrix(cfg.initial_file);
    }
    throw validation_error("scenario: unknown initial-state kind");
}

// ---------------------------------------------------------------------------
// Trajectory scenario (fig1a, fig1b, custom)
// ---------------------------------------------------------------------------

struct evolve_row {
    double t = 0.0;
    double u = 0.0, x = 0.0, y = 0.0, v = 0.0;
    complexd z{0.0, 0.0};
    double mutual_info = 0.0, classical = 0.0, discord = 0.0, entanglement = 0.0;
    double theta_opt = 0.0, phi_opt = 0.0;
    double trace_err = 0.0, min_eig = 0.0;
    std::optional<double> backend_resid;
    std::optional<double> closed_form_discord;  // not emitted; kept for cross-checks
};

struct evolve_result {
    scenario_config config;
    std::vector<evolve_row> rows;
    std::string csv;
};

namespace detail {

inline evolve_row make_evolve_row(const trajectory_point& pt, bool x_input, int opt_grid) {
    if (x_input && off_pattern_magnitude(pt.state.mat()) > 1e-9)
        throw numeric_error("trajectory left the X pattern at t = " + std::to_string(pt.t));
    const cmatrix& m = pt.state.mat();
    evolve_row row;
    row.t = pt.t;
    row.u = m(0, 0).real();
    row.x = m(1, 1).real();
    row.y = m(2, 2).real();
    row.v = m(3, 3).real();
    row.z = m(1, 2);
    const correlation_report rep = compute_correlation_report(pt.state, opt_grid);
    detail::check_measure_ranges(rep.mutual_info, rep.classical, rep.discord, rep.entanglement,
                                 "run_evolve");
    row.mutual_info = rep.mutual_info;
    row.classical = rep.classical;
    row.discord = rep.discord;
    row.entanglement = rep.entanglement;
    row.theta_opt = rep.argmin_basis.theta;
    row.phi_opt = rep.argmin_basis.phi;
    row.trace_err = pt.state.trace_defect();
    row.min_eig = pt.state.min_eigenvalue();
    row.closed_form_discord = rep.closed_form_discord;
    return row;
}

}  // namespace detail

inline evolve_result run_evolve(const scenario_config& cfg) {
    cfg.validate();
    const density_matrix rho0 = initial_state(cfg);
    const cmatrix h = build_hamiltonian(cfg.model);
    const std::vector<double> times = time_grid(cfg.t_max, cfg.steps);

    std::optional<trajectory> traj_diag, traj_rk4;
    if (cfg.method != evolve_method::rk4) traj_diag = evolve(build_liouvillian(h, cfg.bath), rho0, times);
    if (cfg.method != evolve_method::diag)
        traj_rk4 = evolve_rk4(h, cfg.bath, rho0, times, 0.5 * rk4_max_step(h, cfg.bath));
    const trajectory& traj = traj_diag ? *traj_diag : *traj_rk4;

    const bool x_input = is_xstate(rho0);
    evolve_result result;
    result.config = cfg;
    result.rows.resize(times.size());
    detail::for_each_index(int(times.size()), cfg.threads, [&](int i) {
        evolve_row row = detail::make_evolve_row(traj[std::size_t(i)], x_input, cfg.opt_grid);
        if (traj_diag && traj_rk4)
            row.backend_resid =
                max_abs((*traj_diag)[std::size_t(i)].state.mat() - (*traj_rk4)[std::size_t(i)].state.mat());
        result.rows[std::size_t(i)] = std::move(row);
    });

    std::ostringstream csv;
    csv << "t,u,x,y,v,re_z,im_z,I,C,Q,E,theta_opt,phi_opt,trace_err,min_eig";
    if (cfg.method == evolve_method::both) csv << ",backend_resid";
    csv << "\n";
    for (const evolve_row& r : result.rows) {
        csv << csv_num(r.t) << ',' << csv_num(r.u) << ',' << csv_num(r.x) << ',' << csv_num(r.y) << ','
            << csv_num(r.v) << ',' << csv_num(r.z.real()) << ',' << csv_num(r.z.imag()) << ','
            << csv_num(r.mutual_info) << ',' << csv_num(r.classical) << ',' << csv_num(r.discord) << ','
            << csv_num(r.entanglement) << ',' << csv_num(r.theta_opt) << ',' << csv_num(r.phi_opt) << ','
            << csv_num(r.trace_err) << ',' << csv_num(r.min_eig);
        if (cfg.method == evolve_method::both) csv << ',' << csv_num(r.backend_resid.value_or(0.0));
        csv << "\n";
    }
    result.csv = csv.str();
    return result;
}

// ---------------------------------------------------------------------------
// Interacting vs free comparison (fig2)
// ---------------------------------------------------------------------------

struct compare_row {
    double t = 0.0;
    double discord_interacting = 0.0;   // master equation, J as configured
    double discord_free = 0.0;          // J = 0 via the damping channel
    double discord_free_me = 0.0;       // J = 0 via the master equation
    double free_route_resid = 0.0;      // max |channel state - master-equation state|
};

struct compare_result {
    scenario_config config;
    std::vector<compare_row> rows;
    std::string csv;
};

inline compare_result run_compare_j0(const scenario_config& cfg) {
    cfg.validate();
    const density_matrix rho0 = initial_state(cfg);
    const std::vector<double> times = time_grid(cfg.t_max, cfg.steps);

    const superoperator sop_interacting = build_liouvillian(build_hamiltonian(cfg.model), cfg.bath);
    const model_params free_model{0.0, cfg.model.D, cfg.model.omega};
    const superoperator sop_free = build_liouvillian(build_hamiltonian(free_model), cfg.bath);
    const trajectory traj_interacting = evolve(sop_interacting, rho0, times);
    const trajectory traj_free_me = evolve(sop_free, rho0, times);

    compare_result result;
    result.config = cfg;
    result.rows.resize(times.size());
    detail::for_each_index(int(times.size()), cfg.threads, [&](int i) {
        const std::size_t k = std::size_t(i);
        compare_row row;
        row.t = times[k];
        const double p = p_of_t(cfg.bath.gamma, cfg.bath.nbar, times[k]);
        const density_matrix channel_state = apply_two_qubit_channel(rho0, cfg.bath.nbar, p);
        row.discord_interacting = discord_numeric(traj_interacting[k].state, cfg.opt_grid).discord;
        row.discord_free = discord_numeric(channel_state, cfg.opt_grid).discord;
        row.discord_free_me = discord_numeric(traj_free_me[k].state, cfg.opt_grid).discord;
        row.free_route_resid = max_abs(channel_state.mat() - traj_free_me[k].state.mat());
        result.rows[k] = row;
    });

    std::ostringstream csv;
    csv << "t,Q_J1,Q_J0,Q_J0_me,free_route_resid\n";
    for (const compare_row& r : result.rows)
        csv << csv_num(r.t) << ',' << csv_num(r.discord_interacting) << ',' << csv_num(r.discord_free)
            << ',' << csv_num(r.discord_free_me) << ',' << csv_num(r.free_route_resid) << "\n";
    result.csv = csv.str();
    return result;
}

// ---------------------------------------------------------------------------
// Thermal sweep (fig3)
// ---------------------------------------------------------------------------

struct thermal_row {
    double temperature = 0.0;
    double dm_coupling = 0.0;
    double discord_closed = 0.0;
    double discord_numeric_check = 0.0;
    double entanglement = 0.0;
};

struct thermal_result {
    scenario_config config;
    int temperature_count = 0;
    int d_count = 0;
    std::vector<thermal_row> rows;  // temperature-major, D ascending within
    std::string csv;
};

inline thermal_result run_thermal_sweep(const scenario_config& cfg) {
    cfg.validate();
    if (cfg.temperature_range.lo <= 0.0)
        throw validation_error("thermal sweep: T range must exclude 0 (thermal states need T > 0)");

    thermal_result result;
    result.config = cfg;
    result.temperature_count = cfg.temperature_range.count();
    result.d_count = cfg.d_range.count();
    const int total = result.temperature_count * result.d_count;
    result.rows.resize(std::size_t(total));

    detail::for_each_index(total, cfg.threads, [&](int k) {
        const int it = k / result.d_count;
        const int id = k % result.d_count;
        thermal_row row;
        row.temperature = cfg.temperature_range.at(it);
        row.dm_coupling = cfg.d_range.at(id);
        const model_params point{cfg.model.J, row.dm_coupling, cfg.model.omega};
        const density_matrix rho = thermal_state(point, row.temperature);
        const xstate_entries entries = as_xstate(rho);
        row.discord_closed = discord_xstate(entries).discord;
        row.discord_numeric_check = discord_numeric(rho, cfg.opt_grid).discord;
        row.entanglement = entanglement_xstate(entries);
        if (row.discord_closed < 0.0 || row.discord_closed > 1.0 + 1e-9 || row.entanglement < 0.0 ||
            row.entanglement > 1.0 + 1e-9)
            throw numeric_error("run_thermal_sweep: measures left their ranges at T=" +
                                std::to_string(row.temperature) + ", D=" + std::to_string(row.dm_coupling));
        result.rows[std::size_t(k)] = row;
    });

    std::ostringstream csv;
    csv << "T,D,Q,Q_numeric_check,E\n";
    for (const thermal_row& r : result.rows)
        csv << csv_num(r.temperature) << ',' << csv_num(r.dm_coupling) << ',' << csv_num(r.discord_closed)
            << ',' << csv_num(r.discord_numeric_check) << ',' << csv_num(r.entanglement) << "\n";
    result.csv = csv.str();
    return result;
}

// ---------------------------------------------------------------------------
// Companion gnuplot scripts
// ---------------------------------------------------------------------------

inline std::string gnuplot_script(const scenario_config& cfg, const std::string& csv_path) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n";
    gp << "set key top right\n";
    switch (cfg.scenario) {
        case scenario_kind::fig2:
            gp << "set xlabel 't'\nset ylabel 'Q'\n";
            gp << "plot '" << csv_path << "' skip 1 using 1:2 with lines title 'Q (interacting)', \\\n"
               << "     '" << csv_path << "' skip 1 using 1:3 with lines title 'Q (J=0)'\n";
            break;
        case scenario_kind::fig3:
            gp << "set xlabel 'D'\nset ylabel 'T'\nset zlabel 'Q'\n";
            gp << "set dgrid3d " << cfg.temperature_range.count() << "," << cfg.d_range.count() << "\n";
            gp << "set hidden3d\n";
            gp << "splot '" << csv_path << "' skip 1 using 2:1:3 with lines title 'Q'\n";
            break;
        default:
            gp << "set xlabel 't'\nset ylabel 'correlation'\n";
            gp << "plot '" << csv_path << "' skip 1 using 1:10 with lines title 'Q', \\\n"
               << "     '" << csv_path << "' skip 1 using 1:11 with lines title 'E'\n";
            break;
    }
    return gp.str();
}

}  // namespace qdd
