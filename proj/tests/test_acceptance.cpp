// Acceptance suite: one test case per criterion, each printing a
// [PASS]/[FAIL] line. The scenario runs are shared across criteria and use
// the library defaults (J=1, D=0.2, omega=0.1, nbar=1, gamma=0.1,
// t_max=30, 601 samples; fig3 grid T in [0.1,2] step 0.05, D in [0,3]
// step 0.05).

#include "qdd/cli.hpp"
#include "qdd/scenarios.hpp"
#include "qdd/selftest.hpp"

#include <catch2/catch.hpp>

#include <iostream>
#include <random>
#include <sstream>

using namespace qdd;

namespace {

struct criterion_log {
    std::string label;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    bool finish() const {
        std::cout << (failures.empty() ? "[PASS] " : "[FAIL] ") << label << "\n";
        for (const auto& f : failures) std::cout << "       - " << f << "\n";
        std::cout.flush();
        return failures.empty();
    }
};

std::string num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

const evolve_result& fig1a() {
    static const evolve_result r = [] {
        scenario_config cfg = scenario_preset(scenario_kind::fig1a);
        cfg.threads = 4;
        return run_evolve(cfg);
    }();
    return r;
}

const evolve_result& fig1b() {
    static const evolve_result r = [] {
        scenario_config cfg = scenario_preset(scenario_kind::fig1b);
        cfg.threads = 4;
        return run_evolve(cfg);
    }();
    return r;
}

const compare_result& fig2(double dm) {
    static const compare_result d02 = [] {
        scenario_config cfg = scenario_preset(scenario_kind::fig2);
        cfg.threads = 4;
        return run_compare_j0(cfg);
    }();
    static const compare_result d0 = [] {
        scenario_config cfg = scenario_preset(scenario_kind::fig2);
        cfg.model.D = 0.0;
        cfg.threads = 4;
        return run_compare_j0(cfg);
    }();
    static const compare_result d1 = [] {
        scenario_config cfg = scenario_preset(scenario_kind::fig2);
        cfg.model.D = 1.0;
        cfg.threads = 4;
        return run_compare_j0(cfg);
    }();
    if (dm == 0.0) return d0;
    if (dm == 1.0) return d1;
    return d02;
}

const thermal_result& fig3() {
    static const thermal_result r = [] {
        scenario_config cfg = scenario_preset(scenario_kind::fig3);
        cfg.threads = 4;
        return run_thermal_sweep(cfg);
    }();
    return r;
}

// 601 samples over [0, 30]: t = i / 20.
int grid_index(double t) { return int(std::lround(20.0 * t)); }

}  // namespace

TEST_CASE("criterion 1: initial correlations at the Fig 1a anchor") {
    criterion_log log{"criterion 1: Q(0) = 1 and E(0) = 1 within 1e-9 (ground initial state)"};
    const evolve_row& first = fig1a().rows.front();
    log.expect(std::abs(first.discord - 1.0) <= 1e-9, "Q(0) = " + num(first.discord));
    log.expect(std::abs(first.entanglement - 1.0) <= 1e-9, "E(0) = " + num(first.entanglement));
    REQUIRE(log.finish());
}

TEST_CASE("criterion 2: entanglement sudden death vs asymptotic discord decay") {
    criterion_log log{"criterion 2: finite-time E death while Q stays positive and decays"};
    const auto& rows = fig1a().rows;

    int death = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].entanglement == 0.0) {
            bool stays_dead = true;
            for (std::size_t j = i; j < rows.size(); ++j)
                if (rows[j].entanglement != 0.0) stays_dead = false;
            if (stays_dead) {
                death = int(i);
                break;
            }
        }
    }
    log.expect(death >= 0, "no finite t* with E = 0 for all later grid points");
    if (death >= 0) {
        log.expect(rows[std::size_t(death)].discord > 1e-4,
                   "Q(t*) = " + num(rows[std::size_t(death)].discord) + " at t* = " +
                       num(rows[std::size_t(death)].t));
        log.expect(death > 0, "entanglement must not be dead at t = 0");
    }
    for (const auto& row : rows)
        log.expect(row.discord > -1e-12, "Q(" + num(row.t) + ") = " + num(row.discord));
    const double q1 = rows[std::size_t(grid_index(1.0))].discord;
    const double q5 = rows[std::size_t(grid_index(5.0))].discord;
    const double q30 = rows[std::size_t(grid_index(30.0))].discord;
    log.expect(q30 < q5 && q5 < q1, "expected Q(30) < Q(5) < Q(1), got " + num(q30) + ", " + num(q5) +
                                        ", " + num(q1));
    REQUIRE(log.finish());
}

TEST_CASE("criterion 3: correlations generated from a separable state") {
    criterion_log log{"criterion 3: |10> starts uncorrelated, then Q and E exceed 1e-2"};
    const auto& rows = fig1b().rows;
    log.expect(std::abs(rows.front().discord) <= 1e-9, "Q(0) = " + num(rows.front().discord));
    log.expect(std::abs(rows.front().entanglement) <= 1e-9,
               "E(0) = " + num(rows.front().entanglement));
    double max_q = 0.0, max_e = 0.0;
    for (const auto& row : rows) {
        max_q = std::max(max_q, row.discord);
        max_e = std::max(max_e, row.entanglement);
    }
    log.expect(max_q > 1e-2, "max Q = " + num(max_q));
    log.expect(max_e > 1e-2, "max E = " + num(max_e));
    REQUIRE(log.finish());
}

TEST_CASE("criterion 4: interaction does not slow the discord decay") {
    criterion_log log{"criterion 4: Q_J1 <= Q_J0 at t in {2,4,6,8,10}; Q_J0 independent of D"};
    const auto& rows = fig2(0.2).rows;
    for (double t : {2.0, 4.0, 6.0, 8.0, 10.0}) {
        const compare_row& row = rows[std::size_t(grid_index(t))];
        log.expect(row.discord_interacting <= row.discord_free + 1e-9,
                   "t = " + num(t) + ": Q_J1 = " + num(row.discord_interacting) + " > Q_J0 = " +
                       num(row.discord_free));
    }
    const auto& rows_d0 = fig2(0.0).rows;
    const auto& rows_d1 = fig2(1.0).rows;
    for (double t : {2.0, 4.0, 6.0, 8.0, 10.0}) {
        const std::size_t k = std::size_t(grid_index(t));
        log.expect(std::abs(rows_d0[k].discord_free - rows_d1[k].discord_free) <= 1e-9,
                   "t = " + num(t) + ": Q_J0 differs between D = 0 and D = 1 by " +
                       num(std::abs(rows_d0[k].discord_free - rows_d1[k].discord_free)));
    }
    REQUIRE(log.finish());
}

TEST_CASE("criterion 5: channel and master equation coincide at J = 0") {
    criterion_log log{"criterion 5: Kraus trajectory = Lindblad trajectory at J = 0 (1e-8); theta1 "
                      "closed form (1e-10)"};
    const bath_params bath{1.0, 0.1};
    const model_params interacting{1.0, 0.2, 0.1};
    const model_params free_model{0.0, 0.2, 0.1};
    const density_matrix rho0 = density_matrix::pure(ground_state(interacting));
    const superoperator sop = build_liouvillian(build_hamiltonian(free_model), bath);
    const std::vector<double> times = time_grid(30.0, 601);
    const trajectory me = evolve_diag(sop, rho0, times);

    double worst_state = 0.0, worst_theta = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double p = p_of_t(bath.gamma, bath.nbar, times[i]);
        const density_matrix channel = apply_two_qubit_channel(rho0, bath.nbar, p);
        worst_state = std::max(worst_state, max_abs(channel.mat() - me[i].state.mat()));
        const xstate_entries e = as_xstate(me[i].state);
        const double theta1_entries = std::hypot(e.u + e.x - e.y - e.v, 2.0 * std::abs(e.z));
        worst_theta =
            std::max(worst_theta, std::abs(closed_form_bell(bath.nbar, p).theta1 - theta1_entries));
    }
    log.expect(worst_state <= 1e-8, "max elementwise channel/Lindblad gap = " + num(worst_state));
    log.expect(worst_theta <= 1e-10, "max theta1 gap = " + num(worst_theta));
    REQUIRE(log.finish());
}

TEST_CASE("criterion 6: closed-form discord tracks the numeric optimizer") {
    criterion_log log{"criterion 6: |Q_closed - Q_numeric| <= 1e-3 and Q_closed >= Q_numeric - 1e-9 "
                      "on every trajectory and thermal sample"};
    double worst_gap = 0.0, worst_under = 0.0;
    long samples = 0;
    for (const evolve_result* res : {&fig1a(), &fig1b()})
        for (const auto& row : res->rows) {
            if (!row.closed_form_discord) continue;
            ++samples;
            worst_gap = std::max(worst_gap, std::abs(*row.closed_form_discord - row.discord));
            worst_under = std::max(worst_under, row.discord - *row.closed_form_discord);
        }
    for (const auto& row : fig3().rows) {
        ++samples;
        worst_gap = std::max(worst_gap, std::abs(row.discord_closed - row.discord_numeric_check));
        worst_under = std::max(worst_under, row.discord_numeric_check - row.discord_closed);
    }
    log.expect(samples > 3000, "expected thousands of samples, saw " + std::to_string(samples));
    log.expect(worst_gap <= 1e-3, "max |Q_closed - Q_numeric| = " + num(worst_gap));
    log.expect(worst_under <= 1e-9, "numeric exceeded closed form by " + num(worst_under));
    REQUIRE(log.finish());
}

TEST_CASE("criterion 7: thermal discord landscape") {
    criterion_log log{"criterion 7: Q > 0 on the whole (T, D) grid, nondecreasing in D, decaying "
                      "from T = 0.2 to T = 2"};
    const thermal_result& res = fig3();
    for (const auto& row : res.rows)
        log.expect(row.discord_closed > 0.0, "Q(T=" + num(row.temperature) + ", D=" +
                                                 num(row.dm_coupling) + ") = " +
                                                 num(row.discord_closed));
    for (int it = 0; it < res.temperature_count; ++it) {
        double prev = -1.0;
        for (int id = 0; id < res.d_count; ++id) {
            const thermal_row& row = res.rows[std::size_t(it * res.d_count + id)];
            log.expect(row.discord_closed >= prev - 1e-9,
                       "Q decreasing in D at T = " + num(row.temperature) + ", D = " +
                           num(row.dm_coupling));
            prev = row.discord_closed;
        }
    }
    const int it_cold = int(std::lround((0.2 - 0.1) / 0.05));
    const int it_hot = res.temperature_count - 1;  // T = 2
    for (int id = 0; id < res.d_count; ++id) {
        const double cold = res.rows[std::size_t(it_cold * res.d_count + id)].discord_closed;
        const double hot = res.rows[std::size_t(it_hot * res.d_count + id)].discord_closed;
        log.expect(hot < cold, "Q(T=2) = " + num(hot) + " not below Q(T=0.2) = " + num(cold) +
                                   " at D index " + std::to_string(id));
    }
    REQUIRE(log.finish());
}

TEST_CASE("criterion 8: spectrum anchors") {
    criterion_log log{"criterion 8: closed-form spectra for 100 random triples (1e-10); generator "
                      "spectra stable with a unique zero mode"};
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const model_params p{2.0 * uni(rng), 3.0 * uni(rng), uni(rng)};
        const spectrum_record s = exact_spectrum(p);
        auto closed = closed_form_levels(p);
        std::sort(closed.begin(), closed.end());
        for (int k = 0; k < 4; ++k)
            worst = std::max(worst, std::abs(s.eigenvalues[k] - closed[std::size_t(k)]));
    }
    log.expect(worst <= 1e-10, "worst closed-form mismatch = " + num(worst));

    for (const bath_params bath : {bath_params{1.0, 0.1}, bath_params{0.5, 0.05}, bath_params{0.0, 0.2}}) {
        const superoperator sop = build_liouvillian(build_hamiltonian({1.0, 0.2, 0.1}), bath);
        log.expect(sop.eigenvalues.real().maxCoeff() <= 1e-10,
                   "positive real part at gamma = " + num(bath.gamma));
        int zero_modes = 0;
        for (Eigen::Index j = 0; j < 16; ++j)
            if (std::abs(sop.eigenvalues[j]) <= 1e-10) ++zero_modes;
        log.expect(zero_modes == 1, "zero modes = " + std::to_string(zero_modes) + " at gamma = " +
                                        num(bath.gamma) + ", nbar = " + num(bath.nbar));
    }
    REQUIRE(log.finish());
}

TEST_CASE("criterion 9: backend equivalence") {
    criterion_log log{"criterion 9: diag vs rk4 within 1e-6 on scenarios 1-4; step halving ratio in "
                      "[8, 32]"};
    const bath_params bath{1.0, 0.1};
    const std::vector<double> times = time_grid(30.0, 601);

    struct scenario_case {
        const char* name;
        model_params model;
        density_matrix rho0;
    };
    const std::vector<scenario_case> cases = {
        {"fig1a", {1.0, 0.2, 0.1}, density_matrix::pure(ground_state({1.0, 0.2, 0.1}))},
        {"fig1b", {1.0, 0.2, 0.1},
         [] {
             cvector e = cvector::Zero(4);
             e(2) = 1.0;
             return density_matrix::pure(e);
         }()},
        {"fig2/J=1", {1.0, 0.2, 0.1}, density_matrix::pure(ground_state({1.0, 0.2, 0.1}))},
        {"fig2/J=0", {0.0, 0.2, 0.1}, density_matrix::pure(ground_state({1.0, 0.2, 0.1}))},
    };
    for (const auto& c : cases) {
        const cmatrix h = build_hamiltonian(c.model);
        const trajectory a = evolve_diag(build_liouvillian(h, bath), c.rho0, times);
        const trajectory b = evolve_rk4(h, bath, c.rho0, times, 0.5 * rk4_max_step(h, bath));
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            worst = std::max(worst, max_abs(a[i].state.mat() - b[i].state.mat()));
        log.expect(worst <= 1e-6, std::string(c.name) + ": backend gap = " + num(worst));
    }

    {  // 4th-order convergence, measured from a non-eigenstate start
        const cmatrix h = build_hamiltonian({1.0, 0.2, 0.1});
        cvector e = cvector::Zero(4);
        e(2) = 1.0;
        const density_matrix sep = density_matrix::pure(e);
        const std::vector<double> short_times = time_grid(10.0, 6);
        const trajectory exact = evolve_diag(build_liouvillian(h, bath), sep, short_times);
        auto max_err = [&](double dt) {
            const trajectory approx = evolve_rk4(h, bath, sep, short_times, dt);
            double worst = 0.0;
            for (std::size_t i = 0; i < short_times.size(); ++i)
                worst = std::max(worst, max_abs(exact[i].state.mat() - approx[i].state.mat()));
            return worst;
        };
        const double bound = rk4_max_step(h, bath);
        const double ratio = max_err(bound) / max_err(0.5 * bound);
        log.expect(ratio >= 8.0 && ratio <= 32.0, "step-halving ratio = " + num(ratio));
    }
    REQUIRE(log.finish());
}

TEST_CASE("criterion 10: property suites pass") {
    criterion_log log{"criterion 10: selftest invariant suites report zero failures"};
    for (const check_result& r : run_selftest())
        log.expect(r.passed, r.name + ": " + r.detail);
    REQUIRE(log.finish());
}
