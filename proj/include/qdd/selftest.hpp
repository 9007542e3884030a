#pragma once

// The invariant suites behind the `selftest` subcommand. The options struct
// exposes the two constants most likely to rot (the exchange-probability
// exponent and the vectorization stacking) so tests can verify the checks
// actually catch a wrong value.

#include "qdd/correlations.hpp"
#include "qdd/damping_channel.hpp"
#include "qdd/liouville.hpp"
#include "qdd/spin_model.hpp"

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qdd {

struct selftest_options {
    // Rate factor in p(t) = 1 - exp(-factor * gamma * (2 nbar + 1) t).
    double p_rate_factor = 2.0;
    // Use the row-stacking spre/spost pair against the column-stacked vec.
    bool row_stacking_vectorization = false;
    unsigned seed = 20250808;
    int trajectory_samples = 41;
    double t_max = 20.0;
};

struct check_result {
    std::string name;
    bool passed;
    std::string detail;
};

namespace selftest_detail {

inline cmatrix random_matrix(std::mt19937& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> dist;
    cmatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complexd(dist(rng), dist(rng));
    return m;
}

inline density_matrix random_density(std::mt19937& rng, Eigen::Index dim = 4) {
    const cmatrix g = random_matrix(rng, dim, dim);
    cmatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return density_matrix::from(rho);
}

inline cmatrix random_unitary(std::mt19937& rng, Eigen::Index dim) {
    Eigen::HouseholderQR<cmatrix> qr(random_matrix(rng, dim, dim));
    return qr.householderQ() * cmatrix::Identity(dim, dim);
}

inline xstate_entries random_xstate(std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    xstate_entries e;
    e.u = uni(rng);
    e.x = uni(rng);
    e.y = uni(rng);
    e.v = uni(rng);
    const double s = e.u + e.x + e.y + e.v;
    e.u /= s;
    e.x /= s;
    e.y /= s;
    e.v /= s;
    std::uniform_real_distribution<double> frac(0.0, 0.999);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    e.z = std::polar(frac(rng) * std::sqrt(e.x * e.y), angle(rng));
    return e;
}

inline check_result make(const std::string& name, double worst, double tol) {
    std::ostringstream os;
    os << "worst " << worst << " vs tolerance " << tol;
    return {name, worst <= tol, os.str()};
}

inline std::vector<double> sample_times(int n, double t_max) {
    std::vector<double> ts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ts[std::size_t(i)] = t_max * double(i) / double(n - 1);
    return ts;
}

}  // namespace selftest_detail

inline std::vector<check_result> run_selftest(const selftest_options& opt = {}) {
    using namespace selftest_detail;
    std::vector<check_result> out;
    std::mt19937 rng(opt.seed);
    const model_params model{1.0, 0.2, 0.1};
    const bath_params bath{1.0, 0.1};

    {  // kron associativity
        double worst = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
            const cmatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2),
                          c = random_matrix(rng, 2, 2);
            worst = std::max(worst, max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))));
        }
        out.push_back(make("kron-associativity", worst, 1e-12));
    }

    {  // partial traces keep unit trace
        double worst = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
            const density_matrix rho = random_density(rng);
            for (subsystem keep : {subsystem::A, subsystem::B})
                worst = std::max(worst, std::abs(partial_trace(rho, keep).mat().trace() - complexd(1.0)));
        }
        out.push_back(make("partial-trace-unit-trace", worst, 1e-12));
    }

    {  // entropy invariance under unitary conjugation
        double worst = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
            const density_matrix rho = random_density(rng);
            const cmatrix u = random_unitary(rng, 4);
            const density_matrix rotated = density_matrix::from(u * rho.mat() * u.adjoint());
            worst = std::max(worst, std::abs(vn_entropy(rotated) - vn_entropy(rho)));
        }
        out.push_back(make("entropy-unitary-invariance", worst, 1e-9));
    }

    {  // eigh reconstruction
        double worst = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
            const cmatrix g = random_matrix(rng, 4, 4);
            const cmatrix h = 0.5 * (g + g.adjoint());
            const auto sol = eigh(h);
            worst = std::max(worst, max_abs(sol.eigenvectors * sol.eigenvalues.asDiagonal() *
                                                sol.eigenvectors.adjoint() -
                                            h));
        }
        out.push_back(make("eigh-reconstruction", worst, 1e-9));
    }

    {  // vec(A rho B) = spre(A) spost(B) vec(rho)
        auto pre = [&](const cmatrix& a) {
            return opt.row_stacking_vectorization ? kron(a, identity(a.rows())) : spre(a);
        };
        auto post = [&](const cmatrix& a) {
            return opt.row_stacking_vectorization ? kron(identity(a.rows()), a.transpose()) : spost(a);
        };
        double worst = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
            const cmatrix a = random_matrix(rng, 4, 4), rho = random_matrix(rng, 4, 4),
                          b = random_matrix(rng, 4, 4);
            worst = std::max(worst, (vec(a * rho * b) - pre(a) * post(b) * vec(rho)).cwiseAbs().maxCoeff());
        }
        out.push_back(make("vectorization-sandwich", worst, 1e-10));
    }

    const cmatrix h = build_hamiltonian(model);
    const superoperator sop = build_liouvillian(h, bath);

    {  // spectral invariants of the generator
        const double max_re = sop.eigenvalues.real().maxCoeff();
        int zero_modes = 0;
        for (Eigen::Index j = 0; j < sop.eigenvalues.size(); ++j)
            if (std::abs(sop.eigenvalues[j]) <= 1e-10) ++zero_modes;
        const bool ok = max_re <= 1e-10 && zero_modes == 1;
        std::ostringstream os;
        os << "max Re(s) = " << max_re << ", zero modes = " << zero_modes;
        out.push_back({"liouvillian-spectrum", ok, os.str()});
    }

    const density_matrix ground = density_matrix::pure(ground_state(model));
    const auto times = sample_times(opt.trajectory_samples, opt.t_max);
    const trajectory traj_diag = evolve_diag(sop, ground, times);
    const trajectory traj_rk4 =
        evolve_rk4(h, bath, ground, times, 0.5 * rk4_max_step(h, bath));

    {  // trace, hermiticity, positivity along both trajectories
        double worst_tr = 0.0, worst_herm = 0.0, worst_eig = 0.0;
        for (const trajectory* traj : {&traj_diag, &traj_rk4})
            for (const auto& pt : *traj) {
                worst_tr = std::max(worst_tr, pt.state.trace_defect());
                worst_herm = std::max(worst_herm, pt.state.hermiticity_defect());
                worst_eig = std::min(worst_eig, pt.state.min_eigenvalue());
            }
        const bool ok = worst_tr <= 1e-10 && worst_herm <= 1e-9 && worst_eig >= -1e-8;
        std::ostringstream os;
        os << "trace defect " << worst_tr << ", hermiticity defect " << worst_herm
           << ", min eigenvalue " << worst_eig;
        out.push_back({"trajectory-preservation", ok, os.str()});
    }

    {  // X-state closure
        double worst = 0.0;
        for (const auto& pt : traj_diag) worst = std::max(worst, off_pattern_magnitude(pt.state.mat()));
        out.push_back(make("xstate-closure", worst, 1e-9));
    }

    {  // backend equivalence
        double worst = 0.0;
        for (std::size_t i = 0; i < traj_diag.size(); ++i)
            worst = std::max(worst, max_abs(traj_diag[i].state.mat() - traj_rk4[i].state.mat()));
        out.push_back(make("backend-equivalence", worst, 1e-6));
    }

    {  // CPTP completeness over an (nbar, p) grid
        double worst = 0.0;
        for (double nbar : {0.0, 0.5, 1.0, 5.0})
            for (double p : {0.0, 0.25, 0.5, 1.0}) {
                cmatrix acc = cmatrix::Zero(2, 2);
                for (const cmatrix& k : kraus_ops(nbar, p)) acc += k.adjoint() * k;
                worst = std::max(worst, max_abs(acc - identity(2)));
            }
        out.push_back(make("cptp-completeness", worst, 1e-12));
    }

    {  // channel trajectory matches the master equation at J = 0
        const model_params free_model{0.0, model.D, model.omega};
        const superoperator sop0 = build_liouvillian(build_hamiltonian(free_model), bath);
        const trajectory me = evolve_diag(sop0, ground, times);
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double p =
                -std::expm1(-opt.p_rate_factor * bath.gamma * (2.0 * bath.nbar + 1.0) * times[i]);
            const density_matrix channel =
                apply_two_qubit_channel(ground, bath.nbar, std::clamp(p, 0.0, 1.0));
            worst = std::max(worst, max_abs(channel.mat() - me[i].state.mat()));
        }
        out.push_back(make("channel-lindblad-equivalence", worst, 1e-8));
    }

    {  // swap and phase invariance of the closed-form measures
        double worst = 0.0;
        for (int rep = 0; rep < 12; ++rep) {
            const xstate_entries e = random_xstate(rng);
            xstate_entries swapped = e;
            std::swap(swapped.u, swapped.v);
            std::swap(swapped.x, swapped.y);
            worst = std::max(worst, std::abs(discord_xstate(e).discord - discord_xstate(swapped).discord));
            worst = std::max(worst, std::abs(entanglement_xstate(e) - entanglement_xstate(swapped)));
            xstate_entries rotated = e;
            rotated.z = e.z * std::polar(1.0, 1.234 + 0.1 * rep);
            worst = std::max(worst, std::abs(discord_xstate(e).discord - discord_xstate(rotated).discord));
            worst = std::max(worst, std::abs(entanglement_xstate(e) - entanglement_xstate(rotated)));
        }
        out.push_back(make("discord-swap-phase-invariance", worst, 1e-12));
    }

    {  // closed form vs numeric discord on trajectory samples
        double worst_gap = 0.0, worst_under = 0.0;
        for (std::size_t i = 0; i < traj_diag.size(); i += 4) {
            const auto rep = compute_correlation_report(traj_diag[i].state);
            if (!rep.closed_form_discord) continue;
            worst_gap = std::max(worst_gap, std::abs(*rep.closed_form_discord - rep.discord));
            worst_under = std::max(worst_under, rep.discord - *rep.closed_form_discord);
        }
        const bool ok = worst_gap <= 1e-3 && worst_under <= 1e-9;
        std::ostringstream os;
        os << "|closed - numeric| " << worst_gap << ", numeric excess " << worst_under;
        out.push_back({"closed-form-discord-agreement", ok, os.str()});
    }

    return out;
}

inline bool all_passed(const std::vector<check_result>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace qdd
