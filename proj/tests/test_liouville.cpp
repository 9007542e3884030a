#include "qdd/liouville.hpp"

#include "qdd/spin_model.hpp"
#include "test_helpers.hpp"

#include <catch2/catch.hpp>

#include <random>

using namespace qdd;
using namespace qdd::testing;

namespace {

const model_params kModel{1.0, 0.2, 0.1};
const bath_params kBath{1.0, 0.1};

std::vector<double> uniform_times(double t_max, int n) {
    std::vector<double> ts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ts[std::size_t(i)] = t_max * double(i) / double(n - 1);
    return ts;
}

}  // namespace

TEST_CASE("vec and unvec") {
    std::mt19937 rng(31);
    SECTION("round trip is bit exact") {
        const cmatrix m = random_matrix(rng, 4, 4);
        const cmatrix back = unvec(vec(m));
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j) CHECK(back(i, j) == m(i, j));
    }
    SECTION("vec(I4) has ones at the column-stacking positions") {
        const cvector w = vec(identity(4));
        for (Eigen::Index k = 0; k < 16; ++k) {
            const double expected = (k % 5 == 0) ? 1.0 : 0.0;  // 0, 5, 10, 15
            CHECK(w(k) == complexd(expected, 0.0));
        }
    }
    SECTION("vec of |00><00| is the first basis vector") {
        cmatrix m = cmatrix::Zero(4, 4);
        m(0, 0) = 1.0;
        const cvector w = vec(m);
        CHECK(w(0) == complexd(1.0, 0.0));
        CHECK(w.tail(15).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("spre and spost") {
    std::mt19937 rng(32);
    SECTION("spre(I) is the identity") {
        CHECK(max_abs(spre(identity(4)) - identity(16)) == 0.0);
    }
    SECTION("sandwich identity on random triples") {
        for (int rep = 0; rep < 20; ++rep) {
            const cmatrix a = random_matrix(rng, 4, 4), rho = random_matrix(rng, 4, 4),
                          b = random_matrix(rng, 4, 4);
            CHECK((vec(a * rho * b) - spre(a) * spost(b) * vec(rho)).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SECTION("left and right actions commute") {
        for (int rep = 0; rep < 10; ++rep) {
            const cmatrix a = random_matrix(rng, 4, 4), b = random_matrix(rng, 4, 4);
            CHECK(max_abs(spre(a) * spost(b) - spost(b) * spre(a)) <= 1e-12);
        }
    }
}

TEST_CASE("Liouvillian construction") {
    SECTION("spectral invariants at the default parameters") {
        const superoperator sop = build_liouvillian(build_hamiltonian(kModel), kBath);
        CHECK(sop.eigenvalues.real().maxCoeff() <= 1e-10);
        int zero_modes = 0;
        for (Eigen::Index j = 0; j < 16; ++j)
            if (std::abs(sop.eigenvalues[j]) <= 1e-10) ++zero_modes;
        CHECK(zero_modes == 1);
        CHECK((vec(identity(4)).adjoint() * sop.gen).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(sop.diagonalizable);
    }
    SECTION("vanishing gamma leaves a purely imaginary spectrum") {
        const superoperator sop = build_liouvillian(build_hamiltonian(kModel), {1.0, 1e-12});
        CHECK(sop.eigenvalues.real().cwiseAbs().maxCoeff() <= 1e-9);
    }
    SECTION("single-qubit analogue shows the population-relaxation rate") {
        // 4x4 one-qubit Liouvillian assembled from the generic spre/spost
        // pieces; the population mode must sit at -2 gamma (2 nbar + 1).
        const double gamma = 0.13, nbar = 0.7;
        const cmatrix sm = sigma_minus(), sp = sigma_plus();
        cmatrix gen = (nbar + 1.0) * gamma *
                      (2.0 * spre(sm) * spost(sp) - spre(sp * sm) - spost(sp * sm));
        gen += nbar * gamma * (2.0 * spre(sp) * spost(sm) - spre(sm * sp) - spost(sm * sp));
        Eigen::ComplexEigenSolver<cmatrix> solver(gen);
        REQUIRE(solver.info() == Eigen::Success);
        bool found = false;
        for (Eigen::Index j = 0; j < 4; ++j)
            if (std::abs(solver.eigenvalues()[j] - complexd(-2.0 * gamma * (2.0 * nbar + 1.0), 0.0)) <=
                1e-10)
                found = true;
        CHECK(found);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(build_liouvillian(identity(2), kBath), validation_error);
        CHECK_THROWS_AS(build_liouvillian(build_hamiltonian(kModel), bath_params{-1.0, 0.1}),
                        validation_error);
        CHECK_THROWS_AS(build_liouvillian(build_hamiltonian(kModel), bath_params{1.0, 0.0}),
                        validation_error);
    }
}

TEST_CASE("spectral evolution") {
    const cmatrix h = build_hamiltonian(kModel);
    const superoperator sop = build_liouvillian(h, kBath);
    const density_matrix rho0 = density_matrix::pure(ground_state(kModel));

    SECTION("t = 0 returns the initial state") {
        const trajectory traj = evolve_diag(sop, rho0, {0.0});
        CHECK(max_abs(traj[0].state.mat() - rho0.mat()) <= 1e-10);
    }
    SECTION("long times reach the generator's null space") {
        const trajectory traj = evolve_diag(sop, rho0, {200.0 / kBath.gamma});
        // Independent oracle: the kernel of gen via full-pivot LU.
        Eigen::FullPivLU<cmatrix> lu(sop.gen);
        lu.setThreshold(1e-9);
        REQUIRE(lu.dimensionOfKernel() == 1);
        cmatrix null_state = unvec(cvector(lu.kernel().col(0)));
        null_state /= null_state.trace();
        CHECK(max_abs(traj[0].state.mat() - null_state) <= 1e-8);
        CHECK(max_abs(steady_state(sop).mat() - null_state) <= 1e-8);
    }
    SECTION("trajectory preserves trace, hermiticity and positivity") {
        const trajectory traj = evolve_diag(sop, rho0, uniform_times(30.0, 61));
        for (const auto& pt : traj) {
            CHECK(pt.state.trace_defect() <= 1e-10);
            CHECK(pt.state.hermiticity_defect() <= 1e-9);
            CHECK(pt.state.min_eigenvalue() >= -1e-8);
        }
    }
    SECTION("X pattern is closed under the dynamics") {
        const trajectory traj = evolve_diag(sop, rho0, uniform_times(30.0, 61));
        for (const auto& pt : traj) CHECK(off_pattern_magnitude(pt.state.mat()) <= 1e-9);
    }
    SECTION("mode table reproduces the trajectory components") {
        const cmatrix modes = mode_table(sop, rho0);
        for (double t : {0.0, 0.7, 3.1}) {
            cvector acc = cvector::Zero(16);
            for (Eigen::Index j = 0; j < 16; ++j)
                acc += modes.col(j) * std::exp(sop.eigenvalues[j] * t);
            const trajectory traj = evolve_diag(sop, rho0, {t});
            CHECK((acc - vec(traj[0].state.mat())).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
    SECTION("matrix-exponential fallback agrees with the spectral route") {
        const auto times = uniform_times(10.0, 11);
        const trajectory a = evolve_diag(sop, rho0, times);
        const trajectory b = evolve_expm(sop, rho0, times);
        for (std::size_t i = 0; i < times.size(); ++i)
            CHECK(max_abs(a[i].state.mat() - b[i].state.mat()) <= 1e-10);
    }
    SECTION("descending time lists are rejected") {
        CHECK_THROWS_AS(evolve_diag(sop, rho0, {1.0, 0.5}), validation_error);
        CHECK_THROWS_AS(evolve_diag(sop, rho0, {}), validation_error);
        CHECK_THROWS_AS(evolve_diag(sop, rho0, {-1.0}), validation_error);
    }
    SECTION("an ill-conditioned eigenbasis demands the fallback") {
        superoperator crippled = sop;
        crippled.diagonalizable = false;
        crippled.condition = 1e12;
        CHECK_THROWS_AS(evolve_diag(crippled, rho0, {1.0}), fallback_required_error);
        CHECK_THROWS_AS(mode_table(crippled, rho0), fallback_required_error);
        // evolve() reroutes through the matrix exponential
        const trajectory via_expm = evolve(crippled, rho0, {1.0});
        const trajectory via_diag = evolve(sop, rho0, {1.0});
        CHECK(max_abs(via_expm[0].state.mat() - via_diag[0].state.mat()) <= 1e-10);
    }
}

TEST_CASE("RK4 evolution") {
    const cmatrix h = build_hamiltonian(kModel);
    const superoperator sop = build_liouvillian(h, kBath);
    const density_matrix rho0 = density_matrix::pure(ground_state(kModel));
    const double bound = rk4_max_step(h, kBath);

    SECTION("t = 0 returns the initial state") {
        const trajectory traj = evolve_rk4(h, kBath, rho0, {0.0}, 0.5 * bound);
        CHECK(max_abs(traj[0].state.mat() - rho0.mat()) <= 1e-15);
    }
    SECTION("agrees with the spectral route over the default scenario") {
        const auto times = uniform_times(30.0, 61);
        const trajectory a = evolve_diag(sop, rho0, times);
        const trajectory b = evolve_rk4(h, kBath, rho0, times, 0.5 * bound);
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            worst = std::max(worst, max_abs(a[i].state.mat() - b[i].state.mat()));
        CHECK(worst <= 1e-6);
    }
    SECTION("halving the step shrinks the error by roughly 16x") {
        // Start from |10>, which is not an eigenstate, so the Hamiltonian
        // error term is active and the truncation error dominates roundoff.
        const density_matrix sep = basis_projector(2);
        const auto times = uniform_times(10.0, 6);
        const trajectory exact = evolve_diag(sop, sep, times);
        auto max_err = [&](double dt) {
            const trajectory approx = evolve_rk4(h, kBath, sep, times, dt);
            double worst = 0.0;
            for (std::size_t i = 0; i < times.size(); ++i)
                worst = std::max(worst, max_abs(exact[i].state.mat() - approx[i].state.mat()));
            return worst;
        };
        const double coarse = max_err(bound);
        const double fine = max_err(0.5 * bound);
        CHECK(coarse > 1e-12);  // above the roundoff floor
        const double ratio = coarse / fine;
        CHECK(ratio >= 8.0);
        CHECK(ratio <= 32.0);
    }
    SECTION("too large a step is rejected") {
        CHECK_THROWS_AS(evolve_rk4(h, kBath, rho0, {1.0}, 2.0 * bound), validation_error);
        CHECK_THROWS_AS(evolve_rk4(h, kBath, rho0, {1.0}, 0.0), validation_error);
    }
}
