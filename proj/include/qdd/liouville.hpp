#pragma once

// Vectorized Lindblad dynamics. Density matrices are column-stacked
// (columns concatenated top to bottom, matching the column-major storage
// declared in qmat.hpp), so
//     vec(A rho B) = spre(A) * spost(B) * vec(rho)
// with spre(A) = I (x) A and spost(B) = B^T (x) I. Evolution goes through
// the spectral decomposition of the 16x16 generator; a fixed-step RK4
// integrator provides an independent second route, and scaled-and-squared
// matrix exponentials back up defective eigenbases.

#include "qdd/qmat.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace qdd {

/// The generator's eigenbasis is too ill-conditioned for spectral
/// evolution; use evolve_expm or evolve_rk4 instead.
struct fallback_required_error : numeric_error {
    using numeric_error::numeric_error;
};

struct bath_params {
    double nbar = 0.0;   // mean thermal occupation, identical for both qubits
    double gamma = 0.1;  // spontaneous-emission rate, identical for both qubits

    void validate() const {
        if (!std::isfinite(nbar) || !std::isfinite(gamma))
            throw validation_error("bath_params: parameters must be finite");
        if (nbar < 0.0) throw validation_error("bath_params: nbar must be >= 0");
        if (!(gamma > 0.0)) throw validation_error("bath_params: gamma must be > 0");
    }
};

/// Column-stacking vectorization; exact round trip with unvec.
inline cvector vec(const cmatrix& m) {
    return Eigen::Map<const cvector>(m.data(), m.size());
}

inline cmatrix unvec(const cvector& w) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(w.size()))));
    if (n * n != w.size()) throw validation_error("unvec: length is not a perfect square");
    return Eigen::Map<const cmatrix>(w.data(), n, n);
}

/// vec(A rho) = spre(A) vec(rho).
inline cmatrix spre(const cmatrix& a) {
    if (a.rows() != a.cols()) throw validation_error("spre: expected a square matrix");
    return kron(identity(a.rows()), a);
}

/// vec(rho A) = spost(A) vec(rho).
inline cmatrix spost(const cmatrix& a) {
    if (a.rows() != a.cols()) throw validation_error("spost: expected a square matrix");
    return kron(a.transpose(), identity(a.rows()));
}

struct superoperator {
    cmatrix gen;                // 16x16 generator
    cvector eigenvalues;        // s_j
    cmatrix eigenvectors;       // U, columns; gen = U diag(s) U^-1 when diagonalizable
    cmatrix eigenvectors_inv;   // U^-1 (empty when not diagonalizable)
    double condition = 0.0;     // 2-norm condition estimate of U
    bool diagonalizable = false;
};

namespace detail {

inline std::array<cmatrix, 2> two_qubit_lowering() {
    return {kron(sigma_minus(), identity(2)), kron(identity(2), sigma_minus())};
}

inline void check_hamiltonian(const cmatrix& h) {
    if (h.rows() != 4 || h.cols() != 4)
        throw validation_error("expected a 4x4 two-qubit Hamiltonian");
    if (hermiticity_defect(h) > 1e-10)
        throw validation_error("Hamiltonian must be Hermitian");
}

inline void check_times(const std::vector<double>& times) {
    if (times.empty()) throw validation_error("times: list must be nonempty");
    double prev = 0.0;
    for (double t : times) {
        if (!std::isfinite(t) || t < 0.0) throw validation_error("times: entries must be finite and >= 0");
        if (t < prev) throw validation_error("times: list must be ascending");
        prev = t;
    }
}

}  // namespace detail

/// Lindblad generator for two qubits in independent thermal reservoirs:
/// gen = -i(spre(H) - spost(H))
///     + sum_i (nbar+1) gamma (2 spre(sm_i) spost(sp_i) - spre(sp_i sm_i) - spost(sp_i sm_i))
///     + sum_i  nbar    gamma (2 spre(sp_i) spost(sm_i) - spre(sm_i sp_i) - spost(sm_i sp_i)).
/// Construction validates the spectral invariants: Re(s_j) <= 1e-10, a
/// zero mode exists, and vec(I)^dag gen = 0 (trace preservation).
inline superoperator build_liouvillian(const cmatrix& h, const bath_params& bath) {
    detail::check_hamiltonian(h);
    bath.validate();

    superoperator sop;
    sop.gen = complexd(0.0, -1.0) * (spre(h) - spost(h));
    const double down = (bath.nbar + 1.0) * bath.gamma;
    const double up = bath.nbar * bath.gamma;
    for (const cmatrix& sm : detail::two_qubit_lowering()) {
        const cmatrix sp = sm.adjoint();
        const cmatrix sp_sm = sp * sm;
        const cmatrix sm_sp = sm * sp;
        sop.gen += down * (2.0 * spre(sm) * spost(sp) - spre(sp_sm) - spost(sp_sm));
        sop.gen += up * (2.0 * spre(sp) * spost(sm) - spre(sm_sp) - spost(sm_sp));
    }

    Eigen::ComplexEigenSolver<cmatrix> solver(sop.gen);
    if (solver.info() != Eigen::Success)
        throw numeric_error("build_liouvillian: eigendecomposition failed");
    sop.eigenvalues = solver.eigenvalues();
    sop.eigenvectors = solver.eigenvectors();

    Eigen::JacobiSVD<cmatrix> svd(sop.eigenvectors);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    sop.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    sop.diagonalizable = std::isfinite(sop.condition) && sop.condition < 1e8;
    if (sop.diagonalizable) sop.eigenvectors_inv = sop.eigenvectors.inverse();

    const double max_re = sop.eigenvalues.real().maxCoeff();
    if (max_re > 1e-10)
        throw numeric_error("build_liouvillian: eigenvalue with positive real part " + std::to_string(max_re));
    if (sop.eigenvalues.cwiseAbs().minCoeff() > 1e-10)
        throw numeric_error("build_liouvillian: no zero mode; steady state missing");
    const double trace_row = (vec(identity(4)).adjoint() * sop.gen).cwiseAbs().maxCoeff();
    if (trace_row > 1e-10)
        throw numeric_error("build_liouvillian: trace-preservation row violated by " + std::to_string(trace_row));
    return sop;
}

struct trajectory_point {
    double t;
    density_matrix state;
};

using trajectory = std::vector<trajectory_point>;

/// Per-initial-state coefficient table: component i of the vectorized state
/// evolves as rho_i(t) = sum_j a_ij exp(s_j t).
inline cmatrix mode_table(const superoperator& sop, const density_matrix& rho0) {
    if (!sop.diagonalizable)
        throw fallback_required_error("mode_table: eigenbasis condition " + std::to_string(sop.condition) +
                                      " too large");
    const cvector c = sop.eigenvectors_inv * vec(rho0.mat());
    return sop.eigenvectors * c.asDiagonal();
}

/// Spectral-decomposition evolution. Each output state is re-symmetrized
/// and validated; raw defect magnitudes stay recorded on the state.
inline trajectory evolve_diag(const superoperator& sop, const density_matrix& rho0,
                              const std::vector<double>& times) {
    detail::check_times(times);
    if (rho0.dim() != 4) throw validation_error("evolve_diag: expected a two-qubit state");
    if (!sop.diagonalizable)
        throw fallback_required_error("evolve_diag: eigenbasis condition " + std::to_string(sop.condition) +
                                      " exceeds 1e8; use evolve_expm or evolve_rk4");
    const cvector c = sop.eigenvectors_inv * vec(rho0.mat());
    trajectory out;
    out.reserve(times.size());
    for (double t : times) {
        cvector amp(c.size());
        for (Eigen::Index j = 0; j < c.size(); ++j) amp[j] = std::exp(sop.eigenvalues[j] * t) * c[j];
        out.push_back({t, density_matrix::from(unvec(sop.eigenvectors * amp))});
    }
    return out;
}

/// Scaled-and-squared matrix exponential per time point; the fallback when
/// the eigenbasis is defective.
inline trajectory evolve_expm(const superoperator& sop, const density_matrix& rho0,
                              const std::vector<double>& times) {
    detail::check_times(times);
    if (rho0.dim() != 4) throw validation_error("evolve_expm: expected a two-qubit state");
    const cvector w0 = vec(rho0.mat());
    trajectory out;
    out.reserve(times.size());
    for (double t : times) {
        const cmatrix propagator = (sop.gen * t).exp();
        out.push_back({t, density_matrix::from(unvec(propagator * w0))});
    }
    return out;
}

/// evolve_diag when the eigenbasis allows it, evolve_expm otherwise.
inline trajectory evolve(const superoperator& sop, const density_matrix& rho0,
                         const std::vector<double>& times) {
    if (sop.diagonalizable) return evolve_diag(sop, rho0, times);
    return evolve_expm(sop, rho0, times);
}

/// Normalized right null vector of the generator.
inline density_matrix steady_state(const superoperator& sop) {
    Eigen::Index j = 0;
    sop.eigenvalues.cwiseAbs().minCoeff(&j);
    cmatrix m = unvec(sop.eigenvectors.col(j));
    const complexd tr = m.trace();
    if (std::abs(tr) < 1e-8) throw numeric_error("steady_state: null vector is traceless");
    m /= tr;
    return density_matrix::from(m);
}

inline double hermitian_spectral_norm(const cmatrix& h) {
    return eigh(h).eigenvalues.cwiseAbs().maxCoeff();
}

/// Largest admissible RK4 step for the given problem.
inline double rk4_max_step(const cmatrix& h, const bath_params& bath) {
    detail::check_hamiltonian(h);
    bath.validate();
    return 0.01 / (bath.gamma * (2.0 * bath.nbar + 1.0) + hermitian_spectral_norm(h));
}

namespace detail {

// Right-hand side of the master equation in plain 4x4 matrix algebra.
// Deliberately does not touch spre/spost so the two evolution routes stay
// independent.
struct lindblad_rhs {
    cmatrix h;
    std::array<cmatrix, 2> sm, sp, sp_sm, sm_sp;
    double down, up;

    lindblad_rhs(const cmatrix& hamiltonian, const bath_params& bath)
        : h(hamiltonian),
          down((bath.nbar + 1.0) * bath.gamma),
          up(bath.nbar * bath.gamma) {
        const auto lowering = two_qubit_lowering();
        for (int i = 0; i < 2; ++i) {
            sm[std::size_t(i)] = lowering[std::size_t(i)];
            sp[std::size_t(i)] = lowering[std::size_t(i)].adjoint();
            sp_sm[std::size_t(i)] = sp[std::size_t(i)] * sm[std::size_t(i)];
            sm_sp[std::size_t(i)] = sm[std::size_t(i)] * sp[std::size_t(i)];
        }
    }

    cmatrix operator()(const cmatrix& rho) const {
        cmatrix d = complexd(0.0, -1.0) * (h * rho - rho * h);
        for (std::size_t i = 0; i < 2; ++i) {
            d += down * (2.0 * sm[i] * rho * sp[i] - rho * sp_sm[i] - sp_sm[i] * rho);
            d += up * (2.0 * sp[i] * rho * sm[i] - rho * sm_sp[i] - sm_sp[i] * rho);
        }
        return d;
    }
};

}  // namespace detail

/// Classical fixed-step 4th-order integration of the master equation,
/// marching from t = 0. Independent of the spectral route.
inline trajectory evolve_rk4(const cmatrix& h, const bath_params& bath, const density_matrix& rho0,
                             const std::vector<double>& times, double dt) {
    detail::check_times(times);
    if (rho0.dim() != 4) throw validation_error("evolve_rk4: expected a two-qubit state");
    const double bound = rk4_max_step(h, bath);
    if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12))
        throw validation_error("evolve_rk4: step " + std::to_string(dt) + " exceeds the bound " +
                               std::to_string(bound));

    const detail::lindblad_rhs rhs(h, bath);
    cmatrix y = rho0.mat();
    double now = 0.0;
    trajectory out;
    out.reserve(times.size());
    for (double t : times) {
        const double span = t - now;
        if (span > 0.0) {
            const auto n = std::max<long long>(1, std::llround(std::ceil(span / dt - 1e-12)));
            const double step = span / double(n);
            for (long long k = 0; k < n; ++k) {
                const cmatrix k1 = rhs(y);
                const cmatrix k2 = rhs(y + 0.5 * step * k1);
                const cmatrix k3 = rhs(y + 0.5 * step * k2);
                const cmatrix k4 = rhs(y + step * k3);
                y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            now = t;
        }
        out.push_back({t, density_matrix::from(y)});
    }
    return out;
}

}  // namespace qdd
