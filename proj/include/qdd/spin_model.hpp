#pragma once

// Two-qubit Heisenberg model with an asymmetric-anisotropic (DM) coupling
// along z: H = (omega/2)(sz_A + sz_B)
//            + (J/2) [ sum_a s^a_A s^a_B + D (sx_A sy_B - sy_A sx_B) ].
// Units: hbar = k_B = 1; energies and rates share one unit, time is its
// inverse.

#include "qdd/qmat.hpp"

#include <algorithm>
#include <array>

namespace qdd {

struct degenerate_ground_error : validation_error {
    degenerate_ground_error()
        : validation_error("ground state is degenerate; refusing to pick an arbitrary member") {}
};

struct model_params {
    double J = 1.0;      // exchange coupling, >= 0 (antiferromagnetic)
    double D = 0.0;      // DM z component
    double omega = 0.0;  // local field

    void validate() const {
        if (!std::isfinite(J) || !std::isfinite(D) || !std::isfinite(omega))
            throw validation_error("model_params: parameters must be finite");
        if (J < 0.0) throw validation_error("model_params: J must be >= 0");
    }
};

inline cmatrix build_hamiltonian(const model_params& p) {
    p.validate();
    const cmatrix sx = sigma_x(), sy = sigma_y(), sz = sigma_z(), id = identity(2);
    cmatrix h = 0.5 * p.omega * (kron(sz, id) + kron(id, sz));
    h += 0.5 * p.J * (kron(sx, sx) + kron(sy, sy) + kron(sz, sz));
    h += 0.5 * p.J * p.D * (kron(sx, sy) - kron(sy, sx));
    return h;
}

/// The four energy levels in closed form:
/// J(-1/2 -+ |eta|) on the {|01>, |10>} block with eta = 1 + iD, and
/// J/2 -+ omega on |00>, |11>. Unsorted.
inline std::array<double, 4> closed_form_levels(const model_params& p) {
    p.validate();
    const double band = std::abs(complexd(1.0, p.D));
    return {p.J * (-0.5 - band), p.J * (-0.5 + band), 0.5 * p.J - p.omega, 0.5 * p.J + p.omega};
}

struct spectrum_record {
    Eigen::VectorXd eigenvalues;  // ascending
    cmatrix eigenvectors;         // columns, orthonormal
    complexd eta;                 // 1 + iD
};

/// Numeric spectrum reconciled against the closed forms; a mismatch beyond
/// 1e-9 signals a convention bug somewhere and is treated as fatal.
inline spectrum_record exact_spectrum(const model_params& p) {
    const eigh_result sol = eigh(build_hamiltonian(p));
    std::array<double, 4> closed = closed_form_levels(p);
    std::sort(closed.begin(), closed.end());
    for (int k = 0; k < 4; ++k)
        if (std::abs(sol.eigenvalues[k] - closed[std::size_t(k)]) > 1e-9)
            throw numeric_error("exact_spectrum: numeric level " + std::to_string(sol.eigenvalues[k]) +
                                " disagrees with closed form " + std::to_string(closed[std::size_t(k)]));
    return {sol.eigenvalues, sol.eigenvectors, complexd(1.0, p.D)};
}

/// Minimum-energy eigenvector, unit norm. The global phase is fixed by
/// making the |01> component real positive (largest component when the
/// ground level lives outside the middle block). Degenerate ground levels
/// (gap below 1e-12) are an error.
inline cvector ground_state(const model_params& p) {
    const spectrum_record s = exact_spectrum(p);
    if (s.eigenvalues[1] - s.eigenvalues[0] < 1e-12) throw degenerate_ground_error();
    cvector g = s.eigenvectors.col(0);
    Eigen::Index ref = 1;
    if (std::abs(g(1)) <= 1e-8) g.cwiseAbs().maxCoeff(&ref);
    g *= std::conj(g(ref)) / std::abs(g(ref));
    return g;
}

/// Gibbs state exp(-H/T)/Z at temperature T > 0 (k_B = 1).
inline density_matrix thermal_state(const model_params& p, double temperature) {
    if (!std::isfinite(temperature) || !(temperature > 0.0))
        throw validation_error("thermal_state: temperature must be > 0 (use ground_state for T -> 0)");
    const spectrum_record s = exact_spectrum(p);
    // Weights relative to the ground level so large 1/T cannot overflow.
    Eigen::VectorXd w = (-(s.eigenvalues.array() - s.eigenvalues[0]) / temperature).exp();
    w /= w.sum();
    return density_matrix::from(s.eigenvectors * w.asDiagonal() * s.eigenvectors.adjoint());
}

/// Bose-Einstein mean occupation of the reservoir mode at frequency
/// omega_E and reservoir temperature T_res.
inline double nbar_from_temperature(double omega_E, double T_res) {
    if (!std::isfinite(omega_E) || !(omega_E > 0.0))
        throw validation_error("nbar_from_temperature: omega_E must be > 0");
    if (!std::isfinite(T_res) || !(T_res >= 0.0))
        throw validation_error("nbar_from_temperature: T_res must be >= 0");
    if (T_res == 0.0) return 0.0;
    return 1.0 / std::expm1(omega_E / T_res);
}

}  // namespace qdd
