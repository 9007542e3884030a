#pragma once

// J = 0 closed form: the finite-temperature amplitude-damping channel per
// qubit, the two-qubit product channel, and the closed-form entries of the
// evolved Bell state. The exchange probability p(t) = 1 - exp(-2 gamma
// (2 nbar + 1) t) is calibrated so the channel's population relaxation
// matches the Lindblad generator exactly.

#include "qdd/qmat.hpp"

#include <array>
#include <cmath>

namespace qdd {

struct channel_params {
    double nbar = 0.0;   // mean thermal occupation
    double gamma = 0.1;  // spontaneous-emission rate
    double p = 0.0;      // exchange probability at the time of interest

    void validate() const {
        if (!std::isfinite(nbar) || !std::isfinite(gamma) || !std::isfinite(p))
            throw validation_error("channel_params: parameters must be finite");
        if (nbar < 0.0) throw validation_error("channel_params: nbar must be >= 0");
        if (gamma < 0.0) throw validation_error("channel_params: gamma must be >= 0");
        if (p < -1e-12 || p > 1.0 + 1e-12)
            throw validation_error("channel_params: p must lie in [0, 1]");
    }
};

/// Probability of the qubit having exchanged a quantum with its reservoir
/// after time t.
inline double p_of_t(double gamma, double nbar, double t) {
    if (!std::isfinite(t) || t < 0.0) throw validation_error("p_of_t: t must be >= 0");
    channel_params{nbar, gamma, 0.0}.validate();
    return -std::expm1(-2.0 * gamma * (2.0 * nbar + 1.0) * t);
}

/// The four Kraus operators of the single-qubit channel, basis (|0>, |1>)
/// with |0> the ground state. Satisfy sum_j K_j^dag K_j = I.
inline std::array<cmatrix, 4> kraus_ops(double nbar, double p) {
    channel_params{nbar, 1.0, p}.validate();
    p = std::clamp(p, 0.0, 1.0);
    const double q = 2.0 * nbar + 1.0;
    const double keep = std::sqrt(1.0 - p);

    cmatrix k0(2, 2), k1(2, 2), k2(2, 2), k3(2, 2);
    k0 << 1.0, 0.0, 0.0, keep;
    k0 *= std::sqrt((nbar + 1.0) / q);
    k1 << 0.0, 1.0, 0.0, 0.0;  // |0><1|, decay
    k1 *= std::sqrt((nbar + 1.0) * p / q);
    k2 << keep, 0.0, 0.0, 1.0;
    k2 *= std::sqrt(nbar / q);
    k3 << 0.0, 0.0, 1.0, 0.0;  // |1><0|, absorption
    k3 *= std::sqrt(nbar * p / q);
    return {k0, k1, k2, k3};
}

/// Product channel on both qubits: sum_{j,j'} (K_j (x) K_j') rho (...)^dag.
inline density_matrix apply_two_qubit_channel(const density_matrix& rho, double nbar, double p) {
    if (rho.dim() != 4) throw validation_error("apply_two_qubit_channel: expected a two-qubit state");
    const auto kraus = kraus_ops(nbar, p);
    cmatrix out = cmatrix::Zero(4, 4);
    for (const cmatrix& ka : kraus)
        for (const cmatrix& kb : kraus) {
            const cmatrix kk = kron(ka, kb);
            out += kk * rho.mat() * kk.adjoint();
        }
    return density_matrix::from(out);
}

struct bell_channel_state {
    xstate_entries entries;
    double theta1;  // closed form sqrt(p^2/(2 nbar + 1)^2 + (1-p)^2)
};

/// Closed-form X entries of the channel applied to the maximally entangled
/// (|01> + e^{i a}|10>)/sqrt(2) state. Entries follow the |00>-first basis
/// ordering used everywhere in this library (u is the |00> population);
/// all downstream measures are invariant under the simultaneous swap
/// (u <-> v, x <-> y), so the labeling cannot change any figure.
inline bell_channel_state closed_form_bell(double nbar, double p) {
    channel_params{nbar, 1.0, p}.validate();
    p = std::clamp(p, 0.0, 1.0);
    const double q = 2.0 * nbar + 1.0;
    const double absorb = nbar * p / q;         // 0 -> 1 transfer probability
    const double decay = (nbar + 1.0) * p / q;  // 1 -> 0 transfer probability

    xstate_entries e;
    e.u = decay * (1.0 - absorb);
    e.v = absorb * (1.0 - decay);
    e.x = 0.5 * (absorb * decay + (1.0 - absorb) * (1.0 - decay));
    e.z = complexd(0.5 * (1.0 - p), 0.0);
    e.y = 1.0 - e.u - e.x - e.v;
    return {e, std::hypot(p / q, 1.0 - p)};
}

}  // namespace qdd
