#pragma once

// Small dense complex linear algebra for one- and two-qubit simulations:
// Kronecker products, partial traces, Hermitian eigendecomposition, von
// Neumann entropy and X-state access.
//
// Matrices are stored column-major (Eigen's default). The vectorization in
// liouville.hpp is column-stacking, derived from this storage order; do not
// mix conventions.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qdd {

using complexd = std::complex<double>;
using cmatrix = Eigen::MatrixXcd;
using cvector = Eigen::VectorXcd;

/// Bad caller input (parameters, ranges, file contents). The CLI maps this
/// to exit code 2.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numeric invariant failed to hold (positivity loss, spectral drift,
/// backend disagreement). The CLI maps this to exit code 3.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Matrix has entries outside the diagonal/anti-diagonal X pattern.
struct xstate_shape_error : validation_error {
    double max_off_pattern;
    explicit xstate_shape_error(double worst)
        : validation_error("matrix does not have the X pattern; largest off-pattern magnitude = " +
                           std::to_string(worst)),
          max_off_pattern(worst) {}
};

// Eigenvalues below this floor contribute zero to entropies (0 log 0 := 0);
// it also absorbs the small negatives diagonalization noise produces.
inline constexpr double kEntropyEigenvalueFloor = 1e-14;

inline double max_abs(const cmatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const cmatrix& m) { return max_abs(m - m.adjoint()); }

namespace detail {

inline void require_finite(const cmatrix& m, const char* what) {
    if (!m.allFinite()) throw validation_error(std::string(what) + ": non-finite entries");
}

}  // namespace detail

/// -p log2(p) with the floor above.
inline double plog2p(double p) {
    if (p < kEntropyEigenvalueFloor) return 0.0;
    return -p * std::log2(p);
}

inline double binary_entropy_bits(double p) { return plog2p(p) + plog2p(1.0 - p); }

// Pauli operators in the basis (|0>, |1>) with sigma_z |0> = -|0> and
// sigma_z |1> = +|1>: |0> is the qubit ground state. sigma_y is chosen so
// that sigma_x sigma_y = i sigma_z still holds.
inline cmatrix sigma_x() {
    cmatrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

inline cmatrix sigma_y() {
    cmatrix s(2, 2);
    s << 0, complexd(0, 1), complexd(0, -1), 0;
    return s;
}

inline cmatrix sigma_z() {
    cmatrix s(2, 2);
    s << -1, 0, 0, 1;
    return s;
}

/// Raising operator: |0> -> |1>.
inline cmatrix sigma_plus() {
    cmatrix s(2, 2);
    s << 0, 0, 1, 0;
    return s;
}

/// Lowering operator: |1> -> |0>.
inline cmatrix sigma_minus() {
    cmatrix s(2, 2);
    s << 0, 1, 0, 0;
    return s;
}

inline cmatrix identity(Eigen::Index n) { return cmatrix::Identity(n, n); }

/// Kronecker product; for two-qubit operators kron(A, B) acts as A on the
/// first (left) qubit and B on the second, with basis order
/// |00>, |01>, |10>, |11>.
inline cmatrix kron(const cmatrix& a, const cmatrix& b) {
    cmatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

struct eigh_result {
    Eigen::VectorXd eigenvalues;  // ascending
    cmatrix eigenvectors;         // columns, orthonormal
};

/// Hermitian eigendecomposition. Rejects inputs whose hermiticity defect
/// exceeds 1e-10.
inline eigh_result eigh(const cmatrix& h) {
    if (h.rows() != h.cols() || h.rows() < 1)
        throw validation_error("eigh: expected a square matrix");
    detail::require_finite(h, "eigh");
    const double defect = hermiticity_defect(h);
    if (defect > 1e-10)
        throw validation_error("eigh: matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    Eigen::SelfAdjointEigenSolver<cmatrix> solver(0.5 * (h + h.adjoint()));
    if (solver.info() != Eigen::Success) throw numeric_error("eigh: eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Hermitian, unit-trace, positive semidefinite operator on one or two
/// qubits. Construction symmetrizes the input and records the raw
/// hermiticity defect, minimum eigenvalue and trace deviation; eigenvalue
/// noise in [-1e-8, 0) is clamped to zero and the state renormalized.
/// Anything worse is rejected. Instances are immutable.
class density_matrix {
public:
    static density_matrix from(const cmatrix& m, double herm_tol = 1e-8) {
        if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4))
            throw validation_error("density_matrix: expected a 2x2 or 4x4 matrix");
        detail::require_finite(m, "density_matrix");
        const double defect = qdd::hermiticity_defect(m);
        if (defect > herm_tol)
            throw numeric_error("density_matrix: hermiticity defect " + std::to_string(defect) +
                                " exceeds tolerance " + std::to_string(herm_tol));
        cmatrix sym = 0.5 * (m + m.adjoint());
        const double trace_defect = std::abs(sym.trace() - complexd(1.0));
        if (trace_defect > 1e-10)
            throw numeric_error("density_matrix: trace deviates from one by " + std::to_string(trace_defect));
        Eigen::SelfAdjointEigenSolver<cmatrix> solver(sym);
        if (solver.info() != Eigen::Success)
            throw numeric_error("density_matrix: eigendecomposition failed");
        const double min_eig = solver.eigenvalues().minCoeff();
        if (min_eig < -1e-8)
            throw numeric_error("density_matrix: negative eigenvalue " + std::to_string(min_eig));
        Eigen::VectorXd lam = solver.eigenvalues();
        if (min_eig < 0.0) {
            lam = lam.cwiseMax(0.0);
            lam /= lam.sum();
            sym = solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().adjoint();
            sym = 0.5 * (sym + sym.adjoint());
        } else {
            const double tr = sym.trace().real();
            sym /= tr;
            lam /= tr;
        }
        return density_matrix(std::move(sym), std::move(lam), defect, min_eig, trace_defect);
    }

    static density_matrix pure(const cvector& psi) {
        if (psi.size() != 2 && psi.size() != 4)
            throw validation_error("density_matrix: expected a 2- or 4-component state vector");
        const double n = psi.norm();
        if (!(std::abs(n - 1.0) <= 1e-10))
            throw validation_error("density_matrix: state vector is not normalized");
        return from(psi * psi.adjoint() / (n * n));
    }

    const cmatrix& mat() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

    /// Eigenvalues of the stored (cleaned) operator, ascending.
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

    double hermiticity_defect() const { return herm_defect_; }
    double min_eigenvalue() const { return min_eig_; }
    double trace_defect() const { return trace_defect_; }

private:
    density_matrix(cmatrix m, Eigen::VectorXd lam, double hd, double me, double td)
        : mat_(std::move(m)), eigenvalues_(std::move(lam)),
          herm_defect_(hd), min_eig_(me), trace_defect_(td) {}

    cmatrix mat_;
    Eigen::VectorXd eigenvalues_;
    double herm_defect_;
    double min_eig_;
    double trace_defect_;
};

/// Von Neumann entropy in bits.
inline double vn_entropy(const density_matrix& rho) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < rho.eigenvalues().size(); ++i) s += plog2p(rho.eigenvalues()[i]);
    return std::max(s, 0.0);
}

enum class subsystem { A, B };

/// Reduced state of the kept qubit of a two-qubit state.
inline density_matrix partial_trace(const density_matrix& rho, subsystem keep) {
    if (rho.dim() != 4) throw validation_error("partial_trace: expected a two-qubit state");
    const cmatrix& m = rho.mat();
    cmatrix out(2, 2);
    switch (keep) {
        case subsystem::A:
            for (Eigen::Index a = 0; a < 2; ++a)
                for (Eigen::Index c = 0; c < 2; ++c) out(a, c) = m(2 * a, 2 * c) + m(2 * a + 1, 2 * c + 1);
            break;
        case subsystem::B:
            for (Eigen::Index b = 0; b < 2; ++b)
                for (Eigen::Index c = 0; c < 2; ++c) out(b, c) = m(b, c) + m(2 + b, 2 + c);
            break;
        default:
            throw validation_error("partial_trace: invalid subsystem tag");
    }
    return density_matrix::from(out);
}

/// Entries of an X-shaped two-qubit state: diagonal populations u, x, y, v
/// in the basis order |00>, |01>, |10>, |11> and the coherence z between
/// |01> and |10> (matrix position (1, 2)).
struct xstate_entries {
    double u = 0.0;
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;
    complexd z{0.0, 0.0};

    void validate() const {
        if (!std::isfinite(u) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(v) ||
            !std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw validation_error("xstate: non-finite entries");
        if (u < -1e-10 || x < -1e-10 || y < -1e-10 || v < -1e-10)
            throw validation_error("xstate: negative population");
        if (std::abs(u + x + y + v - 1.0) > 1e-10)
            throw validation_error("xstate: populations do not sum to one");
        if (std::norm(z) > x * y + 1e-10)
            throw validation_error("xstate: |z|^2 exceeds x*y (inner block not positive)");
    }
};

inline cmatrix xstate_matrix(const xstate_entries& e) {
    cmatrix m = cmatrix::Zero(4, 4);
    m(0, 0) = e.u;
    m(1, 1) = e.x;
    m(2, 2) = e.y;
    m(3, 3) = e.v;
    m(1, 2) = e.z;
    m(2, 1) = std::conj(e.z);
    return m;
}

/// Largest magnitude among entries outside the X pattern. The pattern is
/// the diagonal plus the inner anti-diagonal pair (1,2)/(2,1); the outer
/// coherence (0,3) never appears in this model and counts as off-pattern.
inline double off_pattern_magnitude(const cmatrix& m) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            const bool on_pattern = (i == j) || (i == 1 && j == 2) || (i == 2 && j == 1);
            if (!on_pattern) worst = std::max(worst, std::abs(m(i, j)));
        }
    return worst;
}

inline bool is_xstate(const density_matrix& rho, double tol = 1e-9) {
    return rho.dim() == 4 && off_pattern_magnitude(rho.mat()) <= tol;
}

/// Reads the X entries off a two-qubit state; entries outside the pattern
/// larger than 1e-9 raise xstate_shape_error carrying the worst offender.
inline xstate_entries as_xstate(const density_matrix& rho) {
    if (rho.dim() != 4) throw validation_error("as_xstate: expected a two-qubit state");
    const cmatrix& m = rho.mat();
    const double worst = off_pattern_magnitude(m);
    if (worst > 1e-9) throw xstate_shape_error(worst);
    xstate_entries e;
    e.u = m(0, 0).real();
    e.x = m(1, 1).real();
    e.y = m(2, 2).real();
    e.v = m(3, 3).real();
    e.z = m(1, 2);
    e.validate();
    return e;
}

}  // namespace qdd
