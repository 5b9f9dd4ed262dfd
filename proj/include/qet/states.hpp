// states.hpp — two-qudit and two-qubit pure states: construction, Schmidt
// decomposition, entanglement entropy.
//
// A two-qudit state is held as its d_a x d_b coefficient matrix psi; the
// vectorization of psi^T gives the state vector. Local operations act as
// psi -> O_a psi O_b^T. States may be sub-normalized: branch probabilities
// live in the squared Frobenius norm.

#pragma once

#include "qet/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qet {

inline double entropy_bits(const std::vector<double>& probs) {
    double e = 0.0;
    for (double p : probs)
        if (p > 0.0) e -= p * std::log2(p);
    return e;
}

struct TwoQuditState {
    CMatrix psi;

    explicit TwoQuditState(CMatrix coefficients) : psi(std::move(coefficients)) {
        const double n2 = psi.frobenius_norm2();
        if (!(n2 > 0.0) || n2 > 1.0 + 1e-9 || !psi.is_finite())
            throw std::invalid_argument("TwoQuditState: squared norm must lie in (0, 1]");
    }

    int da() const { return psi.rows(); }
    int db() const { return psi.cols(); }
    double norm2() const { return psi.frobenius_norm2(); }

    TwoQuditState normalized() const {
        CMatrix m = psi;
        m *= 1.0 / psi.frobenius_norm();
        return TwoQuditState(std::move(m));
    }
};

struct SchmidtData {
    std::vector<double> coefficients;  // sqrt(chi_k), positive, descending
    CMatrix left_basis;                // d_a x rank, columns |u_k>_a
    CMatrix right_basis;               // d_b x rank, columns |u_k>_b
    int rank = 0;
};

// Schmidt decomposition: psi = left * diag(coefficients) * right^T.
// Note the unconjugated transpose; right_basis columns are the node-b
// Schmidt vectors in the computational basis.
inline SchmidtData schmidt(const TwoQuditState& state) {
    const double n2 = state.norm2();
    if (n2 <= EPS_RANK_REL)
        throw std::invalid_argument("schmidt: state norm too small");
    SvdResult s = svd(state.psi);
    const double cutoff = EPS_RANK_REL * s.sigma[0];
    int rank = 0;
    for (double sv : s.sigma)
        if (sv > cutoff) ++rank;
    if (rank == 0)
        throw std::invalid_argument("schmidt: zero state");

    SchmidtData d;
    d.rank = rank;
    d.coefficients.assign(s.sigma.begin(), s.sigma.begin() + rank);
    d.left_basis = CMatrix(state.da(), rank);
    d.right_basis = CMatrix(state.db(), rank);
    for (int k = 0; k < rank; ++k) {
        for (int i = 0; i < state.da(); ++i) d.left_basis(i, k) = s.u(i, k);
        for (int i = 0; i < state.db(); ++i) d.right_basis(i, k) = s.vh(k, i);  // V^T column
    }
    return d;
}

inline std::vector<double> schmidt_squared(const TwoQuditState& state) {
    SchmidtData d = schmidt(state);
    std::vector<double> chi(d.coefficients.size());
    for (size_t k = 0; k < chi.size(); ++k) chi[k] = d.coefficients[k] * d.coefficients[k];
    return chi;
}

// Entanglement entropy in ebits. Requires a normalized state: callers keep
// branch probabilities in norms, so demanding explicit normalization here
// prevents silently mixing the two.
inline double entanglement(const TwoQuditState& state) {
    if (std::abs(state.norm2() - 1.0) > 1e-6)
        throw std::invalid_argument("entanglement: state must be normalized");
    return entropy_bits(schmidt_squared(state));
}

// Product state |+_d> as a d x 1 column.
inline CMatrix plus_qudit(int d) {
    if (d < 2) throw std::invalid_argument("plus_qudit: d must be >= 2");
    CMatrix v(d, 1);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) v(i, 0) = a;
    return v;
}

// |+_d> (x) |+_d>: all coefficients 1/d. Rank 1, zero entanglement.
inline TwoQuditState plus_state(int d) {
    if (d < 2) throw std::invalid_argument("plus_state: d must be >= 2");
    CMatrix m(d, d, cxd(1.0 / d, 0.0));
    return TwoQuditState(std::move(m));
}

// Maximally entangled two-qudit state, psi = 1_d / sqrt(d).
inline TwoQuditState qudit_bell(int d) {
    if (d < 2) throw std::invalid_argument("qudit_bell: d must be >= 2");
    CMatrix m(d, d);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) m(i, i) = a;
    return TwoQuditState(std::move(m));
}

// Two-qubit resource state of the electron pair, as the 2x2 coefficient
// matrix phi_ee with entries c_{ja jb}. Always unit norm.
struct TwoQubitResource {
    CMatrix phi_ee;

    explicit TwoQubitResource(CMatrix m) : phi_ee(std::move(m)) {
        if (phi_ee.rows() != 2 || phi_ee.cols() != 2)
            throw std::invalid_argument("TwoQubitResource: matrix must be 2x2");
        if (std::abs(phi_ee.frobenius_norm2() - 1.0) > 1e-10)
            throw std::invalid_argument("TwoQubitResource: matrix must have unit norm");
    }

    cxd c(int ja, int jb) const { return phi_ee(ja, jb); }
    cxd det() const { return phi_ee(0, 0) * phi_ee(1, 1) - phi_ee(0, 1) * phi_ee(1, 0); }

    static TwoQubitResource psi_plus() { return bell(0.0, 1.0, 1.0, 0.0); }
    static TwoQubitResource psi_minus() { return bell(0.0, 1.0, -1.0, 0.0); }
    static TwoQubitResource phi_plus() { return bell(1.0, 0.0, 0.0, 1.0); }
    static TwoQubitResource phi_minus() { return bell(1.0, 0.0, 0.0, -1.0); }
    // Two-qubit cluster state (|0+> + |1->)/sqrt(2).
    static TwoQubitResource cluster() {
        CMatrix m(2, 2);
        m(0, 0) = 0.5;
        m(0, 1) = 0.5;
        m(1, 0) = 0.5;
        m(1, 1) = -0.5;
        return TwoQubitResource(std::move(m));
    }
    // Schmidt-diagonal resource diag(sqrt(lp), sqrt(lm)); entanglement is the
    // binary entropy of lp.
    static TwoQubitResource schmidt_diag(double lambda_plus) {
        CMatrix m(2, 2);
        m(0, 0) = std::sqrt(lambda_plus);
        m(1, 1) = std::sqrt(1.0 - lambda_plus);
        return TwoQubitResource(std::move(m));
    }

  private:
    static TwoQubitResource bell(double c00, double c01, double c10, double c11) {
        const double s = 1.0 / std::sqrt(2.0);
        CMatrix m(2, 2);
        m(0, 0) = c00 * s;
        m(0, 1) = c01 * s;
        m(1, 0) = c10 * s;
        m(1, 1) = c11 * s;
        return TwoQubitResource(std::move(m));
    }
};

// Closed-form electron-pair entanglement: Schmidt weights are
// 1/2 +- sqrt(1/4 - |det phi_ee|^2).
inline double two_qubit_entanglement(const TwoQubitResource& res) {
    const double d2 = std::norm(res.det());
    const double rad = std::max(0.0, 0.25 - d2);
    const double lp = 0.5 + std::sqrt(rad);
    return entropy_bits({lp, 1.0 - lp});
}

}  // namespace qet
