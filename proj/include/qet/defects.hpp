// defects.hpp — effective Hamiltonians of concrete defect centers and the
// second-order treatment of the exchange hyperfine component, including its
// effect on the generated entanglement.
//
// Conventions: angular frequency units with hbar = 1. The transfer modules
// work in units of the Ising coupling A_par; the dimensionless strength
//   zeta = A_perp^2 / (A_par D)
// controls the size of the conditional evolution corrections.

#pragma once

#include "qet/gates.hpp"
#include "qet/schemes.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qet {

// ---------------------------------------------------------------------------
// Generic spin operators on the |S, m> ladder, m descending.

inline int ladder_size(double spin) {
    const double n = 2.0 * spin + 1.0;
    const int ni = static_cast<int>(std::lround(n));
    if (ni < 1 || std::abs(n - ni) > 1e-9)
        throw std::invalid_argument("ladder_size: spin must be a non-negative half-integer");
    return ni;
}

inline CMatrix spin_z(double spin) {
    const int n = ladder_size(spin);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = spin - i;
    return m;
}

// Raising operator: S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>.
inline CMatrix spin_plus(double spin) {
    const int n = ladder_size(spin);
    CMatrix m(n, n);
    for (int i = 1; i < n; ++i) {
        const double mi = spin - i;
        m(i - 1, i) = std::sqrt(spin * (spin + 1.0) - mi * (mi + 1.0));
    }
    return m;
}

inline CMatrix spin_minus(double spin) { return spin_plus(spin).adjoint(); }

// ---------------------------------------------------------------------------
// NV-type center: quadrupole + Zeeman electron Hamiltonian, diagonal Ising
// hyperfine, and an exchange (flip-flop) hyperfine perturbation.

struct NVTypeParams {
    double S = 1.0;       // electron spin quantum number
    double I = 1.0;       // nuclear spin quantum number
    double D = 0.0;       // zero-field splitting
    double gammaB = 0.0;  // electron Zeeman energy
    double A_par = 0.0;   // Ising hyperfine
    double A_perp = 0.0;  // exchange hyperfine
    double ms0 = 0.0;     // electron level assigned to qubit state |0>
    double ms1 = 0.0;     // electron level assigned to qubit state |1>

    // Standard room-temperature constants for the I=1 nitrogen isotope,
    // in MHz: D = 2870, A_par = -2.16, A_perp = -2.7, qubit levels (0, +1).
    static NVTypeParams nv14() {
        NVTypeParams p;
        p.S = 1.0;
        p.I = 1.0;
        p.D = 2870.0;
        p.gammaB = 0.0;
        p.A_par = -2.16;
        p.A_perp = -2.7;
        p.ms0 = 0.0;
        p.ms1 = 1.0;
        return p;
    }

    double zeta() const { return A_perp * A_perp / (A_par * D); }
};

// Diagonal second-order corrections to the two conditional nuclear
// Hamiltonians, in units of A_par, indexed by m_I descending. Branch 0 is
// the higher electron level of the qubit pair (the ordering that reproduces
// the standard displayed matrices for the I=1 case).
struct ConditionalCorrections {
    std::vector<double> h0;
    std::vector<double> h1;
};

inline ConditionalCorrections second_order_correction(const NVTypeParams& p) {
    if (std::abs(p.ms0) > p.S + 1e-9 || std::abs(p.ms1) > p.S + 1e-9 ||
        std::abs(p.ms0 - p.ms1) < 1e-9)
        throw std::invalid_argument(
            "second_order_correction: qubit levels must be distinct and within the spin ladder");
    ladder_size(p.S);  // validates the spin quantum number
    const int ni = ladder_size(p.I);
    auto mi_of = [&](int i) { return p.I - i; };
    auto energy = [&](double ms, double mi) {
        return p.D * ms * ms + p.gammaB * ms + p.A_par * ms * mi;
    };
    // V = (A_perp/2)(S+ I- + S- I+): from |ms, mi> it reaches
    // |ms+1, mi-1> and |ms-1, mi+1>.
    auto coupling = [&](double ms, double mi, int dir) {
        const double s_amp = std::sqrt(std::max(0.0, p.S * (p.S + 1.0) - ms * (ms + dir)));
        const double i_amp = std::sqrt(std::max(0.0, p.I * (p.I + 1.0) - mi * (mi - dir)));
        return 0.5 * p.A_perp * s_amp * i_amp;
    };

    auto branch = [&](double ms_level) {
        std::vector<double> corr(ni, 0.0);
        for (int i = 0; i < ni; ++i) {
            const double mi = mi_of(i);
            double shift = 0.0;
            for (int dir : {+1, -1}) {
                const double ms_l = ms_level + dir;
                const double mi_l = mi - dir;
                if (ms_l > p.S + 1e-9 || ms_l < -p.S - 1e-9) continue;
                if (mi_l > p.I + 1e-9 || mi_l < -p.I - 1e-9) continue;
                const double v = coupling(ms_level, mi, dir);
                if (v == 0.0) continue;
                const double gap = energy(ms_level, mi) - energy(ms_l, mi_l);
                if (std::abs(gap) < 1e-9 * std::max(1.0, std::abs(p.D)))
                    throw std::runtime_error(
                        "second_order_correction: degenerate levels ms=" +
                        std::to_string(ms_level) + " and ms=" + std::to_string(ms_l));
                shift += v * v / gap;
            }
            corr[i] = shift / p.A_par;  // report in units of A_par
        }
        return corr;
    };
    const double hi = std::max(p.ms0, p.ms1);
    const double lo = std::min(p.ms0, p.ms1);
    return {branch(hi), branch(lo)};
}

// Closed-form corrections in the limit where Zeeman and Ising terms are
// negligible against the level splitting: branch 0 picks up
// (zeta/2)(I(I+1) - m(m+1)), branch 1 the negative of the sum of both
// ladder weights.
inline ConditionalCorrections conditional_corrections_for_zeta(int d, double zeta) {
    const double I = 0.5 * (d - 1);
    ConditionalCorrections c;
    c.h0.resize(d);
    c.h1.resize(d);
    for (int i = 0; i < d; ++i) {
        const double m = I - i;
        const double cp2 = I * (I + 1.0) - m * (m + 1.0);
        const double cm2 = I * (I + 1.0) - m * (m - 1.0);
        c.h0[i] = 0.5 * zeta * cp2;
        c.h1[i] = -0.5 * zeta * (cp2 + cm2);
    }
    return c;
}

// Conditional gate including the exchange-induced correction, at the same
// physical duration as the ideal gate (phi = A_net t).
inline CMatrix corrected_conditional_unitary(const NodeParams& node, int j, double phi,
                                             double zeta) {
    const ConditionalCorrections corr = conditional_corrections_for_zeta(node.d, zeta);
    const std::vector<double>& h = (j == 0) ? corr.h0 : corr.h1;
    const double sign = (j == 0) ? 1.0 : -1.0;
    const double spin = 0.5 * (node.d - 1);
    CMatrix u(node.d, node.d);
    for (int i = 0; i < node.d; ++i) {
        const double m = spin - i;
        u(i, i) = std::exp(cxd(0.0, -(sign * (m + node.xi) * 0.5 + h[i]) * phi));
    }
    return u;
}

// Run a scheme with corrected conditional evolutions and return the
// relative entanglement shortfall 1 - <E>/log2(d). Postselected schemes use
// the conditional expectation.
inline double entanglement_reduction(int d, const Scheme& scheme, double zeta, double xi) {
    NodeParams node(d, xi);
    std::vector<OutcomeNode> frontier;
    const TwoQuditState initial = plus_state(d);
    frontier.push_back(OutcomeNode{{}, 1.0, initial, 0.0});
    bool postselected = false;
    for (const IterationSpec& spec : scheme) {
        if (spec.rule != Postselect::none) postselected = true;
        if (std::abs(spec.phi_a - spec.phi_b) > 1e-12)
            throw std::invalid_argument("entanglement_reduction: phases must match per node");
        const CMatrix u0 = corrected_conditional_unitary(node, 0, spec.phi_a, zeta);
        const CMatrix u1 = corrected_conditional_unitary(node, 1, spec.phi_a, zeta);
        std::vector<OutcomeNode> next;
        for (const OutcomeNode& parent : frontier) {
            auto children =
                apply_iteration_gates(parent.state, spec.resource, u0, u1, u0, u1, &spec);
            for (OutcomeNode& child : children) {
                child.probability *= parent.probability;
                if (child.probability < PROB_FLOOR) continue;
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    const double e = expected_entanglement(frontier, postselected);
    return 1.0 - e / std::log2(static_cast<double>(d));
}

// ---------------------------------------------------------------------------
// Split-vacancy center with an orbital doublet (germanium-type): numerical
// second-order block diagonalization of the strain- and exchange-coupled
// Kramers blocks, compared against the Ising-only target.

struct GeVParams {
    double lambda = 150.0;   // spin-orbit splitting (GHz scale)
    double alpha = 0.0;      // Re strain
    double beta = 0.0;       // Im strain (epsilon = alpha - i beta)
    double gammaB = 1.0;     // electron Zeeman energy
    double A_par = 0.08;     // Ising hyperfine
    double A_perp = 0.09;    // exchange hyperfine
    double I = 4.5;          // nuclear spin quantum number

    bool regime_ok() const {
        const double eps = std::hypot(alpha, beta);
        const bool separated = std::abs(gammaB) < 0.2 * lambda && eps < 0.2 * lambda;
        const double flipflop = eps * A_perp / lambda;
        const bool secular = flipflop * flipflop < 0.2 * std::abs(gammaB * A_par);
        return separated && secular;
    }
};

struct GevReport {
    CMatrix h_eff;           // effective Hamiltonian on the lower doublet x nucleus
    double h_norm = 0.0;     // Frobenius norm of the full input Hamiltonian
    double cross_norm = 0.0;       // strain-exchange flip-flop part of h_eff
    double diag_mismatch = 0.0;    // diagonal deviation from the Ising target
    double residual = 0.0;         // second-order weight of the flip-flop part
    bool regime_ok = true;
    std::string warning;
};

// Electron basis order: |e+ up>, |e- dn>, |e- up>, |e+ dn>. The first two
// span the upper Kramers block, the last two the lower one.
inline CMatrix gev_full_hamiltonian(const GeVParams& p) {
    const int nn = ladder_size(p.I);
    const cxd eps(p.alpha, -p.beta);
    CMatrix he(4, 4);
    he(0, 0) = 0.5 * (p.lambda + p.gammaB);
    he(1, 1) = 0.5 * (p.lambda - p.gammaB);
    he(2, 2) = 0.5 * (-p.lambda + p.gammaB);
    he(3, 3) = 0.5 * (-p.lambda - p.gammaB);
    he(0, 2) = eps;
    he(2, 0) = std::conj(eps);
    he(1, 3) = std::conj(eps);
    he(3, 1) = eps;

    CMatrix sz(4, 4);
    sz(0, 0) = 0.5;
    sz(1, 1) = -0.5;
    sz(2, 2) = 0.5;
    sz(3, 3) = -0.5;
    CMatrix sp(4, 4);  // spin raising within each orbital
    sp(2, 1) = 1.0;    // |e- dn> -> |e- up>
    sp(0, 3) = 1.0;    // |e+ dn> -> |e+ up>
    const CMatrix sm = sp.adjoint();

    const CMatrix iz = spin_z(p.I);
    const CMatrix ip = spin_plus(p.I);
    const CMatrix im = spin_minus(p.I);
    const CMatrix id_n = CMatrix::identity(nn);

    CMatrix h = kron(he, id_n);
    h += cxd(p.A_par, 0.0) * kron(sz, iz);
    h += cxd(0.5 * p.A_perp, 0.0) * (kron(sp, im) + kron(sm, ip));
    return h;
}

inline GevReport gev_effective(const GeVParams& p) {
    const int nn = ladder_size(p.I);
    const CMatrix h = gev_full_hamiltonian(p);
    const int dim = h.rows();
    const int half = 2 * nn;

    // Second-order block diagonalization onto the lower Kramers block
    // (electron indices 2, 3). All off-diagonal entries of h are
    // block-off-diagonal, so H0 is the diagonal.
    std::vector<double> e0(dim);
    for (int i = 0; i < dim; ++i) e0[i] = h(i, i).real();
    auto lower = [&](int i) { return i >= half; };

    CMatrix heff(half, half);
    for (int r = 0; r < half; ++r)
        for (int c = 0; c < half; ++c) {
            const int i = half + r, j = half + c;
            cxd val = h(i, j);
            for (int l = 0; l < dim; ++l) {
                if (lower(l)) continue;
                const cxd vil = h(i, l), vlj = h(l, j);
                if (vil == cxd(0.0, 0.0) || vlj == cxd(0.0, 0.0)) continue;
                val += 0.5 * vil * vlj * (1.0 / (e0[i] - e0[l]) + 1.0 / (e0[j] - e0[l]));
            }
            heff(r, c) = val;
        }

    // Compare against gammaB Sz + A_par Sz Iz on the doublet, up to a
    // constant. Effective spin: |e- up> = up, |e+ dn> = down.
    CMatrix target(half, half);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < nn; ++k) {
            const double ms = (s == 0) ? 0.5 : -0.5;
            const double mi = p.I - k;
            target(s * nn + k, s * nn + k) = p.gammaB * ms + p.A_par * ms * mi;
        }
    CMatrix diff = heff - target;
    const cxd c0 = diff.trace() / static_cast<double>(half);
    for (int i = 0; i < half; ++i) diff(i, i) -= c0;

    GevReport rep;
    rep.h_eff = heff;
    rep.h_norm = h.frobenius_norm();
    double cross2 = 0.0, diag2 = 0.0;
    for (int r = 0; r < half; ++r)
        for (int c = 0; c < half; ++c) {
            const bool same_spin_block = (r / nn) == (c / nn);
            if (same_spin_block) diag2 += std::norm(diff(r, c));
            else cross2 += std::norm(diff(r, c));
        }
    rep.cross_norm = std::sqrt(cross2);
    rep.diag_mismatch = std::sqrt(diag2);

    // Second stage: weight of the second-order correction the flip-flop
    // part would produce when removed against the spin splitting. Zero
    // strain leaves no flip-flop part, making the Ising form exact.
    {
        double res2 = 0.0;
        for (int r = 0; r < half; ++r)
            for (int c = 0; c < half; ++c) {
                if ((r / nn) != (c / nn)) continue;
                cxd val = 0.0;
                for (int l = 0; l < half; ++l) {
                    if ((l / nn) == (r / nn)) continue;
                    const cxd xrl = heff(r, l), xlc = heff(l, c);
                    if (xrl == cxd(0.0, 0.0) || xlc == cxd(0.0, 0.0)) continue;
                    const double gr = heff(r, r).real() - heff(l, l).real();
                    const double gc = heff(c, c).real() - heff(l, l).real();
                    val += 0.5 * xrl * xlc * (1.0 / gr + 1.0 / gc);
                }
                res2 += std::norm(val);
            }
        rep.residual = std::sqrt(res2);
    }
    rep.regime_ok = p.regime_ok();
    if (!rep.regime_ok)
        rep.warning = "parameter regime violated; flip-flop residual " +
                      std::to_string(rep.residual);
    return rep;
}

// ---------------------------------------------------------------------------
// Vanadium defect in silicon carbide: reduced hyperfine tensor of the
// ground-state doublet as a function of the strain mixing angle.

struct VSiCParams {
    double theta1 = 0.0;    // strain mixing angle, [0, pi/2]
    double a_z = 201.0;     // MHz, diagonal constant (endpoint fit)
    double a_zpp = -15.5;   // MHz, cos(theta) weight (endpoint fit)
    // The remaining reduced constants carry no published magnitudes; they
    // default to zero and are flagged as unconstrained.
    double a_x = 0.0;
    double a_xp = 0.0;
    double a_zp = 0.0;
    bool x_constants_provided = false;
};

struct VSiCTensor {
    CMatrix a;  // 3x3 real tensor, rows/cols (x, y, z)
    double azz = 0.0;
    bool x_constants_provided = false;
};

inline VSiCTensor vsic_hyperfine(const VSiCParams& p) {
    if (p.theta1 < -1e-12 || p.theta1 > M_PI / 2 + 1e-12)
        throw std::invalid_argument("vsic_hyperfine: theta1 must lie in [0, pi/2]");
    const double ct = std::cos(p.theta1), st = std::sin(p.theta1);
    const double azz = p.a_z - 2.0 * p.a_zpp * ct;
    const double azx = p.a_xp * st;
    const double axy = -p.a_x * (1.0 + ct);
    const double axz = p.a_xp * (1.0 - ct);
    const double axx = -p.a_zp * st;

    VSiCTensor t;
    t.a = CMatrix(3, 3);
    t.a(0, 0) = axx + axy;
    t.a(0, 2) = axz;
    t.a(1, 1) = axx - axy;
    t.a(2, 0) = -azx;
    t.a(2, 2) = azz;
    t.azz = azz;
    t.x_constants_provided = p.x_constants_provided;
    return t;
}

// Strain mixing angle from the reduced strain component, using the
// published coupling constants (strain-orbit couplings in THz, spin-orbit
// constant in GHz).
inline double vsic_mixing_angle(double eps_xz, double eps_yy_minus_xx,
                                double s11_thz = 251.0, double s11p_thz = 230.0,
                                double lambda_z_ghz = 529.0) {
    const double eps11x_ghz = 1e3 * (s11_thz * eps_xz + 0.5 * s11p_thz * eps_yy_minus_xx);
    const double t = std::atan(2.0 * eps11x_ghz / lambda_z_ghz);
    return std::clamp(t, 0.0, M_PI / 2);
}

}  // namespace qet
