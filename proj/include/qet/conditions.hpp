// conditions.hpp — numerical verifiers and solvers for the transferability
// conditions: complete deterministic transfer, allowed phase indices for
// spin-rotation schemes, the maximal-entanglement conditions on the final
// iteration, and the resource-coefficient equation.

#pragma once

#include "qet/gates.hpp"
#include "qet/states.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace qet {

inline constexpr double COND_TOL = 1e-9;

// ---------------------------------------------------------------------------
// Complete deterministic transfer: the two conditional gates must map the
// previous Schmidt vectors onto mutually orthogonal sets in each node.

struct TransferCheck {
    bool ok = false;
    double residual_a = 0.0;  // ||Va^dag Ua0^dag Ua1 Va||_F
    double residual_b = 0.0;
    int rank = 0;
    std::string reason;
};

inline TransferCheck check_complete_transfer(const TwoQuditState& prev, const CMatrix& ua0,
                                             const CMatrix& ua1, const CMatrix& ub0,
                                             const CMatrix& ub1) {
    if (std::abs(prev.norm2() - 1.0) > 1e-6)
        throw std::invalid_argument("check_complete_transfer: state must be normalized");
    for (const CMatrix* u : {&ua0, &ua1, &ub0, &ub1})
        if (u->rows() != u->cols() || unitarity_defect(*u) > 1e-6)
            throw std::invalid_argument("check_complete_transfer: gates must be unitary");

    SchmidtData s = schmidt(prev);
    TransferCheck out;
    out.rank = s.rank;
    out.residual_a = (s.left_basis.adjoint() * (ua0.adjoint() * ua1) * s.left_basis)
                         .frobenius_norm();
    out.residual_b = (s.right_basis.adjoint() * (ub0.adjoint() * ub1) * s.right_basis)
                         .frobenius_norm();
    if (s.rank > prev.da() / 2 || s.rank > prev.db() / 2) {
        out.ok = false;
        out.reason = "rank exceeds d/2";
        return out;
    }
    out.ok = out.residual_a < COND_TOL && out.residual_b < COND_TOL;
    if (!out.ok) out.reason = "orthogonality residual above tolerance";
    return out;
}

// ---------------------------------------------------------------------------
// Allowed phase indices k for spin-rotation schemes: phi = 2 pi k / d keeps
// complete transfer possible after earlier iterations with indices
// previous_k iff the magnetic-ladder sum vanishes for every sign vector tau.

inline std::vector<int> allowed_indices(int d, const std::vector<int>& previous_k) {
    if (d < 2) throw std::invalid_argument("allowed_indices: d must be >= 2");
    for (int k : previous_k)
        if (k < 1 || k > d - 1)
            throw std::invalid_argument("allowed_indices: previous index out of range");
    const double spin = 0.5 * (d - 1);
    const size_t n = previous_k.size();
    size_t combos = 1;
    for (size_t i = 0; i < n; ++i) combos *= 3;

    std::vector<int> allowed;
    for (int k = 1; k <= d - 1; ++k) {
        bool ok = true;
        for (size_t t = 0; t < combos && ok; ++t) {
            double theta = 2.0 * M_PI * k / d;
            size_t rest = t;
            for (size_t mu = 0; mu < n; ++mu) {
                const int tau = static_cast<int>(rest % 3) - 1;
                rest /= 3;
                theta += tau * 2.0 * M_PI * previous_k[mu] / d;
            }
            cxd sum = 0.0;
            for (int i = 0; i < d; ++i) {
                const double m = spin - i;
                sum += std::exp(cxd(0.0, -m * theta));
            }
            if (std::abs(sum) > COND_TOL) ok = false;
        }
        if (ok) allowed.push_back(k);
    }
    return allowed;
}

// ---------------------------------------------------------------------------
// Maximal-entanglement conditions for the final iteration.

struct PairingReport {
    std::vector<double> paired_epsilons;  // eps_i >= 0 for each outer pair
    bool has_central_element = false;
    double central_value = 0.0;
    bool pairing_ok = false;
    double residual = 0.0;  // max deviation of pair sums from 2/d (and centre from 1/d)
};

struct BlockStructureReport {
    std::vector<int> block_sizes;  // degeneracy blocks of S, outermost first
    bool antidiagonal_ok_a = false;
    bool antidiagonal_ok_b = false;
    double leakage_a = 0.0;  // norm of entries outside the anti-diagonal blocks
    double leakage_b = 0.0;
    double swap_residual_a = 0.0;  // ||U^dag Sdown U - Sup||
    double swap_residual_b = 0.0;
};

enum class ResourceClass { bell_psi, bell_phi, cluster, generic };

struct MaxEntReport {
    bool resource_max_entangled = false;
    bool resource_form_ok = false;  // |c00|=|c11|, |c01|=|c10| after phase rotation
    ResourceClass resource_class = ResourceClass::generic;
    double c = 0.0;            // diagonal weight, in [0, 1/sqrt2]
    double kappa_sigma = 0.0;  // (s00 s11 + s01 s10)/2
    double kappa_c = 0.0;      // c sqrt(1/2 - c^2)
    std::vector<double> rotation_phases;  // local phases applied to realify, (a0,a1,b0,b1)

    PairingReport pairing;
    BlockStructureReport blocks;

    bool full_rank = false;        // r = d regime (no zero Schmidt values)
    double p_equal = 0.5;          // fixed 1/2 for r < d, fitted for r = d
    double p_equal_spread = 0.0;   // cross-block inconsistency of the fit
    double commutator_residual = 0.0;        // condition (a), max over a<->b swap
    double scalar_residual = 0.0;            // condition (b) blockwise, max over swap
    bool conditions_ok = false;

    bool pass = false;
};

namespace detail {

// Local phase rotation making the 2x2 resource matrix real, when possible.
// Returns the rotated real matrix and the phases (a0, a1, b0, b1) used.
inline bool realify_resource(const CMatrix& phi, CMatrix& out, std::vector<double>& phases) {
    double a[2] = {0.0, 0.0}, b[2] = {0.0, 0.0};
    const double tiny = 1e-12;
    // Anchor phases on nonzero entries, row by row.
    if (std::abs(phi(0, 0)) > tiny) b[0] = std::arg(phi(0, 0));
    if (std::abs(phi(0, 1)) > tiny) b[1] = std::arg(phi(0, 1));
    if (std::abs(phi(1, 0)) > tiny) a[1] = std::arg(phi(1, 0)) - b[0];
    else if (std::abs(phi(1, 1)) > tiny) a[1] = std::arg(phi(1, 1)) - b[1];
    out = CMatrix(2, 2);
    bool ok = true;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            const cxd z = phi(j, k) * std::exp(cxd(0.0, -(a[j] + b[k])));
            if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z))) ok = false;
            out(j, k) = cxd(z.real(), 0.0);
        }
    phases = {a[0], a[1], b[0], b[1]};
    return ok;
}

inline double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace detail

// Verify the necessary and sufficient conditions for generating rank-d
// maximal entanglement in the final iteration, given the Schmidt weights
// S_diag delivered by the previous iteration (descending, padded with
// zeros), the transformed gate matrices for both nodes, and the resource.
inline MaxEntReport check_maxent_conditions(const std::vector<double>& s_diag,
                                            const CMatrix& u_cal_a, const CMatrix& u_cal_b,
                                            const TwoQubitResource& resource) {
    const int d = static_cast<int>(s_diag.size());
    if (u_cal_a.rows() != d || u_cal_a.cols() != d || u_cal_b.rows() != d ||
        u_cal_b.cols() != d)
        throw std::invalid_argument("check_maxent_conditions: dimension mismatch");
    double sum = 0.0;
    for (double s : s_diag) sum += s;
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("check_maxent_conditions: S_diag must sum to 1");
    for (const CMatrix* u : {&u_cal_a, &u_cal_b})
        if (unitarity_defect(*u) > 1e-6)
            throw std::invalid_argument("check_maxent_conditions: gates must be unitary");

    MaxEntReport rep;
    rep.resource_max_entangled =
        std::abs(two_qubit_entanglement(resource) - 1.0) < COND_TOL;

    // Resource form: rotate real, then require equal diagonal and equal
    // off-diagonal magnitudes.
    CMatrix real_res(2, 2);
    const bool rot_ok = detail::realify_resource(resource.phi_ee, real_res, rep.rotation_phases);
    const double c00 = real_res(0, 0).real(), c01 = real_res(0, 1).real();
    const double c10 = real_res(1, 0).real(), c11 = real_res(1, 1).real();
    rep.c = 0.5 * (std::abs(c00) + std::abs(c11));
    const double off = 0.5 * (std::abs(c01) + std::abs(c10));
    rep.resource_form_ok = rot_ok && std::abs(std::abs(c00) - std::abs(c11)) < COND_TOL &&
                           std::abs(std::abs(c01) - std::abs(c10)) < COND_TOL;
    double s00 = detail::sign_of(c00), s01 = detail::sign_of(c01);
    double s10 = detail::sign_of(c10), s11 = detail::sign_of(c11);
    // Signs on vanishing entries are free; fix them by the convention
    // s00 s01 s10 s11 = -1 used in the scalar condition.
    if (rep.c < 1e-9) s11 = -s00 * s01 * s10;
    if (off < 1e-9) s10 = -s00 * s01 * s11;
    rep.kappa_sigma = 0.5 * (s00 * s11 + s01 * s10);
    rep.kappa_c = rep.c * off;
    if (rep.c < 1e-6) rep.resource_class = ResourceClass::bell_psi;
    else if (off < 1e-6) rep.resource_class = ResourceClass::bell_phi;
    else if (std::abs(rep.c - 0.5) < 1e-6) rep.resource_class = ResourceClass::cluster;
    const double sigma_bar = (rep.c > 1e-9) ? s00 * s11 : -s01 * s10;

    // Pairing of the Schmidt weights around 1/d.
    const double inv_d = 1.0 / d;
    PairingReport& pr = rep.pairing;
    for (int i = 0; i < d / 2; ++i) {
        pr.paired_epsilons.push_back(0.5 * (s_diag[i] - s_diag[d - 1 - i]));
        pr.residual = std::max(pr.residual,
                               std::abs(s_diag[i] + s_diag[d - 1 - i] - 2.0 * inv_d));
    }
    if (d % 2 == 1) {
        pr.has_central_element = true;
        pr.central_value = s_diag[d / 2];
        pr.residual = std::max(pr.residual, std::abs(pr.central_value - inv_d));
    }
    pr.pairing_ok = pr.residual < COND_TOL;

    // Degeneracy blocks of S (descending, equal values grouped).
    std::vector<int> block_of(d);
    {
        int blk = 0;
        block_of[0] = 0;
        for (int i = 1; i < d; ++i) {
            if (s_diag[i - 1] - s_diag[i] > COND_TOL) ++blk;
            block_of[i] = blk;
        }
        std::vector<int>& sizes = rep.blocks.block_sizes;
        sizes.assign(blk + 1, 0);
        for (int i = 0; i < d; ++i) ++sizes[block_of[i]];
    }
    const int nblocks = static_cast<int>(rep.blocks.block_sizes.size());

    auto leakage = [&](const CMatrix& u) {
        double l2 = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (block_of[i] + block_of[j] != nblocks - 1) l2 += std::norm(u(i, j));
        return std::sqrt(l2);
    };
    rep.blocks.leakage_a = leakage(u_cal_a);
    rep.blocks.leakage_b = leakage(u_cal_b);
    rep.blocks.antidiagonal_ok_a = rep.blocks.leakage_a < COND_TOL;
    rep.blocks.antidiagonal_ok_b = rep.blocks.leakage_b < COND_TOL;

    const CMatrix s_down = CMatrix::diagonal(std::vector<cxd>(s_diag.begin(), s_diag.end()));
    CMatrix s_up(d, d);
    for (int i = 0; i < d; ++i) s_up(i, i) = s_diag[d - 1 - i];
    rep.blocks.swap_residual_a =
        (u_cal_a.adjoint() * s_down * u_cal_a - s_up).frobenius_norm();
    rep.blocks.swap_residual_b =
        (u_cal_b.adjoint() * s_down * u_cal_b - s_up).frobenius_norm();

    rep.full_rank = s_diag[d - 1] > COND_TOL;

    // Condition (a): kappa_c sqrt(Sdown Sup) [Ua, (Ub + Ub^dag)^T] = 0,
    // and the same with a and b swapped.
    CMatrix sqrt_ss(d, d);
    for (int i = 0; i < d; ++i)
        sqrt_ss(i, i) = std::sqrt(std::max(0.0, s_diag[i] * s_diag[d - 1 - i]));
    auto commutator_residual = [&](const CMatrix& ua, const CMatrix& ub) {
        const CMatrix sym = (ub + ub.adjoint()).transpose();
        return (cxd(rep.kappa_c, 0.0) * (sqrt_ss * (ua * sym - sym * ua))).frobenius_norm();
    };
    rep.commutator_residual = std::max(commutator_residual(u_cal_a, u_cal_b),
                                       commutator_residual(u_cal_b, u_cal_a));

    // Condition (b), blockwise. For each diagonal block p (skipping blocks
    // where sqrt(Sdown Sup) vanishes, i.e. the outermost ones when r < d):
    //   c^2 A B'^T - (1/2 - c^2) A B''* + h.c. = sigma_bar (2 Peq - 1)
    //                                            / sqrt(1 - d^2 eps^2) * 1
    // with A the block of Ua at (p, nblocks-1-p), B' the same block of Ub,
    // and B'' the mirrored block of Ub.
    {
        std::vector<int> start(nblocks, 0);
        for (int b = 1; b < nblocks; ++b)
            start[b] = start[b - 1] + rep.blocks.block_sizes[b - 1];
        auto block = [&](const CMatrix& u, int rb, int cb) {
            CMatrix m(rep.blocks.block_sizes[rb], rep.blocks.block_sizes[cb]);
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j) m(i, j) = u(start[rb] + i, start[cb] + j);
            return m;
        };
        const double c2 = rep.c * rep.c;
        const double w2 = 0.5 - c2;
        double scalar_res = 0.0, spread = 0.0;
        std::vector<double> implied_x;
        for (int swap = 0; swap < 2; ++swap) {
            const CMatrix& ua = swap ? u_cal_b : u_cal_a;
            const CMatrix& ub = swap ? u_cal_a : u_cal_b;
            for (int p = 0; p < nblocks; ++p) {
                const int q = nblocks - 1 - p;
                const double s_here = s_diag[start[p]];
                const double s_mirror = s_diag[start[q]];
                if (s_here * s_mirror < COND_TOL * COND_TOL) continue;  // no constraint
                const double eps = s_here - inv_d;
                const CMatrix a_blk = block(ua, p, q);
                const CMatrix b_prime = block(ub, p, q);
                const CMatrix b_second = block(ub, q, p);
                CMatrix h = cxd(c2, 0.0) * (a_blk * b_prime.transpose()) -
                            cxd(w2, 0.0) * (a_blk * b_second.conjugate());
                h += h.adjoint();
                const double denom = std::sqrt(std::max(0.0, 1.0 - d * d * eps * eps));
                double target;
                if (!rep.full_rank) {
                    target = 0.0;  // Peq = 1/2 forced by the outermost zero blocks
                } else {
                    target = h.trace().real() / h.rows();
                    implied_x.push_back(sigma_bar * target * denom);
                }
                CMatrix dev = h;
                for (int i = 0; i < dev.rows(); ++i) dev(i, i) -= target;
                scalar_res = std::max(scalar_res, dev.frobenius_norm());
            }
        }
        if (rep.full_rank && !implied_x.empty()) {
            double mean = 0.0;
            for (double x : implied_x) mean += x;
            mean /= implied_x.size();
            for (double x : implied_x) spread = std::max(spread, std::abs(x - mean));
            rep.p_equal = 0.5 * (mean + 1.0);
            rep.p_equal_spread = spread;
        }
        rep.scalar_residual = scalar_res;
        rep.conditions_ok = rep.commutator_residual < COND_TOL &&
                            rep.scalar_residual < COND_TOL && spread < COND_TOL;
    }

    rep.pass = rep.resource_max_entangled && rep.resource_form_ok && rep.pairing.pairing_ok &&
               rep.blocks.antidiagonal_ok_a && rep.blocks.antidiagonal_ok_b &&
               rep.blocks.swap_residual_a < COND_TOL && rep.blocks.swap_residual_b < COND_TOL &&
               rep.conditions_ok;
    return rep;
}

// The transformed gate matrix of the constructed d=3 final iteration:
// anti-diagonal with a free phase alpha, phase pi/2, prefactor from xi.
inline CMatrix d3_final_gate_matrix(double xi, double alpha = 0.0) {
    CMatrix u(3, 3);
    const cxd pref = std::exp(cxd(0.0, xi * M_PI / 2.0));
    u(0, 2) = pref * std::exp(cxd(0.0, alpha));
    u(1, 1) = pref;
    u(2, 0) = -pref * std::exp(cxd(0.0, -alpha));
    return u;
}

// ---------------------------------------------------------------------------
// Resource-coefficient equation for the final iteration:
//   c^2 cos(xa pa + xb pb) - (1/2 - c^2) cos(xa pa - xb pb) = 0
// on c in [0, 1/sqrt2]. Typically zero or one solution; at discrete
// parameter points every c solves.

enum class ResourceCKind { none, one, all };

struct ResourceCSolution {
    ResourceCKind kind = ResourceCKind::none;
    double c = 0.0;
};

inline ResourceCSolution solve_resource_c(double xi_a, double xi_b, double phi_a,
                                          double phi_b) {
    const double cs = std::cos(xi_a * phi_a + xi_b * phi_b);
    const double cd = std::cos(xi_a * phi_a - xi_b * phi_b);
    const double denom = cs + cd;
    if (std::abs(denom) < 1e-12) {
        if (std::abs(cd) < 1e-12) return {ResourceCKind::all, 0.0};
        return {ResourceCKind::none, 0.0};
    }
    const double c2 = 0.5 * cd / denom;
    if (c2 < -1e-12 || c2 > 0.5 + 1e-12) return {ResourceCKind::none, 0.0};
    return {ResourceCKind::one, std::sqrt(std::clamp(c2, 0.0, 0.5))};
}

// ---------------------------------------------------------------------------
// After a complete transfer, every leaf's Schmidt spectrum must be the
// pairwise product of the resource weights with the previous spectrum.

inline bool schmidt_product_check(const std::vector<double>& prev_chis,
                                  const TwoQubitResource& resource,
                                  const std::vector<OutcomeNode>& leaves) {
    // The resource weights come from its own Schmidt spectrum; the closed
    // det formula loses half the precision at the degenerate point.
    std::vector<double> lambda = schmidt_squared(TwoQuditState(resource.phi_ee));
    lambda.resize(2, 0.0);
    const double lp = lambda[0], lm = lambda[1];
    std::vector<double> expected;
    for (double chi : prev_chis) {
        expected.push_back(lp * chi);
        expected.push_back(lm * chi);
    }
    std::sort(expected.begin(), expected.end(), std::greater<>());
    while (!expected.empty() && expected.back() < 1e-12) expected.pop_back();

    for (const OutcomeNode& leaf : leaves) {
        std::vector<double> chi = schmidt_squared(leaf.state);
        while (!chi.empty() && chi.back() < 1e-12) chi.pop_back();
        if (chi.size() != expected.size()) return false;
        for (size_t i = 0; i < chi.size(); ++i)
            if (std::abs(chi[i] - expected[i]) > COND_TOL) return false;
    }
    return true;
}

}  // namespace qet
