// network.hpp — photonic entangling of the two electron qubits through a
// Mach-Zehnder interferometer with spin-dependent cavity reflection, and
// multipartite chain accumulation on M qudits.

#pragma once

#include "qet/gates.hpp"
#include "qet/states.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qet {

// State of the interferometer run over the basis |ph1 ph2 e_a e_b> with
// ph_i in {0,1} photon occupation of channel i, plus an aggregated sink for
// photon-loss (no-click) branches.
struct InterferometerState {
    std::array<cxd, 16> amp{};  // index = ph1*8 + ph2*4 + ea*2 + eb
    double sink = 0.0;

    static int idx(int ph1, int ph2, int ea, int eb) {
        return ph1 * 8 + ph2 * 4 + ea * 2 + eb;
    }
    double total_probability() const {
        double p = sink;
        for (const cxd& z : amp) p += std::norm(z);
        return p;
    }
};

enum class QubitSign { plus, minus };

// Photon in channel 1, both stationary qubits in |+> or |->.
inline InterferometerState interferometer_initial(QubitSign init_a, QubitSign init_b) {
    InterferometerState s;
    const double sa = (init_a == QubitSign::plus) ? 1.0 : -1.0;
    const double sb = (init_b == QubitSign::plus) ? 1.0 : -1.0;
    for (int ea = 0; ea < 2; ++ea)
        for (int eb = 0; eb < 2; ++eb)
            s.amp[InterferometerState::idx(1, 0, ea, eb)] =
                0.5 * (ea ? sa : 1.0) * (eb ? sb : 1.0);
    return s;
}

namespace detail {

// 50:50 beam splitter on the single-photon amplitudes. The pi phase sits on
// the upper-left to lower-right transmission element; the first pass
// traverses the element in the reverse direction and uses the transpose.
inline void beam_splitter(InterferometerState& s, bool reversed) {
    const double r = 1.0 / std::sqrt(2.0);
    for (int ea = 0; ea < 2; ++ea)
        for (int eb = 0; eb < 2; ++eb) {
            cxd& p1 = s.amp[InterferometerState::idx(1, 0, ea, eb)];
            cxd& p2 = s.amp[InterferometerState::idx(0, 1, ea, eb)];
            const cxd a = p1, b = p2;
            if (reversed) {
                p1 = r * (a - b);
                p2 = r * (a + b);
            } else {
                p1 = r * (a + b);
                p2 = r * (-a + b);
            }
        }
}

// Spin-dependent reflection: the photon reflects with a pi phase when the
// cavity qubit is |0> and is lost otherwise.
inline void cavities(InterferometerState& s) {
    for (int ea = 0; ea < 2; ++ea)
        for (int eb = 0; eb < 2; ++eb) {
            cxd& p1 = s.amp[InterferometerState::idx(1, 0, ea, eb)];
            if (ea == 0) {
                p1 = -p1;
            } else {
                s.sink += std::norm(p1);
                p1 = 0.0;
            }
            cxd& p2 = s.amp[InterferometerState::idx(0, 1, ea, eb)];
            if (eb == 0) {
                p2 = -p2;
            } else {
                s.sink += std::norm(p2);
                p2 = 0.0;
            }
        }
}

}  // namespace detail

inline InterferometerState interferometer_after_bs1(QubitSign a, QubitSign b) {
    InterferometerState s = interferometer_initial(a, b);
    detail::beam_splitter(s, /*reversed=*/true);
    return s;
}
inline InterferometerState interferometer_after_cavities(QubitSign a, QubitSign b) {
    InterferometerState s = interferometer_after_bs1(a, b);
    detail::cavities(s);
    return s;
}
inline InterferometerState interferometer_after_bs2(QubitSign a, QubitSign b) {
    InterferometerState s = interferometer_after_cavities(a, b);
    detail::beam_splitter(s, /*reversed=*/false);
    return s;
}

struct PhotonicResult {
    TwoQubitResource projected;     // stationary-qubit state after a dark-port click
    double success_probability = 0.0;
};

// Run the photonic scheme and postselect a click at the dark port
// (channel 2). Success probability is 1/8 for ideal optics.
inline PhotonicResult run_photonic(QubitSign init_a, QubitSign init_b) {
    InterferometerState s = interferometer_after_bs2(init_a, init_b);
    CMatrix phi(2, 2);
    double p = 0.0;
    for (int ea = 0; ea < 2; ++ea)
        for (int eb = 0; eb < 2; ++eb) {
            const cxd z = s.amp[InterferometerState::idx(0, 1, ea, eb)];
            phi(ea, eb) = z;
            p += std::norm(z);
        }
    phi *= 1.0 / std::sqrt(p);
    return {TwoQubitResource(std::move(phi)), p};
}

enum class DrivePulse { none, pi, pi_half };

// Rotate one qubit of a photonic Bell resource: a pi pulse turns psi-type
// into phi-type Bell states, a pi/2 pulse into a cluster-class state.
inline TwoQubitResource resource_from_photonic(const TwoQubitResource& base,
                                               DrivePulse drive) {
    if (std::abs(base.phi_ee(0, 0)) > 1e-9 || std::abs(base.phi_ee(1, 1)) > 1e-9)
        throw std::invalid_argument("resource_from_photonic: base must be a psi-type state");
    if (drive == DrivePulse::none) return base;
    // Rotation sense chosen so psi-plus lands on the canonical cluster matrix.
    const double angle = (drive == DrivePulse::pi) ? -M_PI : -M_PI / 2.0;
    const double cs = std::cos(angle / 2.0), sn = std::sin(angle / 2.0);
    CMatrix ry(2, 2);
    ry(0, 0) = cs;
    ry(0, 1) = -sn;
    ry(1, 0) = sn;
    ry(1, 1) = cs;
    return TwoQubitResource(base.phi_ee * ry.transpose());
}

// ---------------------------------------------------------------------------
// Multipartite chain of M qudits.

inline constexpr std::int64_t MULTI_CAPACITY = 65536;

struct MultiQuditState {
    int m = 0;  // node count
    int d = 0;
    std::vector<cxd> amp;  // length d^m, node 0 is the most significant digit

    MultiQuditState(int nodes, int dim) : m(nodes), d(dim) {
        if (nodes < 1 || dim < 2)
            throw std::invalid_argument("MultiQuditState: need m >= 1 nodes of dimension >= 2");
        std::int64_t len = 1;
        for (int i = 0; i < nodes; ++i) {
            len *= dim;
            if (len > MULTI_CAPACITY)
                throw std::invalid_argument("MultiQuditState: d^M exceeds the capacity limit");
        }
        amp.assign(static_cast<size_t>(len), cxd(0.0, 0.0));
    }

    double norm2() const {
        double s = 0.0;
        for (const cxd& z : amp) s += std::norm(z);
        return s;
    }
    void normalize() {
        const double inv = 1.0 / std::sqrt(norm2());
        for (cxd& z : amp) z *= inv;
    }
    int digit(std::int64_t index, int node) const {
        std::int64_t div = 1;
        for (int k = m - 1; k > node; --k) div *= d;
        return static_cast<int>((index / div) % d);
    }
};

inline MultiQuditState all_plus_chain(int nodes, int d) {
    MultiQuditState s(nodes, d);
    const double a = std::pow(static_cast<double>(d), -0.5 * nodes);
    for (cxd& z : s.amp) z = a;
    return s;
}

inline MultiQuditState ghz_state(int nodes, int d) {
    MultiQuditState s(nodes, d);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    std::int64_t stride = 0;  // 1 + d + d^2 + ... selects |i,i,...,i>
    for (int k = 0; k < nodes; ++k) stride = stride * d + 1;
    for (int i = 0; i < d; ++i) s.amp[static_cast<size_t>(i) * stride] = a;
    return s;
}

inline double ghz_fidelity(const MultiQuditState& state) {
    if (std::abs(state.norm2() - 1.0) > 1e-6)
        throw std::invalid_argument("ghz_fidelity: state must be normalized");
    const MultiQuditState target = ghz_state(state.m, state.d);
    cxd overlap = 0.0;
    for (size_t i = 0; i < state.amp.size(); ++i)
        overlap += std::conj(target.amp[i]) * state.amp[i];
    return std::norm(overlap);
}

struct PairOutcome {
    std::vector<std::pair<int, int>> record;
    double probability = 0.0;
    MultiQuditState state;
};

// One transfer iteration on the qudit pair (ka, kb) of an M-qudit chain.
// The effective gates are diagonal, acting on the two index slots only.
inline std::vector<PairOutcome> apply_pair_iteration(const MultiQuditState& state,
                                                     std::pair<int, int> pair,
                                                     const IterationSpec& spec,
                                                     const NodeParams& node_a,
                                                     const NodeParams& node_b) {
    const auto [ka, kb] = pair;
    if (ka == kb || ka < 0 || kb < 0 || ka >= state.m || kb >= state.m)
        throw std::invalid_argument("apply_pair_iteration: node indices out of range");
    if (node_a.d != state.d || node_b.d != state.d)
        throw std::invalid_argument("apply_pair_iteration: node dimension mismatch");

    const CMatrix ua0 = conditional_unitary(node_a, 0, spec.phi_a);
    const CMatrix ua1 = conditional_unitary(node_a, 1, spec.phi_a);
    const CMatrix ub0 = conditional_unitary(node_b, 0, spec.phi_b);
    const CMatrix ub1 = conditional_unitary(node_b, 1, spec.phi_b);
    const std::array<const CMatrix*, 2> ua = {&ua0, &ua1};
    const std::array<const CMatrix*, 2> ub = {&ub0, &ub1};

    std::vector<PairOutcome> leaves;
    for (int ja = 0; ja < 2; ++ja)
        for (int jb = 0; jb < 2; ++jb) {
            if (!spec.keeps(ja, jb)) continue;
            MultiQuditState branch(state.m, state.d);
            for (size_t n = 0; n < state.amp.size(); ++n) {
                if (state.amp[n] == cxd(0.0, 0.0)) continue;
                const int ia = state.digit(static_cast<std::int64_t>(n), ka);
                const int ib = state.digit(static_cast<std::int64_t>(n), kb);
                cxd f = 0.0;
                for (int jap = 0; jap < 2; ++jap)
                    for (int jbp = 0; jbp < 2; ++jbp)
                        f += eta(ja, jap) * eta(jb, jbp) * spec.resource.c(jap, jbp) *
                             (*ua[jap])(ia, ia) * (*ub[jbp])(ib, ib);
                branch.amp[n] = 0.5 * f * state.amp[n];
            }
            const double p = branch.norm2();
            if (p < PROB_FLOOR) continue;
            const double inv = 1.0 / std::sqrt(p);
            for (cxd& z : branch.amp) z *= inv;
            leaves.push_back(PairOutcome{{{ja, jb}}, p, std::move(branch)});
        }
    return leaves;
}

// Run a sequence of (pair, iteration) steps from a common initial chain
// state, branching over surviving outcomes.
inline std::vector<PairOutcome> run_pair_schedule(
    const MultiQuditState& initial,
    const std::vector<std::pair<std::pair<int, int>, IterationSpec>>& steps,
    const NodeParams& node) {
    std::vector<PairOutcome> frontier;
    MultiQuditState start = initial;
    start.normalize();
    frontier.push_back(PairOutcome{{}, 1.0, std::move(start)});
    for (const auto& [pair, spec] : steps) {
        std::vector<PairOutcome> next;
        for (const PairOutcome& parent : frontier) {
            auto children = apply_pair_iteration(parent.state, pair, spec, node, node);
            for (PairOutcome& child : children) {
                auto record = parent.record;
                record.push_back(child.record.front());
                child.record = std::move(record);
                child.probability *= parent.probability;
                if (child.probability < PROB_FLOOR) continue;
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    return frontier;
}

}  // namespace qet
