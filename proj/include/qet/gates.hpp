// gates.hpp — conditional phase unitaries of the node model, the effective
// (non-unitary) transfer gate, and application of measurement iterations
// with outcome bookkeeping.
//
// A node is a defect center whose electron qubit conditions a z-axis phase
// rotation of the nuclear qudit. One iteration: prepare an electron-pair
// resource state, apply the conditional gate in each node, measure both
// electrons in the X basis. The nuclear pair branches into four outcomes.

#pragma once

#include "qet/kernel.hpp"
#include "qet/states.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace qet {

// Branches with weight below this are measurement outcomes that cannot
// occur; they are dropped from outcome trees.
inline constexpr double PROB_FLOOR = 1e-12;

struct NodeParams {
    int d;            // qudit dimension
    double xi = 0.0;  // electron level splitting over net Ising coupling

    NodeParams(int dim, double splitting_ratio = 0.0) : d(dim), xi(splitting_ratio) {
        if (d < 2) throw std::invalid_argument("NodeParams: d must be >= 2");
    }
};

enum class Postselect { none, equal, unequal, explicit_set };

struct IterationSpec {
    TwoQubitResource resource;
    double phi_a;
    double phi_b;
    Postselect rule = Postselect::none;
    std::vector<std::pair<int, int>> allowed_outcomes;  // used when rule == explicit_set

    IterationSpec(TwoQubitResource res, double pa, double pb,
                  Postselect r = Postselect::none,
                  std::vector<std::pair<int, int>> allowed = {})
        : resource(std::move(res)), phi_a(pa), phi_b(pb), rule(r),
          allowed_outcomes(std::move(allowed)) {
        if (!std::isfinite(phi_a) || !std::isfinite(phi_b))
            throw std::invalid_argument("IterationSpec: phases must be finite");
    }

    bool keeps(int ja, int jb) const {
        switch (rule) {
            case Postselect::none: return true;
            case Postselect::equal: return ja == jb;
            case Postselect::unequal: return ja != jb;
            case Postselect::explicit_set:
                for (const auto& [a, b] : allowed_outcomes)
                    if (a == ja && b == jb) return true;
                return false;
        }
        return true;
    }
};

using Scheme = std::vector<IterationSpec>;

// One leaf of the measurement-outcome tree. The state is stored normalized;
// the branch probability is carried separately.
struct OutcomeNode {
    std::vector<std::pair<int, int>> record;
    double probability = 0.0;
    TwoQuditState state;
    double ebits = 0.0;
};

// eta_{j j'} = -1 exactly for (j, j') = (0, 1), else +1.
inline double eta(int j, int jprime) { return (j == 0 && jprime == 1) ? -1.0 : 1.0; }

// Diagonal conditional gate: entries exp(-i (-1)^j phi (m + xi) / 2) with
// m = I - i running down the magnetic ladder, I = (d-1)/2.
inline CMatrix conditional_unitary(const NodeParams& node, int j, double phi) {
    const double sign = (j == 0) ? 1.0 : -1.0;
    const double spin = 0.5 * (node.d - 1);
    CMatrix u(node.d, node.d);
    for (int i = 0; i < node.d; ++i) {
        const double m = spin - i;
        u(i, i) = std::exp(cxd(0.0, -sign * phi * (m + node.xi) * 0.5));
    }
    return u;
}

namespace detail {

inline void require_unitary_square(const CMatrix& u, const char* what) {
    if (u.rows() != u.cols())
        throw std::invalid_argument(std::string(what) + ": gate must be square");
    if (unitarity_defect(u) > 1e-6)
        throw std::invalid_argument(std::string(what) + ": gate must be unitary");
}

}  // namespace detail

// Effective gate T_{ja jb} on the joint nuclear space. Generally not
// unitary: it encodes the measurement projection.
inline CMatrix transfer_gate(const TwoQubitResource& res, const CMatrix& ua0,
                             const CMatrix& ua1, const CMatrix& ub0, const CMatrix& ub1,
                             int ja, int jb) {
    detail::require_unitary_square(ua0, "transfer_gate");
    detail::require_unitary_square(ua1, "transfer_gate");
    detail::require_unitary_square(ub0, "transfer_gate");
    detail::require_unitary_square(ub1, "transfer_gate");
    if (ua0.rows() != ua1.rows() || ub0.rows() != ub1.rows())
        throw std::invalid_argument("transfer_gate: per-node gate dimensions differ");
    const std::array<const CMatrix*, 2> ua = {&ua0, &ua1};
    const std::array<const CMatrix*, 2> ub = {&ub0, &ub1};
    CMatrix t(ua0.rows() * ub0.rows(), ua0.cols() * ub0.cols());
    for (int jap = 0; jap < 2; ++jap)
        for (int jbp = 0; jbp < 2; ++jbp) {
            const cxd w = 0.5 * eta(ja, jap) * eta(jb, jbp) * res.c(jap, jbp);
            if (w == cxd(0.0, 0.0)) continue;
            t += w * kron(*ua[jap], *ub[jbp]);
        }
    return t;
}

// One iteration with explicit diagonal conditional gates (given as the four
// d x d unitaries). Returns the surviving outcome leaves; probabilities of
// all four branches always sum to the squared norm of the input.
inline std::vector<OutcomeNode> apply_iteration_gates(
    const TwoQuditState& state, const TwoQubitResource& res, const CMatrix& ua0,
    const CMatrix& ua1, const CMatrix& ub0, const CMatrix& ub1,
    const IterationSpec* select = nullptr) {
    const int da = state.da(), db = state.db();
    if (ua0.rows() != da || ub0.rows() != db)
        throw std::invalid_argument("apply_iteration: gate/state dimension mismatch");
    const std::array<const CMatrix*, 2> ua = {&ua0, &ua1};
    const std::array<const CMatrix*, 2> ub = {&ub0, &ub1};

    std::vector<OutcomeNode> leaves;
    for (int ja = 0; ja < 2; ++ja)
        for (int jb = 0; jb < 2; ++jb) {
            if (select && !select->keeps(ja, jb)) continue;
            CMatrix branch(da, db);
            for (int i = 0; i < da; ++i)
                for (int k = 0; k < db; ++k) {
                    cxd f = 0.0;
                    for (int jap = 0; jap < 2; ++jap)
                        for (int jbp = 0; jbp < 2; ++jbp)
                            f += eta(ja, jap) * eta(jb, jbp) * res.c(jap, jbp) *
                                 (*ua[jap])(i, i) * (*ub[jbp])(k, k);
                    branch(i, k) = 0.5 * f * state.psi(i, k);
                }
            const double p = branch.frobenius_norm2();
            if (p < PROB_FLOOR) continue;
            branch *= 1.0 / std::sqrt(p);
            TwoQuditState leaf_state(std::move(branch));
            const double e = entanglement(leaf_state);
            leaves.push_back(OutcomeNode{{{ja, jb}}, p, std::move(leaf_state), e});
        }
    return leaves;
}

// One iteration of the node model: gates built from the iteration phases.
inline std::vector<OutcomeNode> apply_iteration(const TwoQuditState& state,
                                                const IterationSpec& spec,
                                                const NodeParams& node_a,
                                                const NodeParams& node_b) {
    if (node_a.d != state.da() || node_b.d != state.db())
        throw std::invalid_argument("apply_iteration: node/state dimension mismatch");
    const CMatrix ua0 = conditional_unitary(node_a, 0, spec.phi_a);
    const CMatrix ua1 = conditional_unitary(node_a, 1, spec.phi_a);
    const CMatrix ub0 = conditional_unitary(node_b, 0, spec.phi_b);
    const CMatrix ub1 = conditional_unitary(node_b, 1, spec.phi_b);
    return apply_iteration_gates(state, spec.resource, ua0, ua1, ub0, ub1, &spec);
}

// Full outcome tree of a scheme. Leaf probabilities multiply down the tree;
// without postselection they sum to 1, with postselection to the success
// probability.
inline std::vector<OutcomeNode> outcome_tree(const TwoQuditState& initial,
                                             const Scheme& scheme,
                                             const NodeParams& node_a,
                                             const NodeParams& node_b) {
    std::vector<OutcomeNode> frontier;
    frontier.push_back(OutcomeNode{{}, 1.0, initial.normalized(),
                                   entanglement(initial.normalized())});
    for (const IterationSpec& spec : scheme) {
        std::vector<OutcomeNode> next;
        for (const OutcomeNode& parent : frontier) {
            std::vector<OutcomeNode> children =
                apply_iteration(parent.state, spec, node_a, node_b);
            for (OutcomeNode& child : children) {
                std::vector<std::pair<int, int>> record = parent.record;
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

// Expected entanglement over leaves; conditional = renormalized by the
// survival probability (postselected statistics).
inline double expected_entanglement(const std::vector<OutcomeNode>& leaves,
                                    bool conditional = false) {
    double pe = 0.0, p = 0.0;
    for (const OutcomeNode& leaf : leaves) {
        pe += leaf.probability * leaf.ebits;
        p += leaf.probability;
    }
    if (!conditional) return pe;
    if (p <= 0.0) throw std::invalid_argument("expected_entanglement: zero survival");
    return pe / p;
}

inline double total_probability(const std::vector<OutcomeNode>& leaves) {
    double p = 0.0;
    for (const OutcomeNode& leaf : leaves) p += leaf.probability;
    return p;
}

}  // namespace qet
