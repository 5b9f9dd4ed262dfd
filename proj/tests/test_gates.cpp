#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qet/gates.hpp"
#include "qet/schemes.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace qet;
using test::Rng;

namespace {

TwoQubitResource random_resource(Rng& rng) {
    CMatrix m = test::random_matrix(rng, 2, 2);
    m *= 1.0 / m.frobenius_norm();
    return TwoQubitResource(std::move(m));
}

}  // namespace

TEST_CASE("conditional unitary diagonal entries") {
    NodeParams node(2, 0.0);
    // phi = 0 gives the identity for both branches.
    for (int j : {0, 1})
        CHECK(test::max_abs_diff(conditional_unitary(NodeParams(5, 3.7), j, 0.0),
                                 CMatrix::identity(5)) < 1e-15);

    // d=2, xi=0, phi=pi, j=0 -> diag(e^{-i pi/4}, e^{+i pi/4}).
    CMatrix u = conditional_unitary(node, 0, M_PI);
    CHECK(std::abs(u(0, 0) - std::exp(cxd(0, -M_PI / 4))) < 1e-14);
    CHECK(std::abs(u(1, 1) - std::exp(cxd(0, M_PI / 4))) < 1e-14);

    // Branch 1 is the complex conjugate of branch 0; their product is 1.
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        NodeParams n(rng.integer(2, 16), rng.uniform(-30, 30));
        const double phi = rng.uniform(-10, 10);
        CMatrix u0 = conditional_unitary(n, 0, phi);
        CMatrix u1 = conditional_unitary(n, 1, phi);
        CHECK(test::max_abs_diff(u1, u0.conjugate()) < 1e-14);
        CHECK(test::max_abs_diff(u1 * u0, CMatrix::identity(n.d)) < 1e-13);
    }
}

TEST_CASE("eta sign table") {
    CHECK(eta(0, 1) == -1.0);
    CHECK(eta(0, 0) == 1.0);
    CHECK(eta(1, 0) == 1.0);
    CHECK(eta(1, 1) == 1.0);
}

TEST_CASE("transfer gate with identity conditional gates") {
    CMatrix id = CMatrix::identity(3);
    auto psi_plus = TwoQubitResource::psi_plus();
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(test::max_abs_diff(transfer_gate(psi_plus, id, id, id, id, 0, 0),
                             CMatrix::identity(9) * cxd(-r, 0)) < 1e-14);
    CHECK(transfer_gate(psi_plus, id, id, id, id, 0, 1).frobenius_norm() < 1e-14);
    CHECK(transfer_gate(psi_plus, id, id, id, id, 1, 0).frobenius_norm() < 1e-14);
    CHECK(test::max_abs_diff(transfer_gate(psi_plus, id, id, id, id, 1, 1),
                             CMatrix::identity(9) * cxd(r, 0)) < 1e-14);

    CMatrix c00(2, 2);
    c00(0, 0) = 1.0;
    TwoQubitResource separable(std::move(c00));
    CMatrix id2 = CMatrix::identity(2);
    for (int ja = 0; ja < 2; ++ja)
        for (int jb = 0; jb < 2; ++jb)
            CHECK(test::max_abs_diff(transfer_gate(separable, id2, id2, id2, id2, ja, jb),
                                     CMatrix::identity(4) * cxd(0.5, 0)) < 1e-14);

    CHECK_THROWS_AS(transfer_gate(psi_plus, id, id, id2, id, 0, 0), std::invalid_argument);
}

TEST_CASE("transfer gate agrees with the entrywise iteration") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = rng.integer(2, 5);
        NodeParams na(d, rng.uniform(0, 10)), nb(d, rng.uniform(0, 10));
        TwoQubitResource res = random_resource(rng);
        const double pa = rng.uniform(0, 2 * M_PI), pb = rng.uniform(0, 2 * M_PI);
        TwoQuditState st = test::random_state(rng, d, d);
        IterationSpec spec(res, pa, pb);
        auto leaves = apply_iteration(st, spec, na, nb);

        CMatrix ua0 = conditional_unitary(na, 0, pa), ua1 = conditional_unitary(na, 1, pa);
        CMatrix ub0 = conditional_unitary(nb, 0, pb), ub1 = conditional_unitary(nb, 1, pb);
        for (const auto& leaf : leaves) {
            const auto [ja, jb] = leaf.record.front();
            CMatrix t = transfer_gate(res, ua0, ua1, ub0, ub1, ja, jb);
            // Apply t to the flattened state and compare with the leaf.
            std::vector<cxd> vec(static_cast<size_t>(d) * d);
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) vec[static_cast<size_t>(i) * d + k] = st.psi(i, k);
            CMatrix out(d, d);
            for (int r = 0; r < d * d; ++r) {
                cxd acc = 0.0;
                for (int c = 0; c < d * d; ++c) acc += t(r, c) * vec[static_cast<size_t>(c)];
                out(r / d, r % d) = acc;
            }
            const double p = out.frobenius_norm2();
            CHECK(p == doctest::Approx(leaf.probability).epsilon(1e-10));
            out *= 1.0 / std::sqrt(p);
            CHECK(test::phase_aligned_distance(out, leaf.state.psi) < 1e-10);
        }
    }
}

TEST_CASE("first iteration at the discrete angles transfers one ebit") {
    const int d = 8;
    NodeParams node(d, 20.0);
    for (int k = 1; k < d; ++k) {
        IterationSpec spec(TwoQubitResource::psi_plus(), 2 * M_PI * k / d, 2 * M_PI * k / d);
        auto leaves = apply_iteration(plus_state(d), spec, node, node);
        CHECK(expected_entanglement(leaves) == doctest::Approx(1.0).epsilon(1e-9));
        for (const auto& leaf : leaves)
            CHECK(leaf.probability == doctest::Approx(0.25).epsilon(1e-9));
    }
}

TEST_CASE("unequal outcomes carry one ebit for any phase") {
    Rng rng(29);
    NodeParams node(8, 20.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double phi = rng.uniform(0.3, 2 * M_PI - 0.3);
        IterationSpec spec(TwoQubitResource::psi_plus(), phi, phi);
        auto leaves = apply_iteration(plus_state(8), spec, node, node);
        for (const auto& leaf : leaves) {
            const auto [ja, jb] = leaf.record.front();
            if (ja != jb) CHECK(leaf.ebits == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("outcome tree basics") {
    NodeParams node(3, 20.0);
    // Empty scheme: one leaf, probability 1, initial state.
    auto leaves = outcome_tree(plus_state(3), {}, node, node);
    REQUIRE(leaves.size() == 1);
    CHECK(leaves[0].probability == doctest::Approx(1.0));
    CHECK(test::max_abs_diff(leaves[0].state.psi, plus_state(3).psi) < 1e-12);

    // Postselected power-of-two set reaches the qudit Bell state at 1/d.
    Scheme scheme = uniform_scheme(TwoQubitResource::psi_plus(), {M_PI, M_PI / 2},
                                   Postselect::equal);
    leaves = outcome_tree(plus_state(3), scheme, node, node);
    CHECK(total_probability(leaves) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    for (const auto& leaf : leaves) {
        CHECK(leaf.ebits == doctest::Approx(std::log2(3.0)).epsilon(1e-9));
        CHECK(test::phase_aligned_distance(leaf.state.psi, qudit_bell(3).psi) < 1e-9);
    }

    // d=4, no postselection: all 16 leaves maximally entangled.
    NodeParams n4(4, 20.0);
    Scheme s4 = uniform_scheme(TwoQubitResource::psi_plus(), {M_PI / 2, M_PI},
                               Postselect::none);
    leaves = outcome_tree(plus_state(4), s4, n4, n4);
    CHECK(leaves.size() == 16);
    for (const auto& leaf : leaves) CHECK(leaf.ebits == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("probability conservation on random inputs") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.integer(2, 8);
        NodeParams na(d, rng.uniform(-25, 25)), nb(d, rng.uniform(-25, 25));
        TwoQuditState st = test::random_state(rng, d, d);
        IterationSpec spec(random_resource(rng), rng.uniform(0, 2 * M_PI),
                           rng.uniform(0, 2 * M_PI));
        auto leaves = apply_iteration(st, spec, na, nb);
        CHECK(total_probability(leaves) == doctest::Approx(st.norm2()).epsilon(1e-9));
    }
}

TEST_CASE("phase order does not change the outcome statistics") {
    Rng rng(57);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.integer(2, 6);
        NodeParams node(d, rng.uniform(0, 25));
        TwoQubitResource res = random_resource(rng);
        std::vector<double> phis = {rng.uniform(0, 2 * M_PI), rng.uniform(0, 2 * M_PI)};
        if (trial % 3 == 0) phis.push_back(rng.uniform(0, 2 * M_PI));
        auto collect = [&](const std::vector<double>& order) {
            auto leaves = outcome_tree(plus_state(d), uniform_scheme(res, order, Postselect::none),
                                       node, node);
            std::vector<std::pair<double, double>> pe;
            for (const auto& leaf : leaves) pe.emplace_back(leaf.probability, leaf.ebits);
            std::sort(pe.begin(), pe.end());
            return pe;
        };
        std::vector<double> shuffled = phis;
        std::reverse(shuffled.begin(), shuffled.end());
        auto a = collect(phis), b = collect(shuffled);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(std::abs(a[i].first - b[i].first) < 1e-9);
            CHECK(std::abs(a[i].second - b[i].second) < 1e-9);
        }
    }
}

TEST_CASE("rank doubles with each fresh generic phase") {
    // Once 2^rounds exceeds d, leaves whose record holds an odd number of
    // unequal outcomes have an antisymmetric coefficient matrix and stop one
    // short of an odd d; all other leaves reach min(2^rounds, d).
    Rng rng(91);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.integer(2, 8);
        NodeParams node(d, rng.uniform(0, 25));
        const int rounds = rng.integer(1, 3);
        std::vector<double> phis;
        for (int r = 0; r < rounds; ++r) phis.push_back(rng.uniform(0.15, 2 * M_PI - 0.15));
        auto leaves = outcome_tree(plus_state(d),
                                   uniform_scheme(TwoQubitResource::psi_plus(), phis,
                                                  Postselect::none),
                                   node, node);
        for (const auto& leaf : leaves) {
            int unequal = 0;
            for (const auto& [ja, jb] : leaf.record) unequal += (ja != jb);
            const int cap = (unequal % 2 == 1) ? d - d % 2 : d;
            CHECK(schmidt(leaf.state).rank == std::min(1 << rounds, cap));
        }
    }
}

TEST_CASE("expected entanglement is 2pi-periodic in each phase") {
    // Shifting one phase by 2pi relabels the measurement outcomes when the
    // resource is psi-type (any xi) or when 2 xi is an integer; those are
    // the settings the accumulation schemes use.
    Rng rng(131);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.integer(2, 6);
        const bool psi_type = (trial % 2 == 0);
        const double xi =
            psi_type ? rng.uniform(-25, 25) : 0.5 * rng.integer(-50, 50);
        NodeParams node(d, xi);
        TwoQubitResource res =
            psi_type ? (trial % 4 ? TwoQubitResource::psi_plus() : TwoQubitResource::psi_minus())
                     : random_resource(rng);
        std::vector<double> phis = {rng.uniform(0, 2 * M_PI), rng.uniform(0, 2 * M_PI)};
        std::vector<double> shifted = phis;
        shifted[trial % 2] += 2 * M_PI;
        auto e0 = expected_entanglement(outcome_tree(
            plus_state(d), uniform_scheme(res, phis, Postselect::none), node, node));
        auto e1 = expected_entanglement(outcome_tree(
            plus_state(d), uniform_scheme(res, shifted, Postselect::none), node, node));
        CHECK(std::abs(e0 - e1) < 1e-9);
    }
}

TEST_CASE("psi resources are insensitive to the splitting ratio") {
    Rng rng(151);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.integer(2, 6);
        TwoQubitResource res =
            (trial % 2) ? TwoQubitResource::psi_plus() : TwoQubitResource::psi_minus();
        TwoQuditState st = test::random_state(rng, d, d);
        const double phi = rng.uniform(0, 2 * M_PI);
        const double xi1 = rng.uniform(-40, 40), xi2 = rng.uniform(-40, 40);
        IterationSpec spec(res, phi, phi);
        auto l1 = apply_iteration(st, spec, NodeParams(d, xi1), NodeParams(d, xi1));
        auto l2 = apply_iteration(st, spec, NodeParams(d, xi2), NodeParams(d, xi2));
        REQUIRE(l1.size() == l2.size());
        for (size_t i = 0; i < l1.size(); ++i) {
            CHECK(std::abs(l1[i].ebits - l2[i].ebits) < 1e-9);
            CHECK(std::abs(l1[i].probability - l2[i].probability) < 1e-9);
        }
    }
}
