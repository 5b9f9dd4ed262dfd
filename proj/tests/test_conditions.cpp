#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qet/conditions.hpp"
#include "qet/schemes.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace qet;
using test::Rng;
using test::oracle_index_allowed;

namespace {

std::vector<int> deterministic_indices(int d) {
    std::vector<int> ks;
    for (int nu = 1; nu <= max_iterations_floor(d); ++nu) ks.push_back(1 << (nu - 1));
    return ks;
}

}  // namespace

TEST_CASE("complete transfer holds at the discrete first-round angles") {
    for (int d : {2, 3, 4, 6, 8}) {
        NodeParams node(d, 13.7);
        for (int k = 1; k < d; ++k) {
            const double phi = 2.0 * M_PI * k / d;
            TransferCheck tc = check_complete_transfer(
                plus_state(d), conditional_unitary(node, 0, phi),
                conditional_unitary(node, 1, phi), conditional_unitary(node, 0, phi),
                conditional_unitary(node, 1, phi));
            CHECK(tc.ok);
            CHECK(tc.residual_a < 1e-9);
        }
    }
}

TEST_CASE("complete transfer fails at a generic angle") {
    NodeParams node(4, 0.0);
    const double phi = M_PI / 3;
    TransferCheck tc = check_complete_transfer(
        plus_state(4), conditional_unitary(node, 0, phi), conditional_unitary(node, 1, phi),
        conditional_unitary(node, 0, phi), conditional_unitary(node, 1, phi));
    CHECK(!tc.ok);
    // Oracle: <+4| Z_{2phi} |+4> evaluated directly.
    cxd overlap = 0.0;
    const CMatrix z = conditional_unitary(node, 0, 2 * phi);
    const CMatrix plus = plus_qudit(4);
    for (int i = 0; i < 4; ++i) overlap += std::conj(plus(i, 0)) * z(i, i) * plus(i, 0);
    CHECK(std::abs(overlap) > 1e-3);
    CHECK(tc.residual_a == doctest::Approx(std::abs(overlap)).epsilon(1e-9));
}

TEST_CASE("complete transfer rejects states of rank above d/2") {
    // Rank-3 state in d=4.
    CMatrix m(4, 4);
    m(0, 0) = std::sqrt(0.5);
    m(1, 1) = std::sqrt(0.3);
    m(2, 2) = std::sqrt(0.2);
    NodeParams node(4, 0.0);
    const double phi = M_PI / 2;
    TransferCheck tc = check_complete_transfer(
        TwoQuditState(std::move(m)), conditional_unitary(node, 0, phi),
        conditional_unitary(node, 1, phi), conditional_unitary(node, 0, phi),
        conditional_unitary(node, 1, phi));
    CHECK(!tc.ok);
    CHECK(tc.reason == "rank exceeds d/2");
}

TEST_CASE("transfer verdicts do not depend on the splitting ratio") {
    Rng rng(19);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = rng.integer(2, 8);
        const int k = rng.integer(1, d - 1);
        const bool on_grid = trial % 2 == 0;
        const double phi = on_grid ? 2.0 * M_PI * k / d : rng.uniform(0.1, 1.0);
        auto verdict = [&](double xi) {
            NodeParams node(d, xi);
            return check_complete_transfer(plus_state(d), conditional_unitary(node, 0, phi),
                                           conditional_unitary(node, 1, phi),
                                           conditional_unitary(node, 0, phi),
                                           conditional_unitary(node, 1, phi))
                .ok;
        };
        CHECK(verdict(0.0) == verdict(rng.uniform(-40, 40)));
    }
}

TEST_CASE("allowed indices: examples") {
    CHECK(allowed_indices(8, {1}) == std::vector<int>{2, 3, 4, 5, 6});
    CHECK(allowed_indices(6, {1, 2}).empty());
    std::vector<int> all;
    for (int k = 1; k <= 6; ++k) all.push_back(k);
    CHECK(allowed_indices(7, {}) == all);
    CHECK_THROWS_AS(allowed_indices(4, {5}), std::invalid_argument);
}

TEST_CASE("allowed indices: second round excludes k1 and d-k1") {
    for (int d = 4; d <= 16; ++d)
        for (int k1 = 1; k1 < d; ++k1) {
            auto allowed = allowed_indices(d, {k1});
            std::set<int> got(allowed.begin(), allowed.end());
            CHECK(!got.count(k1));
            CHECK(!got.count(d - k1));
            for (int k = 1; k < d; ++k)
                if (k != k1 && k != d - k1) CHECK(got.count(k));
        }
}

TEST_CASE("allowed indices agree with the brute-force state oracle") {
    Rng rng(3);
    for (int d = 2; d <= 10; ++d) {
        // Depth 0, 1, 2 previous sets (nu <= 3).
        std::vector<std::vector<int>> prevs = {{}};
        for (int trial = 0; trial < 3; ++trial) {
            prevs.push_back({rng.integer(1, d - 1)});
            if (d > 2) prevs.push_back({rng.integer(1, d - 1), rng.integer(1, d - 1)});
        }
        for (const auto& prev : prevs) {
            auto allowed = allowed_indices(d, prev);
            std::set<int> got(allowed.begin(), allowed.end());
            const double xi = rng.uniform(-10, 10);
            for (int k = 1; k < d; ++k)
                CHECK(oracle_index_allowed(d, prev, k, xi) == (got.count(k) != 0));
        }
    }
}

TEST_CASE("no further iteration is allowed beyond the deterministic set") {
    for (int d : {3, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15}) {
        CHECK(allowed_indices(d, deterministic_indices(d)).empty());
    }
    // Powers of two keep exactly the next power available until maxed out.
    for (int d : {4, 8, 16}) {
        auto ks = deterministic_indices(d);
        ks.pop_back();
        auto allowed = allowed_indices(d, ks);
        CHECK(std::find(allowed.begin(), allowed.end(), d / 2) != allowed.end());
    }
}

TEST_CASE("maximal-entanglement conditions: constructed d=3 case passes when tuned") {
    const std::vector<double> s = {2.0 / 3.0, 1.0 / 3.0, 0.0};
    for (double xi : {0.0, 2.0, 20.0}) {
        CMatrix u = d3_final_gate_matrix(xi, 0.4);
        MaxEntReport rep = check_maxent_conditions(s, u, u, TwoQubitResource::cluster());
        CHECK(rep.resource_max_entangled);
        CHECK(rep.resource_form_ok);
        CHECK(rep.resource_class == ResourceClass::cluster);
        CHECK(rep.pairing.pairing_ok);
        CHECK(rep.blocks.antidiagonal_ok_a);
        CHECK(rep.blocks.swap_residual_a < 1e-9);
        CHECK(rep.commutator_residual < 1e-9);
        CHECK(rep.scalar_residual < 1e-9);
        CHECK(rep.pass);
    }
    // Odd splitting ratio violates the scalar condition on the central block.
    CMatrix u21 = d3_final_gate_matrix(21.0);
    MaxEntReport bad = check_maxent_conditions(s, u21, u21, TwoQubitResource::cluster());
    CHECK(!bad.pass);
    CHECK(bad.scalar_residual > 1e-3);
    CHECK(bad.pairing.pairing_ok);  // pairing itself is unaffected by xi
}

TEST_CASE("maximal-entanglement conditions: pairing failures") {
    // Even-ranked state with equal weights cannot pair around 1/3.
    const std::vector<double> s = {0.5, 0.5, 0.0};
    CMatrix u = d3_final_gate_matrix(0.0);
    MaxEntReport rep = check_maxent_conditions(s, u, u, TwoQubitResource::cluster());
    CHECK(!rep.pairing.pairing_ok);
    CHECK(!rep.pass);
}

TEST_CASE("maximal-entanglement conditions: input validation") {
    const std::vector<double> s = {2.0 / 3.0, 1.0 / 3.0, 0.0};
    CHECK_THROWS_AS(
        check_maxent_conditions(s, CMatrix::identity(2), CMatrix::identity(2),
                                TwoQubitResource::cluster()),
        std::invalid_argument);
    CHECK_THROWS_AS(
        check_maxent_conditions({0.9, 0.4, 0.0}, d3_final_gate_matrix(0.0),
                                d3_final_gate_matrix(0.0), TwoQubitResource::cluster()),
        std::invalid_argument);
}

TEST_CASE("maximal-entanglement conditions: no pairing constraint for d=2") {
    // Any normalized pair (lp, lm) sums to 1 = 2/d.
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const double lp = rng.uniform(0.5, 1.0);
        CMatrix u(2, 2);
        u(0, 1) = 1.0;
        u(1, 0) = 1.0;
        MaxEntReport rep = check_maxent_conditions({lp, 1.0 - lp}, u, u,
                                                   TwoQubitResource::psi_plus());
        CHECK(rep.pairing.pairing_ok);
    }
}

TEST_CASE("forward validation: passing conditions imply a maximal final round") {
    // Run the constructed scheme's final iteration from the reconstructed
    // intermediate state and verify every leaf is maximally entangled.
    for (double xi : {0.0, 2.0, 20.0}) {
        ConstructedD3 c = constructed_d3_scheme(xi);
        NodeParams node(3, xi);
        auto round1 = outcome_tree(c.initial, {c.scheme[0]}, node, node);
        REQUIRE(!round1.empty());
        for (const auto& mid : round1) {
            auto leaves = apply_iteration(mid.state, c.scheme[1], node, node);
            CHECK(leaves.size() == 4);
            for (const auto& leaf : leaves)
                CHECK(leaf.ebits == doctest::Approx(std::log2(3.0)).epsilon(1e-9));
        }
    }
}

TEST_CASE("resource coefficient equation") {
    // Even integer ratios at phi = pi/2: the cluster value c = 1/2.
    ResourceCSolution sol = solve_resource_c(20.0, 20.0, M_PI / 2, M_PI / 2);
    CHECK(sol.kind == ResourceCKind::one);
    CHECK(sol.c == doctest::Approx(0.5).epsilon(1e-12));

    // Odd integers: no solution in range.
    CHECK(solve_resource_c(21.0, 21.0, M_PI / 2, M_PI / 2).kind == ResourceCKind::none);

    // One even, one odd: every c solves.
    CHECK(solve_resource_c(20.0, 21.0, M_PI / 2, M_PI / 2).kind == ResourceCKind::all);

    // Solvability window: a solution exists iff xi is within 1/2 of an even
    // integer (symmetric nodes, phi = pi/2).
    for (double xi = 0.05; xi < 4.0; xi += 0.1) {
        const bool solvable =
            solve_resource_c(xi, xi, M_PI / 2, M_PI / 2).kind == ResourceCKind::one;
        const double dist_to_even = std::abs(xi / 2.0 - std::round(xi / 2.0)) * 2.0;
        CHECK(solvable == (dist_to_even <= 0.5 + 1e-12));
    }
}

TEST_CASE("schmidt spectra after complete transfer are pairwise products") {
    // chi = (1), Bell resource: leaf spectrum (1/2, 1/2).
    NodeParams node(4, 7.0);
    IterationSpec bell_spec(TwoQubitResource::psi_plus(), M_PI / 2, M_PI / 2);
    auto leaves = apply_iteration(plus_state(4), bell_spec, node, node);
    CHECK(schmidt_product_check({1.0}, TwoQubitResource::psi_plus(), leaves));

    // chi = (1/2, 1/2) with a maximally entangled resource: four quarters.
    auto round2 = apply_iteration(leaves[0].state,
                                  IterationSpec(TwoQubitResource::psi_plus(), M_PI, M_PI),
                                  node, node);
    CHECK(schmidt_product_check({0.5, 0.5}, TwoQubitResource::psi_plus(), round2));

    // Partial resource |det| = 0.3: spectrum (1/2 +- sqrt(1/4 - 0.09)).
    const double lp = 0.5 + std::sqrt(0.25 - 0.09);
    CMatrix part(2, 2);
    part(0, 0) = std::sqrt(lp);
    part(1, 1) = std::sqrt(1.0 - lp);
    TwoQubitResource partial(std::move(part));
    auto leaves_partial =
        apply_iteration(plus_state(4), IterationSpec(partial, M_PI / 2, M_PI / 2), node, node);
    CHECK(schmidt_product_check({1.0}, partial, leaves_partial));
    for (const auto& leaf : leaves_partial) {
        auto chi = schmidt_squared(leaf.state);
        REQUIRE(chi.size() >= 2);
        CHECK(chi[0] == doctest::Approx(lp).epsilon(1e-9));
        CHECK(chi[1] == doctest::Approx(1.0 - lp).epsilon(1e-9));
    }

    // A non-transfer angle must fail the product check.
    auto off = apply_iteration(plus_state(4),
                               IterationSpec(TwoQubitResource::psi_plus(), 0.9, 0.9), node,
                               node);
    CHECK(!schmidt_product_check({1.0}, TwoQubitResource::psi_plus(), off));
}

TEST_CASE("complete transfer implies uniform probabilities and exact gain") {
    Rng rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 * rng.integer(1, 4);  // even d
        const int k = rng.integer(1, d - 1);
        const double phi = 2.0 * M_PI * k / d;
        NodeParams node(d, rng.uniform(-30, 30));
        CMatrix m = test::random_matrix(rng, 2, 2);
        m *= 1.0 / m.frobenius_norm();
        TwoQubitResource res(std::move(m));
        const double e_ee = two_qubit_entanglement(res);
        TransferCheck tc = check_complete_transfer(
            plus_state(d), conditional_unitary(node, 0, phi), conditional_unitary(node, 1, phi),
            conditional_unitary(node, 0, phi), conditional_unitary(node, 1, phi));
        REQUIRE(tc.ok);
        auto leaves = apply_iteration(plus_state(d), IterationSpec(res, phi, phi), node, node);
        REQUIRE(leaves.size() == 4);
        for (const auto& leaf : leaves) {
            CHECK(leaf.probability == doctest::Approx(0.25).epsilon(1e-9));
            CHECK(leaf.ebits == doctest::Approx(e_ee).epsilon(0).scale(1).epsilon(1e-9));
        }
    }
}
