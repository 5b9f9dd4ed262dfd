#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qet/kernel.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace qet;
using test::Rng;

TEST_CASE("svd of identity and zero matrices") {
    SvdResult s = svd(CMatrix::identity(3));
    for (double sv : s.sigma) CHECK(sv == doctest::Approx(1.0).epsilon(1e-12));

    SvdResult z = svd(CMatrix::zero(2, 2));
    CHECK(z.sigma[0] == doctest::Approx(0.0));
    CHECK(z.sigma[1] == doctest::Approx(0.0));
    // Bases must still be orthonormal.
    CHECK(unitarity_defect(z.u) < EPS_ORTHO);
    CHECK(unitarity_defect(z.vh) < EPS_ORTHO);
}

TEST_CASE("svd reconstruction and orthonormality on random complex matrices") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = rng.integer(1, 16), n = rng.integer(1, 16);
        CMatrix a = test::random_matrix(rng, m, n);
        SvdResult s = svd(a);
        const double rel = (svd_reconstruct(s) - a).frobenius_norm() / a.frobenius_norm();
        CHECK(rel < 1e-10);
        CHECK(unitarity_defect(s.u.adjoint() * s.u) < 1e-10);
        CHECK(unitarity_defect(s.vh * s.vh.adjoint()) < 1e-10);
        for (size_t k = 1; k < s.sigma.size(); ++k) CHECK(s.sigma[k - 1] >= s.sigma[k]);
    }
}

TEST_CASE("svd rejects non-finite input") {
    CMatrix bad(2, 2);
    bad(0, 0) = cxd(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(svd(bad), std::invalid_argument);
}

TEST_CASE("singular values are invariant under unitary sandwiching") {
    Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = rng.integer(2, 10);
        CMatrix a = test::random_matrix(rng, n, n);
        CMatrix w = test::random_unitary(rng, n);
        CMatrix v = test::random_unitary(rng, n);
        REQUIRE(unitarity_defect(w) < 1e-12);
        SvdResult s1 = svd(a);
        SvdResult s2 = svd(w * a * v);
        for (size_t k = 0; k < s1.sigma.size(); ++k)
            CHECK(s1.sigma[k] == doctest::Approx(s2.sigma[k]).epsilon(0).scale(1).epsilon(1e-10));
    }
}

TEST_CASE("kron identities and index placement") {
    CMatrix i2 = CMatrix::identity(2);
    CHECK(test::max_abs_diff(kron(i2, i2), CMatrix::identity(4)) == 0.0);

    CMatrix d12 = CMatrix::diagonal({cxd(1, 0), cxd(2, 0)});
    CMatrix d3 = CMatrix::diagonal({cxd(3, 0)});
    CMatrix expect = CMatrix::diagonal({cxd(3, 0), cxd(6, 0)});
    CHECK(test::max_abs_diff(kron(d12, d3), expect) == 0.0);

    CMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    CHECK(kron(x, i2)(0, 2) == cxd(1.0, 0.0));
}

TEST_CASE("kron is associative entrywise") {
    Rng rng(7);
    // Small-integer entries are exactly representable, so equality is exact.
    auto int_matrix = [&](int r, int c) {
        CMatrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = cxd(rng.integer(-3, 3), rng.integer(-3, 3));
        return m;
    };
    CMatrix a = int_matrix(2, 3), b = int_matrix(3, 2), c = int_matrix(2, 2);
    CHECK(test::max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) == 0.0);
}

TEST_CASE("unitarity defect values") {
    CHECK(unitarity_defect(CMatrix::identity(3)) < 1e-15);
    CMatrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 0.5;
    CHECK(unitarity_defect(d) == doctest::Approx(0.75).epsilon(1e-12));
    for (double theta : {0.3, 1.7, -2.2}) {
        CMatrix z = CMatrix::diagonal({std::exp(cxd(0, -theta)), std::exp(cxd(0, theta))});
        CHECK(unitarity_defect(z) < 1e-14);
    }
    CHECK_THROWS_AS(unitarity_defect(CMatrix(2, 3)), std::invalid_argument);
}
