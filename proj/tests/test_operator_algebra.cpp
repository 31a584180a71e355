// test_operator_algebra.cpp — Fock operators, tensor embedding and the Hermitian flag

#include <doctest.h>

#include "qfe/errors.hpp"
#include "qfe/operator_algebra.hpp"

#include <cmath>

using namespace qfe;

TEST_CASE("lowering operator has sqrt(n) on the superdiagonal") {
    const Operator a = destroy(4);
    CHECK(a.dim() == 4);
    for (int n = 1; n < 4; ++n) CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt(double(n))));
    CHECK(a(1, 0) == cplx(0.0, 0.0));
    CHECK_THROWS_AS(destroy(1), InvalidDimension);
}

TEST_CASE("commutator [a, a^dag] is the identity except at the truncation edge") {
    const Operator a = destroy(4);
    const CMatrix c = commutator(a, a.adjoint()).matrix();
    for (int k = 0; k < 3; ++k) CHECK(std::abs(c(k, k) - 1.0) < 1e-14);
    CHECK(std::abs(c(3, 3) + 3.0) < 1e-14);
    CMatrix off = c;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("flat index follows cavity x wall1 x wall2 ordering") {
    const TruncationSpec spec{3, 2, 4};
    CHECK(spec.total() == 24);
    for (Eigen::Index k = 0; k < spec.total(); ++k) {
        const FockState s = fock_state(k, spec);
        CHECK(basis_index(s, spec) == k);
        CHECK(k == (s.l * spec.d_1 + s.m) * spec.d_2 + s.n);
    }
    CHECK_THROWS_AS(basis_index({3, 0, 0}, spec), InvalidDimension);
    CHECK_THROWS_AS(fock_state(24, spec), InvalidDimension);
}

TEST_CASE("truncation validation") {
    CHECK_NOTHROW(TruncationSpec{}.validate());
    CHECK_THROWS_AS((TruncationSpec{1, 5, 5}.validate()), InvalidDimension);
    CHECK_NOTHROW((TruncationSpec{2, 2, 2}.validate()));
}

TEST_CASE("embedded lowering operators act on their own slot only") {
    const TruncationSpec spec{3, 3, 2};
    const Operator a = embed(destroy(3), Slot::cavity, spec);
    const Operator b1 = embed(destroy(3), Slot::wall1, spec);
    const Operator b2 = embed(destroy(2), Slot::wall2, spec);
    const Eigen::Index src = basis_index({2, 1, 1}, spec);
    CHECK(a(basis_index({1, 1, 1}, spec), src).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(b1(basis_index({2, 0, 1}, spec), src).real() == doctest::Approx(1.0));
    CHECK(b2(basis_index({2, 1, 0}, spec), src).real() == doctest::Approx(1.0));
    // Different slots commute.
    CHECK(commutator(a, b1).max_abs() < 1e-14);
    CHECK(commutator(a, b2.adjoint()).max_abs() < 1e-14);
    CHECK_THROWS_AS(embed(destroy(4), Slot::cavity, spec), InvalidDimension);
}

TEST_CASE("Hermitian flag is checked and propagated") {
    const Operator a = destroy(3);
    CHECK_FALSE(a.hermitian());
    CHECK_THROWS_AS(Operator(a.matrix(), true), ContractViolation);
    const Operator x = position_sum(a);
    CHECK(x.hermitian());
    CHECK(x.hermiticity_residual() == 0.0);
    CHECK((x * x).hermitian() == false);  // products are not assumed Hermitian
    CHECK((x + x).hermitian());
    CHECK((2.0 * x).hermitian());
    CHECK_THROWS_AS(Operator(CMatrix::Zero(2, 3)), InvalidDimension);
    CHECK_THROWS_AS(a + destroy(4), InvalidDimension);
}
