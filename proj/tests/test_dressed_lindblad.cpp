// test_dressed_lindblad.cpp — thermal occupations, dressed operators and the dressed generator

#include <doctest.h>

#include "qfe/dressed_lindblad.hpp"
#include "qfe/dynamics.hpp"
#include "qfe/errors.hpp"
#include "qfe/model.hpp"
#include "qfe/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

using namespace qfe;

namespace {

struct Built {
    DressedSet ds;
    ModeOperators ops;
};

Built dressed(const ModelParams& p, const TruncationSpec& spec) {
    Built b{{}, ModeOperators::build(spec)};
    b.ds = build_dressed_operators(eig_hermitian(build_Hs(p, spec)), {b.ops.x_a, b.ops.x_1, b.ops.x_2});
    return b;
}

// Random density-like Hermitian matrix without coherences between sectors.
CMatrix random_hermitian(const std::vector<int>& sector, Eigen::Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    CMatrix m(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = 0; k < n; ++k) m(k, l) = cplx(g(rng), g(rng));
    }
    CMatrix h = m * m.adjoint();
    if (sector.size() == static_cast<std::size_t>(n)) {
        for (Eigen::Index l = 0; l < n; ++l) {
            for (Eigen::Index k = 0; k < n; ++k) {
                if (sector[k] != sector[l]) h(k, l) = 0.0;
            }
        }
    }
    return h / h.trace().real();
}

std::string sig2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", x);
    return buf;
}

std::array<BathSpec, 3> baths(double kappa, double T0, double g1, double Tc, double g2, double Th) {
    return {BathSpec{kappa, T0, Channel::cavity}, BathSpec{g1, Tc, Channel::wall1},
            BathSpec{g2, Th, Channel::wall2}};
}

} // namespace

TEST_CASE("Bose-Einstein occupation") {
    CHECK(sig2(n_thermal(1.01, 0.15)) == "1.2e-03");
    // exact value at 1.31; the 3.96e-2 quoted for the hot resonance needs omega ~ 1.3068
    CHECK(n_thermal(1.31, 0.40) == doctest::Approx(1.0 / (std::exp(1.31 / 0.40) - 1.0)).epsilon(1e-14));
    CHECK(sig2(n_thermal(1.3068, 0.40)) == "4.0e-02");
    CHECK(n_thermal(1.0, 1e-4) == 0.0);
    CHECK(n_thermal(1e-8, 1.0) == doctest::Approx(1e8).epsilon(1e-6));
    CHECK_THROWS_AS(n_thermal(0.0, 0.1), InvalidGap);
    CHECK_THROWS_AS(n_thermal(-1.0, 0.1), InvalidGap);
    CHECK_THROWS_AS(n_thermal(1.0, 0.0), InvalidParameter);
}

TEST_CASE("uncoupled model: dressed lowering operators are the bare ones") {
    ModelParams p{};
    p.g_1 = p.g_2 = 0.0;
    const TruncationSpec spec{4, 3, 3};
    const Built b = dressed(p, spec);
    CHECK((b.ds.to_lab(b.ds.A.matrix()) - b.ops.a.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((b.ds.to_lab(b.ds.B1.matrix()) - b.ops.b1.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((b.ds.to_lab(b.ds.B2.matrix()) - b.ops.b2.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dressed lowering operators lower the energy") {
    const Built b = dressed(ModelParams{}, TruncationSpec{6, 4, 4});
    for (const Operator* op : {&b.ds.A, &b.ds.B1, &b.ds.B2}) {
        const CMatrix& m = op->matrix();
        CHECK(m.col(0).cwiseAbs().maxCoeff() == 0.0);  // annihilates the dressed ground state
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = j; i < m.rows(); ++i) CHECK(m(i, j) == cplx(0.0, 0.0));
        }
    }
}

TEST_CASE("dressed one-photon state carries about one photon") {
    ModelParams p{};
    p.omega_c = 1.009;
    const TruncationSpec spec{8, 5, 5};
    const Built b = dressed(p, spec);
    // Eigenstate with the largest overlap with |1,0,0>.
    const Eigen::Index bare = basis_index({1, 0, 0}, spec);
    Eigen::Index k = 0;
    b.ds.basis.row(bare).cwiseAbs().maxCoeff(&k);
    const CMatrix N = b.ds.A.matrix().adjoint() * b.ds.A.matrix();
    CHECK(std::abs(N(k, k).real() - 1.0) < 0.05);
}

TEST_CASE("dissipator: two-level oracle, trace and vanishing jump") {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 1) = 1.0;  // |0><1|
    CMatrix rho(2, 2);
    rho << 0.3, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.7;
    const CMatrix d = dissipator(Operator(s), rho);
    CHECK(std::abs(d(0, 0) - 0.7) < 1e-15);
    CHECK(std::abs(d(1, 1) + 0.7) < 1e-15);
    CHECK(std::abs(d(0, 1) - cplx(-0.05, -0.1)) < 1e-15);
    CHECK(std::abs(d.trace()) < 1e-15);
    CHECK(dissipator(Operator(CMatrix::Zero(2, 2)), rho).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(dissipator(Operator(CMatrix::Zero(3, 3)), rho), InvalidDimension);
}

TEST_CASE("without dissipation the generator is the bare commutator") {
    const Built b = dressed(ModelParams{}, TruncationSpec{4, 3, 3});
    const DressedLiouvillian lv(b.ds, baths(0, 1, 0, 1, 0, 1), 0.3);
    const CMatrix rho = random_hermitian({}, b.ds.dim(), 1);
    const CMatrix H = lv.hamiltonian(0.6).matrix();
    const CMatrix expect = cplx(0.0, -1.0) * (H * rho - rho * H);
    CHECK((lv.apply(rho, 0.6) - expect).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(lv.rates().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dressed ground state is a zero-temperature fixed point") {
    const Built b = dressed(ModelParams{}, TruncationSpec{6, 4, 4});
    const DressedLiouvillian lv(b.ds, baths(1e-6, 1e-3, 0.01, 1e-3, 0.01, 1e-3), 0.3);
    const CMatrix ground = pure_state(b.ds.dim(), 0).rho;
    CHECK(lv.apply(ground, 0.0).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(lv.apply(ground, 1.0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("generator preserves trace and Hermiticity") {
    const Built b = dressed(ModelParams{}, TruncationSpec{6, 4, 4});
    const DressedLiouvillian lv(b.ds, bath_specs(BathParams{}), 0.3);
    const CMatrix rho = random_hermitian({}, b.ds.dim(), 2);
    for (double f : {0.0, 0.4, 1.0}) {
        const CMatrix d = lv.apply(rho, f);
        CHECK(std::abs(d.trace()) < 1e-11);
        CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("reference, folded and packed generators agree") {
    const Built b = dressed(ModelParams{}, TruncationSpec{6, 4, 4});
    const auto spec = baths(0.002, 0.2, 0.01, 0.15, 0.02, 0.4);
    const DressedLiouvillian lv(b.ds, spec, 0.3);
    CHECK(lv.sector_count() == 2);
    const CMatrix rho = random_hermitian(b.ds.sector, b.ds.dim(), 3);
    REQUIRE(lv.packable(rho));
    const Eigen::VectorXd y = lv.pack(rho);
    CHECK(y.size() == lv.packed_size());
    CHECK((lv.unpack(y) - rho).cwiseAbs().maxCoeff() == 0.0);
    for (double f : {0.0, 0.7}) {
        const CMatrix ref = apply_liouvillian(lv.hamiltonian(f), spec, b.ds, rho);
        const CMatrix dense = lv.apply(rho, f);
        Eigen::VectorXd packed;
        lv.apply_packed(y, f, packed);
        CHECK((dense - ref).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((lv.unpack(packed) - ref).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(lv.energy_packed(y, f) == doctest::Approx(lv.energy(rho, f)).epsilon(1e-13));
        CHECK(lv.energy(rho, f) ==
              doctest::Approx(lv.hamiltonian(f).matrix().cwiseProduct(rho.transpose()).sum().real()));
    }
    for (Channel ch : {Channel::cavity, Channel::wall1, Channel::wall2}) {
        CHECK(lv.number_packed(y, ch) == doctest::Approx(lv.number(rho, ch)).epsilon(1e-13));
    }
    CHECK(lv.trace_packed(y) == doctest::Approx(1.0));
    CHECK(lv.hermiticity_residual_packed(y) < 1e-15);

    CMatrix mixed = rho;
    const auto& sec = lv.sectors();
    mixed(sec[0][0], sec[1][0]) = 0.1;
    mixed(sec[1][0], sec[0][0]) = 0.1;
    CHECK_FALSE(lv.packable(mixed));
    CHECK_THROWS_AS(lv.pack(mixed), ContractViolation);
}

TEST_CASE("single-bath steady state of a three-level system obeys detailed balance") {
    DressedSet ds;
    ds.energies = Eigen::Vector3d(0.0, 1.0, 2.3);
    ds.basis = CMatrix::Identity(3, 3);
    ds.c = CMatrix::Zero(3, 3);
    ds.c(0, 1) = 0.7;
    ds.c(1, 2) = 0.5;
    ds.c(0, 2) = 0.2;
    ds.c += ds.c.adjoint().eval();
    ds.u = ds.v = CMatrix::Zero(3, 3);
    ds.A = Operator(ds.c.triangularView<Eigen::StrictlyUpper>().toDenseMatrix());
    ds.B1 = ds.B2 = Operator(CMatrix::Zero(3, 3));
    const double T = 0.6;
    const DressedLiouvillian lv(ds, baths(1.0, T, 0.0, 1.0, 0.0, 1.0), 0.0);

    DensityState s = pure_state(3, 0);
    RK4Workspace ws;
    const auto gen = [&](double, const CMatrix& r, CMatrix& out) { lv.apply(r, 0.0, out); };
    for (int k = 0; k < 20000; ++k) step_rk4(s, 0.05, gen, ws);
    const double p0 = s.rho(0, 0).real(), p1 = s.rho(1, 1).real(), p2 = s.rho(2, 2).real();
    CHECK(std::abs(p1 / p0 - std::exp(-1.0 / T)) < 1e-6);
    CHECK(std::abs(p2 / p1 - std::exp(-1.3 / T)) < 1e-6);
    CHECK(std::abs(p2 / p0 - std::exp(-2.3 / T)) < 1e-6);
}

TEST_CASE("uncoupled cavity relaxes to the Bose-Einstein occupation") {
    ModelParams p{};
    p.g_1 = p.g_2 = 0.0;
    const TruncationSpec spec{8, 2, 2};
    const Built b = dressed(p, spec);
    const double T0 = 0.3;
    const DressedLiouvillian lv(b.ds, baths(0.01, T0, 0.01, 0.15, 0.01, 0.4), 0.0);
    // Stationary populations: null vector of the Pauli generator R - diag(Gamma).
    Eigen::MatrixXd G = lv.rates();
    G.diagonal() -= lv.escape_rates();
    const Eigen::Index n = G.rows();
    Eigen::MatrixXd M(n + 1, n);
    M << G, Eigen::RowVectorXd::Ones(n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    const Eigen::VectorXd pop = M.colPivHouseholderQr().solve(rhs);
    CMatrix rho = CMatrix::Zero(n, n);
    rho.diagonal().real() = pop;
    CHECK(std::abs(lv.number(rho, Channel::cavity) - n_thermal(p.omega_c, T0)) < 1e-6);
}
