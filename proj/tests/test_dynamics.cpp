// test_dynamics.cpp — RK4 propagation, trace bookkeeping and the thermodynamic ledger

#include <doctest.h>

#include "qfe/dynamics.hpp"
#include "qfe/errors.hpp"
#include "qfe/model.hpp"
#include "qfe/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace qfe;

namespace {

CMatrix sigma_x() {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 1) = s(1, 0) = 1.0;
    return s;
}

} // namespace

TEST_CASE("zero generator leaves the state unchanged") {
    DensityState s = pure_state(3, 1);
    const CMatrix before = s.rho;
    RK4Workspace ws;
    for (int k = 0; k < 10; ++k) {
        step_rk4(s, 0.1, [](double, const CMatrix& r, CMatrix& out) { out = CMatrix::Zero(r.rows(), r.cols()); },
                 ws);
    }
    CHECK(s.rho == before);
    CHECK(s.t == doctest::Approx(1.0));
    CHECK_THROWS_AS(pure_state(3, 3), InvalidDimension);
}

TEST_CASE("Rabi oscillation matches the closed form") {
    const double omega = 1.0;
    const CMatrix H = 0.5 * omega * sigma_x();
    const auto gen = [&](double, const CMatrix& r, CMatrix& out) { out = cplx(0.0, -1.0) * (H * r - r * H); };
    DensityState s = pure_state(2, 0);
    RK4Workspace ws;
    double worst = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        step_rk4(s, 0.01, gen, ws);
        const double expect = std::pow(std::sin(0.5 * omega * s.t), 2);
        worst = std::max(worst, std::abs(s.rho(1, 1).real() - expect));
    }
    CHECK(worst < 1e-8);
    CHECK(s.trace_deviation() < 1e-13);
    CHECK(s.hermiticity_residual() < 1e-13);
}

TEST_CASE("amplitude damping decays exponentially") {
    const double gamma = 0.3;
    CMatrix lower = CMatrix::Zero(2, 2);
    lower(0, 1) = 1.0;
    const Operator L(lower);
    const auto gen = [&](double, const CMatrix& r, CMatrix& out) { out = gamma * dissipator(L, r); };
    DensityState s = pure_state(2, 1);
    RK4Workspace ws;
    for (int k = 1; k <= 2000; ++k) {
        step_rk4(s, 0.005, gen, ws);
        CHECK(std::abs(s.rho(1, 1).real() / std::exp(-gamma * s.t) - 1.0) < 0.01);
    }
}

TEST_CASE("trace drift beyond the threshold is renormalized and logged") {
    DensityState s = pure_state(2, 0);
    RK4Workspace ws;
    TraceLog log;
    const auto grow = [](double, const CMatrix& r, CMatrix& out) { out = 1e-6 * r; };
    step_rk4(s, 0.01, grow, ws, &log);  // drift 1e-8 > threshold
    CHECK(log.renormalizations == 1);
    CHECK(log.renormalized_at.size() == 1);
    CHECK(log.max_drift > kTraceRenormalize);
    CHECK(s.trace_deviation() < 1e-15);

    TraceLog quiet;
    const auto tiny = [](double, const CMatrix& r, CMatrix& out) { out = 1e-9 * r; };
    step_rk4(s, 0.01, tiny, ws, &quiet);  // drift 1e-11 stays
    CHECK(quiet.renormalizations == 0);
}

TEST_CASE("non-finite states raise Divergence") {
    DensityState s = pure_state(2, 0);
    RK4Workspace ws;
    const auto bad = [](double, const CMatrix& r, CMatrix& out) {
        out = CMatrix::Constant(r.rows(), r.cols(), std::numeric_limits<double>::quiet_NaN());
    };
    CHECK_THROWS_AS(step_rk4(s, 0.1, bad, ws), Divergence);
    DensityState ok = pure_state(2, 0);
    CHECK_THROWS_AS(step_rk4(ok, 0.0, bad, ws), std::invalid_argument);
}

TEST_CASE("convenience step and internal energy") {
    const CMatrix H = 0.5 * sigma_x();
    const DensityState s0 = pure_state(2, 0);
    const DensityState s1 = step_rk4(s0, 0.1, [&](double, const CMatrix& r, CMatrix& out) {
        out = cplx(0.0, -1.0) * (H * r - r * H);
    });
    CHECK(s1.t == doctest::Approx(0.1));
    // Energy is conserved by unitary evolution.
    CHECK(internal_energy(s1, Operator(H, true)) == doctest::Approx(internal_energy(s0, Operator(H, true))));
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 3.0;
    DensityState mixed;
    mixed.rho = CMatrix::Identity(2, 2) * 0.5;
    CHECK(internal_energy(mixed, Operator(d, true)) == doctest::Approx(2.0));
}

TEST_CASE("power is f_dot delta_omega <A^dag A>") {
    ModelParams p{};
    p.g_1 = p.g_2 = 0.0;
    const TruncationSpec spec{3, 2, 2};
    const ModeOperators ops = ModeOperators::build(spec);
    const DressedSet ds = build_dressed_operators(eig_hermitian(build_Hs(p, spec)), {ops.x_a, ops.x_1, ops.x_2});
    const DriveSchedule sched = DriveSchedule::uniform(1.0, 1.3, 20.0, 100.0, 100.0, 1, 0.0);
    const DressedLiouvillian lv(ds, bath_specs(BathParams{}), sched.delta_omega());
    // The dressed level with two photons (energy 2 omega_c at g = 0 is shared
    // with one wall-1 phonon, so pick the state by its photon number).
    const Eigen::Index k = basis_index({2, 0, 0}, spec);
    Eigen::Index dressed_k = 0;
    ds.basis.row(k).cwiseAbs().maxCoeff(&dressed_k);
    DensityState s = pure_state(ds.dim(), dressed_k);
    s.t = 10.0;
    CHECK(power(s, sched, lv) == doctest::Approx(f_dot(10.0, sched) * 0.3 * 2.0));
    s.t = 50.0;
    CHECK(power(s, sched, lv) == 0.0);
}

TEST_CASE("thermodynamic accumulator integrates work and heat by trapezoids") {
    ThermoAccumulator acc;
    acc.reset(0.0, 5.0, 1.0, 0.0);
    acc.advance(1.0, 6.5, 1.0, 1.0);
    acc.advance(3.0, 9.0, 2.0, 3.0);
    CHECK(acc.delta_U() == doctest::Approx(4.0));
    CHECK(acc.W() == doctest::Approx(1.0 + 3.0));
    CHECK(acc.Q_direct() == doctest::Approx(0.5 + 4.0));
    CHECK(acc.Q() == doctest::Approx(0.0));
    CHECK(acc.first_law_residual() == doctest::Approx(4.5));
    acc.rereference();
    CHECK(acc.delta_U() == 0.0);
    CHECK(acc.W() == 0.0);
    CHECK(acc.t() == 3.0);
    CHECK(acc.U_reference() == 9.0);
}

TEST_CASE("ledger CSV carries the config hash and 17 significant digits") {
    Ledger ledger(1);
    ledger[0].t = 0.1;
    ledger[0].U = 1.0 / 3.0;
    std::ostringstream os;
    write_ledger_csv(os, ledger, 0xabcdefULL);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "# config_hash=0000000000abcdef");
    std::getline(is, line);
    CHECK(line == "t,U,W,Q,P,N_c,N_w1,N_w2,f");
    std::getline(is, line);
    CHECK(line.rfind("0.10000000000000001,0.33333333333333331,0,", 0) == 0);
}
