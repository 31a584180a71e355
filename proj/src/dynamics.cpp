// dynamics.cpp — state helpers, energy/power observables and ledger output

#include "qfe/dynamics.hpp"

#include <cstdio>
#include <ostream>

namespace qfe {

DensityState pure_state(Eigen::Index dim, Eigen::Index k) {
    if (k < 0 || k >= dim) throw InvalidDimension("pure_state: index outside the space");
    DensityState s;
    s.rho = CMatrix::Zero(dim, dim);
    s.rho(k, k) = 1.0;
    return s;
}

DensityState step_rk4(const DensityState& s, double h,
                      const std::function<void(double, const CMatrix&, CMatrix&)>& gen) {
    DensityState next = s;
    RK4Workspace ws;
    step_rk4(next, h, gen, ws);
    return next;
}

double internal_energy(const DensityState& s, const Operator& H_total) {
    if (H_total.dim() != s.rho.rows()) throw InvalidDimension("internal_energy: dimension mismatch");
    return H_total.matrix().cwiseProduct(s.rho.transpose()).sum().real();
}

double power(const DensityState& s, const DriveSchedule& sched, const DressedLiouvillian& lv) {
    const double fd = f_dot(s.t, sched);
    if (fd == 0.0) return 0.0;
    return fd * lv.delta_omega() * lv.drive_expectation(s.rho);
}

void ThermoAccumulator::reset(double t, double U, double P, double J) {
    t_ = t;
    U_ = U;
    U_ref_ = U;
    P_ = P;
    J_ = J;
    W_ = 0.0;
    Q_direct_ = 0.0;
}

void ThermoAccumulator::advance(double t, double U, double P, double J) {
    const double dt = t - t_;
    W_ += 0.5 * dt * (P_ + P);
    Q_direct_ += 0.5 * dt * (J_ + J);
    t_ = t;
    U_ = U;
    P_ = P;
    J_ = J;
}

void ThermoAccumulator::rereference() {
    U_ref_ = U_;
    W_ = 0.0;
    Q_direct_ = 0.0;
}

void write_ledger_csv(std::ostream& os, const Ledger& ledger, std::uint64_t config_hash) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "# config_hash=%016llx\n", static_cast<unsigned long long>(config_hash));
    os << buf << "t,U,W,Q,P,N_c,N_w1,N_w2,f\n";
    for (const auto& s : ledger) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.U, s.W,
                      s.Q, s.P, s.N_c, s.N_w1, s.N_w2, s.f);
        os << buf;
    }
}

} // namespace qfe
