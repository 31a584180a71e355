// dynamics.hpp — RK4 propagation of the density matrix and the thermodynamic ledger

#pragma once

#include "qfe/drive.hpp"
#include "qfe/dressed_lindblad.hpp"
#include "qfe/errors.hpp"
#include "qfe/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

struct DensityState {
    CMatrix rho;  // dressed basis during runs
    double t{0.0};

    double trace_deviation() const { return std::abs(rho.trace() - cplx(1.0, 0.0)); }
    double hermiticity_residual() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
};

/// Projector onto basis state k.
DensityState pure_state(Eigen::Index dim, Eigen::Index k);

/// Stage buffers for RK4 on any Eigen vector or matrix type.
template <class State>
struct RK4Buffers {
    State k1, k2, k3, k4, stage;
};

using RK4Workspace = RK4Buffers<CMatrix>;

/// Classical RK4 update y(t) -> y(t + h) for dy/dt = gen(t, y, out). With
/// `k1_ready` the caller has already stored gen(t, y) in ws.k1.
template <class State, class Generator>
void rk4_update(State& y, double t, double h, Generator&& gen, RK4Buffers<State>& ws, bool k1_ready = false) {
    if (!(h > 0.0)) throw std::invalid_argument("step_rk4: step must be > 0");
    if (ws.k2.rows() != y.rows() || ws.k2.cols() != y.cols()) {
        if (!k1_ready) ws.k1.resize(y.rows(), y.cols());
        ws.k2.resize(y.rows(), y.cols());
        ws.k3.resize(y.rows(), y.cols());
        ws.k4.resize(y.rows(), y.cols());
        ws.stage.resize(y.rows(), y.cols());
    }
    if (!k1_ready) gen(t, y, ws.k1);
    ws.stage = y + (0.5 * h) * ws.k1;
    gen(t + 0.5 * h, ws.stage, ws.k2);
    ws.stage = y + (0.5 * h) * ws.k2;
    gen(t + 0.5 * h, ws.stage, ws.k3);
    ws.stage = y + h * ws.k3;
    gen(t + h, ws.stage, ws.k4);
    y += (h / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

/// Trace bookkeeping across steps; renormalization happens only when the
/// trace has drifted by more than kTraceRenormalize.
struct TraceLog {
    double max_drift{0.0};
    int renormalizations{0};
    std::vector<double> renormalized_at;
};

inline constexpr double kTraceRenormalize = 1e-9;

/// One classical RK4 step of d rho/dt = gen(t, rho, out). With `k1_ready`
/// the caller has already stored gen(s.t, s.rho) in ws.k1; otherwise it is
/// computed here. Throws Divergence if the new state is not finite.
template <class Generator>
void step_rk4(DensityState& s, double h, Generator&& gen, RK4Workspace& ws, TraceLog* log = nullptr,
              bool k1_ready = false) {
    rk4_update(s.rho, s.t, h, gen, ws, k1_ready);
    s.t += h;
    if (!s.rho.allFinite()) {
        throw Divergence("non-finite density matrix at t = " + std::to_string(s.t), s.t);
    }
    const double drift = s.trace_deviation();
    if (log) log->max_drift = std::max(log->max_drift, drift);
    if (drift > kTraceRenormalize) {
        s.rho /= s.rho.trace().real();
        if (log) {
            ++log->renormalizations;
            log->renormalized_at.push_back(s.t);
        }
    }
}

/// Convenience form returning the propagated state.
DensityState step_rk4(const DensityState& s, double h,
                      const std::function<void(double, const CMatrix&, CMatrix&)>& gen);

/// Tr[H rho]
double internal_energy(const DensityState& s, const Operator& H_total);

/// f_dot(t) * delta_omega * Tr[rho A^dag A].
double power(const DensityState& s, const DriveSchedule& sched, const DressedLiouvillian& lv);

struct LedgerSample {
    double t{0.0};
    double U{0.0};  // relative to the reference point
    double W{0.0};
    double Q{0.0};  // U - W
    double P{0.0};
    double N_c{0.0};
    double N_w1{0.0};
    double N_w2{0.0};
    double f{0.0};
    double heat_rate{0.0};           // Tr[H_tot d rho/dt]
    double first_law_residual{0.0};  // |U - W - integral of heat_rate|
};

using Ledger = std::vector<LedgerSample>;

/// Trapezoidal accumulation of work (from the power) and of heat (from the
/// heat rate, independently of the first law).
class ThermoAccumulator {
public:
    /// Starts integration at t with the given absolute energy and rates.
    void reset(double t, double U, double P, double J);
    /// Moves to time t with the new absolute energy and rates.
    void advance(double t, double U, double P, double J);
    /// Shifts the energy reference and zeroes W and Q without touching the clock.
    void rereference();

    double t() const noexcept { return t_; }
    double delta_U() const noexcept { return U_ - U_ref_; }
    double W() const noexcept { return W_; }
    double Q() const noexcept { return delta_U() - W_; }
    double Q_direct() const noexcept { return Q_direct_; }
    double P() const noexcept { return P_; }
    double J() const noexcept { return J_; }
    double U_reference() const noexcept { return U_ref_; }
    double first_law_residual() const noexcept { return std::abs(delta_U() - W_ - Q_direct_); }

private:
    double t_{0.0}, U_{0.0}, U_ref_{0.0}, P_{0.0}, J_{0.0}, W_{0.0}, Q_direct_{0.0};
};

/// Writes t,U,W,Q,P,N_c,N_w1,N_w2,f with 17 significant digits, preceded by
/// a `# config_hash=<hex>` comment line.
void write_ledger_csv(std::ostream& os, const Ledger& ledger, std::uint64_t config_hash);

} // namespace qfe
