// drive.hpp — smooth-step modulation of the dressed cavity frequency

#pragma once

#include "qfe/operator_algebra.hpp"

#include <string>
#include <vector>

namespace qfe {

/// Times at which one cycle switches stroke.
struct StrokeTimes {
    double compression;  // ramp 0 -> 1 starts (cycle start t_i)
    double hot;          // hold at f = 1 starts
    double expansion;    // ramp 1 -> 0 starts
    double cold;         // f = 0 again
};

/// Each cycle starts at t_i with a sin^2 ramp of length tau, holds f = 1 for
/// dt_hot, ramps back down over tau and stays at 0 until the next start.
struct DriveSchedule {
    double omega_eff_1{1.01};
    double omega_eff_2{1.31};
    double tau{20.0};
    double dt_hot{1500.0};
    double dt_cold{1500.0};  // nominal cold isochoric length (minimum)
    std::vector<double> cycle_starts;
    int n_cycles{0};

    double delta_omega() const noexcept { return omega_eff_2 - omega_eff_1; }
    /// Length of the driven part of a cycle, 2 tau + dt_hot.
    double driven_span() const noexcept { return 2.0 * tau + dt_hot; }
    StrokeTimes strokes(std::size_t cycle) const;

    std::vector<std::string> violations(const std::string& prefix = "drive") const;
    void validate() const;

    /// Starts at t0, t0 + period, ... with period = driven_span() + dt_cold.
    static DriveSchedule uniform(double omega_eff_1, double omega_eff_2, double tau, double dt_hot,
                                 double dt_cold, int n_cycles, double t0);
};

/// Drive profile in [0, 1]; continuously differentiable.
double f(double t, const DriveSchedule& sched);
/// Analytic time derivative of f; |f_dot| <= pi / (2 tau).
double f_dot(double t, const DriveSchedule& sched);

/// f(t) * delta_omega * A^dag A, with A the dressed cavity lowering operator.
Operator H_drive(double t, const DriveSchedule& sched, const Operator& A);

} // namespace qfe
