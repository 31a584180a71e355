// drive.cpp — drive profile and its derivative

#include "qfe/drive.hpp"

#include "qfe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qfe {

namespace {

// Time since the most recent cycle start at or before t, or negative when
// no cycle has started yet.
double since_start(double t, const DriveSchedule& sched) {
    const auto& starts = sched.cycle_starts;
    auto it = std::upper_bound(starts.begin(), starts.end(), t);
    if (it == starts.begin()) return -1.0;
    return t - *std::prev(it);
}

} // namespace

StrokeTimes DriveSchedule::strokes(std::size_t cycle) const {
    if (cycle >= cycle_starts.size()) throw std::out_of_range("DriveSchedule::strokes: no such cycle");
    const double t0 = cycle_starts[cycle];
    return {t0, t0 + tau, t0 + tau + dt_hot, t0 + driven_span()};
}

std::vector<std::string> DriveSchedule::violations(const std::string& prefix) const {
    std::vector<std::string> out;
    const auto field = [&](const char* name) { return prefix + "." + name; };
    if (!std::isfinite(omega_eff_1) || !(omega_eff_1 > 0.0)) out.push_back(field("omega_eff_1") + ": must be > 0");
    if (!std::isfinite(omega_eff_2) || !(delta_omega() > 0.0)) {
        out.push_back(field("omega_eff_2") + ": must exceed omega_eff_1 (delta_omega > 0)");
    }
    if (!std::isfinite(tau) || !(tau > 0.0)) out.push_back(field("tau") + ": must be > 0");
    if (!std::isfinite(dt_hot) || !(dt_hot > tau)) out.push_back(field("dt_hot") + ": must exceed tau");
    if (!std::isfinite(dt_cold) || !(dt_cold > 0.0)) out.push_back(field("dt_cold") + ": must be > 0");
    if (n_cycles < 0) out.push_back(field("n_cycles") + ": must be >= 0");
    for (std::size_t k = 0; k < cycle_starts.size(); ++k) {
        if (!(cycle_starts[k] >= 0.0)) {
            out.push_back(field("cycle_starts") + ": times must be >= 0");
            break;
        }
        if (k > 0 && !(cycle_starts[k] - cycle_starts[k - 1] > driven_span())) {
            out.push_back(field("cycle_starts") + ": consecutive starts must be more than 2*tau + dt_hot apart");
            break;
        }
    }
    return out;
}

void DriveSchedule::validate() const {
    if (auto v = violations(); !v.empty()) throw InvalidParameter(std::move(v));
}

DriveSchedule DriveSchedule::uniform(double omega_eff_1, double omega_eff_2, double tau, double dt_hot,
                                     double dt_cold, int n_cycles, double t0) {
    DriveSchedule s{omega_eff_1, omega_eff_2, tau, dt_hot, dt_cold, {}, n_cycles};
    for (int k = 0; k < n_cycles; ++k) s.cycle_starts.push_back(t0 + k * (s.driven_span() + dt_cold));
    s.validate();
    return s;
}

double f(double t, const DriveSchedule& sched) {
    const double s = since_start(t, sched);
    if (s < 0.0) return 0.0;
    const double w = std::numbers::pi / (2.0 * sched.tau);
    if (s < sched.tau) {
        const double x = std::sin(w * s);
        return x * x;
    }
    if (s < sched.tau + sched.dt_hot) return 1.0;
    if (s < sched.driven_span()) {
        const double x = std::cos(w * (s - sched.tau - sched.dt_hot));
        return x * x;
    }
    return 0.0;
}

double f_dot(double t, const DriveSchedule& sched) {
    const double s = since_start(t, sched);
    if (s < 0.0) return 0.0;
    const double w = std::numbers::pi / (2.0 * sched.tau);
    if (s < sched.tau) return w * std::sin(2.0 * w * s);
    if (s < sched.tau + sched.dt_hot) return 0.0;
    if (s < sched.driven_span()) return -w * std::sin(2.0 * w * (s - sched.tau - sched.dt_hot));
    return 0.0;
}

Operator H_drive(double t, const DriveSchedule& sched, const Operator& A) {
    CMatrix h = (f(t, sched) * sched.delta_omega()) * (A.matrix().adjoint() * A.matrix());
    // A^dag A is Hermitian up to rounding; symmetrize so the flag holds exactly.
    h = 0.5 * (h + h.adjoint()).eval();
    return Operator(std::move(h), true);
}

} // namespace qfe
