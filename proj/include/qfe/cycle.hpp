// cycle.hpp — Otto-cycle orchestration, plateau detection and efficiency

#pragma once

#include "qfe/drive.hpp"
#include "qfe/dressed_lindblad.hpp"
#include "qfe/dynamics.hpp"
#include "qfe/model.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qfe {

/// True when max - min over the last `window` samples is below `tol`.
/// Throws std::invalid_argument for window < 10; false while the series is
/// shorter than the window.
bool detect_plateau(std::span<const double> series, std::size_t window, double tol);

struct Efficiency {
    double eta{0.0};
    double eta_carnot{0.0};
};

double carnot_efficiency(double T_c, double T_h);

/// eta = W_out / Q_in with W_out = -W_net. Throws NoHeatInput for Q_in <= 0.
Efficiency efficiency(double W_net, double Q_in, double T_c, double T_h);

enum class Stroke { compression = 0, hot = 1, expansion = 2, cold = 3 };

const char* to_string(Stroke s) noexcept;

struct StrokeFlow {
    Stroke stroke{Stroke::compression};
    double t_begin{0.0};
    double t_end{0.0};
    double dU{0.0};
    double dQ{0.0};
    double dW{0.0};
};

using CycleFlows = std::array<StrokeFlow, 4>;

/// Splits the ledger at the stroke boundaries of every cycle in `sched`.
/// The cold stroke of a cycle ends where the next cycle starts; the last one
/// ends at the final ledger sample.
std::vector<CycleFlows> stroke_attribution(const Ledger& ledger, const DriveSchedule& sched);

struct CycleReport {
    int index{0};
    double t_begin{0.0};
    double t_end{0.0};
    CycleFlows strokes{};
    double W_net{0.0};  // signed, negative when work is extracted
    double W_out{0.0};
    double Q_in{0.0};
    double Q_out{0.0};  // heat rejected, positive
    double eta{0.0};    // NaN when Q_in <= 0
    double eta_carnot{0.0};
    bool engine_works{false};  // W_out > 0

    double N_c_end_hot{0.0};
    double N_c_end_cold{0.0};
    double suppression_hot{0.0};   // 1 - N_c / n_thermal(omega_eff_2, T_h)
    double suppression_cold{0.0};  // 1 - N_c / n_thermal(omega_eff_1, T_c)
    double N_c_begin_hot{0.0};
    double N_w2_begin_hot{0.0};
    double N_w2_min_hot{0.0};

    double cold_duration{0.0};
    bool cold_plateau{false};
    double heat_rate_peak_hot{0.0};    // max |Tr[H d rho/dt]| on the hot hold
    double heat_rate_peak_ramps{0.0};  // same on both ramps
};

struct EngineOptions {
    double step{0.01};
    int sample_stride{10};
    double plateau_window{100.0};  // time units
    double plateau_tol_rel{1e-5};
    double plateau_tol_abs{1e-14};
    double transient_max{20000.0};
    double cold_max{20000.0};      // cap on a single cold stroke
    bool extend_cold{true};
    bool check_positivity{true};
    /// Optional progress messages.
    std::function<void(const std::string&)> progress;

    std::vector<std::string> violations(const std::string& prefix = "integrator") const;
    void validate() const;
};

struct RunDiagnostics {
    int dressed_builds{0};
    bool block_mode{false};
    long long steps{0};
    double max_trace_drift{0.0};
    int trace_renormalizations{0};
    double max_hermiticity_residual{0.0};
    int positivity_violations{0};
    double min_eigenvalue{0.0};  // at stroke boundaries
    double max_first_law_residual{0.0};
    double transient_end{0.0};
    bool transient_plateau{false};
    double wall_seconds{0.0};
};

struct EngineResult {
    Ledger ledger;
    std::vector<CycleReport> cycles;
    DriveSchedule schedule;  // with the realized cycle starts
    RunDiagnostics diagnostics;
    Eigen::VectorXd energies;
};

/// Prepares the bare vacuum, lets both walls thermalize until the energy
/// plateaus (the reference point U = W = Q = 0), then runs sched.n_cycles
/// cycles of compression, hot isochoric, expansion and cold isochoric. The
/// dressed basis is built once from H_s at model.omega_c. Cycle starts in
/// `sched` are ignored and replaced by the realized ones.
EngineResult run_engine(const ModelParams& model, const BathParams& baths, const DriveSchedule& sched,
                        const TruncationSpec& spec, const EngineOptions& options = {});

/// Smallest eigenvalue of a Hermitian matrix, computed block-wise when the
/// sector labels allow it.
double min_eigenvalue(const CMatrix& rho, const std::vector<int>& sector = {});

} // namespace qfe
