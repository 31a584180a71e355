// cycle.cpp — transient, four-stroke cycles and the per-cycle bookkeeping

#include "qfe/cycle.hpp"

#include "qfe/errors.hpp"
#include "qfe/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qfe {

bool detect_plateau(std::span<const double> series, std::size_t window, double tol) {
    if (window < 10) throw std::invalid_argument("detect_plateau: window must be >= 10 samples");
    if (series.size() < window) return false;
    const auto tail = series.subspan(series.size() - window);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    return *hi - *lo < tol;
}

double carnot_efficiency(double T_c, double T_h) {
    if (!(T_c > 0.0) || !(T_h > 0.0)) throw InvalidParameter({"temperatures must be > 0"});
    return 1.0 - T_c / T_h;
}

Efficiency efficiency(double W_net, double Q_in, double T_c, double T_h) {
    if (!(Q_in > 0.0)) throw NoHeatInput("efficiency: no heat absorbed (Q_in <= 0)");
    return {-W_net / Q_in, carnot_efficiency(T_c, T_h)};
}

const char* to_string(Stroke s) noexcept {
    switch (s) {
    case Stroke::compression: return "compression";
    case Stroke::hot: return "hot_isochoric";
    case Stroke::expansion: return "expansion";
    case Stroke::cold: return "cold_isochoric";
    }
    return "?";
}

namespace {

// Index of the ledger sample closest in time to t.
std::size_t nearest_sample(const Ledger& ledger, double t) {
    const auto it = std::lower_bound(ledger.begin(), ledger.end(), t,
                                     [](const LedgerSample& s, double x) { return s.t < x; });
    if (it == ledger.end()) return ledger.size() - 1;
    const auto k = static_cast<std::size_t>(it - ledger.begin());
    if (k > 0 && std::abs(ledger[k - 1].t - t) <= std::abs(it->t - t)) return k - 1;
    return k;
}

} // namespace

std::vector<CycleFlows> stroke_attribution(const Ledger& ledger, const DriveSchedule& sched) {
    std::vector<CycleFlows> out;
    if (ledger.empty()) return out;
    for (std::size_t c = 0; c < sched.cycle_starts.size(); ++c) {
        const StrokeTimes st = sched.strokes(c);
        const double end =
            c + 1 < sched.cycle_starts.size() ? sched.cycle_starts[c + 1] : ledger.back().t;
        const std::array<double, 5> edges{st.compression, st.hot, st.expansion, st.cold, end};
        CycleFlows flows{};
        for (int k = 0; k < 4; ++k) {
            const LedgerSample& a = ledger[nearest_sample(ledger, edges[k])];
            const LedgerSample& b = ledger[nearest_sample(ledger, edges[k + 1])];
            flows[static_cast<std::size_t>(k)] =
                StrokeFlow{static_cast<Stroke>(k), a.t, b.t, b.U - a.U, b.Q - a.Q, b.W - a.W};
        }
        out.push_back(flows);
    }
    return out;
}

std::vector<std::string> EngineOptions::violations(const std::string& prefix) const {
    std::vector<std::string> out;
    const auto field = [&](const char* name) { return prefix + "." + name; };
    if (!std::isfinite(step) || !(step > 0.0)) out.push_back(field("step") + ": must be > 0");
    if (sample_stride < 1) out.push_back(field("sample_stride") + ": must be >= 1");
    if (!(plateau_window > 0.0)) out.push_back(field("plateau_window") + ": must be > 0");
    if (step > 0.0 && sample_stride >= 1 && plateau_window / (step * sample_stride) < 10.0) {
        out.push_back(field("plateau_window") + ": must span at least 10 samples");
    }
    if (!(plateau_tol_rel >= 0.0)) out.push_back(field("plateau_tol_rel") + ": must be >= 0");
    if (!(plateau_tol_abs >= 0.0)) out.push_back(field("plateau_tol_abs") + ": must be >= 0");
    if (!(transient_max >= 0.0)) out.push_back(field("transient_max") + ": must be >= 0");
    if (!(cold_max > 0.0)) out.push_back(field("cold_max") + ": must be > 0");
    return out;
}

void EngineOptions::validate() const {
    if (auto v = violations(); !v.empty()) throw InvalidParameter(std::move(v));
}

double min_eigenvalue(const CMatrix& rho, const std::vector<int>& sector) {
    const Eigen::Index n = rho.rows();
    const CMatrix herm = 0.5 * (rho + rho.adjoint());
    if (sector.size() != static_cast<std::size_t>(n)) {
        return Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    }
    const int n_sectors = *std::max_element(sector.begin(), sector.end()) + 1;
    double lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_sectors; ++s) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (sector[static_cast<std::size_t>(k)] == s) idx.push_back(k);
        }
        if (idx.empty()) continue;
        const CMatrix block = herm(idx, idx);
        lo = std::min(lo, Eigen::SelfAdjointEigenSolver<CMatrix>(block, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff());
    }
    return lo;
}

namespace {

constexpr double kPositivityTolerance = 1e-8;

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

// Step-by-step propagation of the packed state with sampling, bookkeeping
// and invariant checks.
class Propagator {
public:
    Propagator(const DressedLiouvillian& lv, const DriveSchedule& sched, const EngineOptions& opt,
               RunDiagnostics& diag)
        : lv_(lv), sched_(sched), opt_(opt), diag_(diag) {}

    void start(const CMatrix& rho0) {
        y_ = lv_.pack(rho0);
        t_ = 0.0;
        index_ = 0;
        lv_.apply_packed(y_, f(t_, sched_), ws_.k1);
        acc_.reset(0.0, energy(), power_now(), heat_rate());
        record();
    }

    double t() const noexcept { return t_; }
    Ledger& ledger() noexcept { return ledger_; }
    TraceLog& trace_log() noexcept { return trace_; }

    /// Runs up to n steps. After each regular sample `stop()` may end the
    /// segment early. The segment always ends on a recorded sample.
    template <class Stop>
    long long run(long long n, Stop&& stop, double* heat_peak = nullptr) {
        long long done = 0;
        while (done < n) {
            step();
            ++done;
            if (heat_peak) *heat_peak = std::max(*heat_peak, std::abs(acc_.J()));
            if (index_ % opt_.sample_stride == 0) {
                record();
                if (stop()) break;
            }
        }
        if (ledger_.back().t != t_) record();
        return done;
    }

    long long run(long long n, double* heat_peak = nullptr) {
        return run(n, [] { return false; }, heat_peak);
    }

    /// Shifts the energy reference to the current state; earlier samples are
    /// re-expressed relative to it.
    void rereference() {
        const double dU = acc_.delta_U();
        const double dW = acc_.W();
        acc_.rereference();
        for (auto& s : ledger_) {
            s.U -= dU;
            s.W -= dW;
            s.Q = s.U - s.W;
        }
    }

    double number(Channel ch) const { return lv_.number_packed(y_, ch); }

    double min_eigenvalue() const {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < lv_.sector_count(); ++s) {
            const CMatrix b = lv_.block(y_, s);
            lo = std::min(lo, Eigen::SelfAdjointEigenSolver<CMatrix>(b, Eigen::EigenvaluesOnly)
                                  .eigenvalues()
                                  .minCoeff());
        }
        return lo;
    }

private:
    double energy() const { return lv_.energy_packed(y_, f(t_, sched_)); }
    double power_now() const {
        const double fd = f_dot(t_, sched_);
        return fd == 0.0 ? 0.0 : fd * lv_.delta_omega() * lv_.drive_expectation_packed(y_);
    }
    double heat_rate() const { return lv_.energy_packed(ws_.k1, f(t_, sched_)); }

    void step() {
        const auto gen = [this](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
            lv_.apply_packed(y, f(t, sched_), out);
        };
        rk4_update(y_, t_, opt_.step, gen, ws_, true);
        ++index_;
        t_ = static_cast<double>(index_) * opt_.step;
        if (!y_.allFinite()) throw Divergence("non-finite density matrix at t = " + std::to_string(t_), t_);
        const double tr = lv_.trace_packed(y_);
        const double drift = std::abs(tr - 1.0);
        trace_.max_drift = std::max(trace_.max_drift, drift);
        if (drift > kTraceRenormalize) {
            y_ /= tr;
            ++trace_.renormalizations;
            trace_.renormalized_at.push_back(t_);
        }
        lv_.apply_packed(y_, f(t_, sched_), ws_.k1);
        acc_.advance(t_, energy(), power_now(), heat_rate());
        ++diag_.steps;
    }

    void record() {
        LedgerSample s;
        s.t = t_;
        s.U = acc_.delta_U();
        s.W = acc_.W();
        s.Q = acc_.Q();
        s.P = acc_.P();
        s.N_c = number(Channel::cavity);
        s.N_w1 = number(Channel::wall1);
        s.N_w2 = number(Channel::wall2);
        s.f = f(t_, sched_);
        s.heat_rate = acc_.J();
        s.first_law_residual = acc_.first_law_residual();
        ledger_.push_back(s);

        diag_.max_first_law_residual = std::max(diag_.max_first_law_residual, s.first_law_residual);
        diag_.max_hermiticity_residual =
            std::max(diag_.max_hermiticity_residual, lv_.hermiticity_residual_packed(y_));
        if (opt_.check_positivity && !positive()) ++diag_.positivity_violations;
    }

    // Cholesky of rho + tol * 1 succeeds iff the smallest eigenvalue > -tol.
    bool positive() const {
        for (std::size_t s = 0; s < lv_.sector_count(); ++s) {
            CMatrix b = lv_.block(y_, s);
            if (b.rows() == 1) {
                if (b(0, 0).real() < -kPositivityTolerance) return false;
                continue;
            }
            b.diagonal().array() += kPositivityTolerance;
            if (Eigen::LLT<CMatrix>(b).info() != Eigen::Success) return false;
        }
        return true;
    }

    const DressedLiouvillian& lv_;
    const DriveSchedule& sched_;
    const EngineOptions& opt_;
    RunDiagnostics& diag_;

    Eigen::VectorXd y_;
    double t_{0.0};
    RK4Buffers<Eigen::VectorXd> ws_;
    TraceLog trace_;
    ThermoAccumulator acc_;
    Ledger ledger_;
    long long index_{0};
};

long long steps_for(double duration, double h) {
    return std::max<long long>(1, std::llround(duration / h));
}

} // namespace

EngineResult run_engine(const ModelParams& model, const BathParams& baths, const DriveSchedule& sched_in,
                        const TruncationSpec& spec, const EngineOptions& opt) {
    const auto wall_start = std::chrono::steady_clock::now();
    model.validate();
    spec.validate();
    opt.validate();
    DriveSchedule sched = sched_in;
    sched.cycle_starts.clear();
    sched.validate();
    const auto bath = bath_specs(baths);
    const auto say = [&](const std::string& msg) {
        if (opt.progress) opt.progress(msg);
    };

    EngineResult result;
    RunDiagnostics& diag = result.diagnostics;

    // The dressed basis is fixed for the whole run.
    const EigenSystem es = eig_hermitian(build_Hs(model, spec));
    const ModeOperators ops = ModeOperators::build(spec);
    const DressedSet ds = build_dressed_operators(es, {ops.x_a, ops.x_1, ops.x_2});
    ++diag.dressed_builds;
    result.energies = ds.energies;
    DressedLiouvillian lv(ds, bath, sched.delta_omega());

    const CMatrix rho0 = ds.to_dressed(pure_state(ds.dim(), 0).rho);
    if (!lv.packable(rho0)) {
        throw ContractViolation("run_engine: initial state couples sparsity sectors of H_s");
    }
    diag.block_mode = lv.sector_count() > 1;
    Propagator prop(lv, sched, opt, diag);
    prop.start(rho0);

    const double h = opt.step;
    const double sample_dt = h * opt.sample_stride;
    const auto window = static_cast<std::size_t>(std::llround(opt.plateau_window / sample_dt));
    Ledger& ledger = prop.ledger();

    // Plateau of U over the samples since `first`, relative to their range.
    // The range is extended incrementally as samples arrive.
    std::size_t range_first = 0, range_next = 0;
    double range_lo = 0.0, range_hi = 0.0;
    std::vector<double> tail(window);
    const auto plateau_since = [&](std::size_t first) {
        if (first != range_first || range_next == 0) {
            range_first = range_next = first;
            range_lo = range_hi = ledger[first].U;
        }
        for (; range_next < ledger.size(); ++range_next) {
            range_lo = std::min(range_lo, ledger[range_next].U);
            range_hi = std::max(range_hi, ledger[range_next].U);
        }
        if (ledger.size() - first < window) return false;
        for (std::size_t k = 0; k < window; ++k) tail[k] = ledger[ledger.size() - window + k].U;
        return detect_plateau(tail, window,
                              std::max(opt.plateau_tol_rel * (range_hi - range_lo), opt.plateau_tol_abs));
    };

    // Transient: both walls thermalize with the drive off.
    const long long transient_steps = std::llround(opt.transient_max / h);
    if (transient_steps > 0) {
        prop.run(transient_steps, [&] { return plateau_since(0); });
        diag.transient_plateau = plateau_since(0);
    }
    diag.transient_end = prop.t();
    prop.rereference();
    say(fmt("transient ended at t = %.2f", prop.t()) +
        (diag.transient_plateau ? " (plateau reached)" : " (plateau not reached)"));

    const long long n_tau = steps_for(sched.tau, h);
    const long long n_hot = steps_for(sched.dt_hot, h);
    const long long n_cold = steps_for(sched.dt_cold, h);
    const long long n_cold_max = std::max(n_cold, steps_for(opt.cold_max, h));
    std::vector<double> min_eigs;
    const auto boundary_check = [&] {
        min_eigs.push_back(prop.min_eigenvalue());
    };
    boundary_check();

    const double n_cold_ref = n_thermal(sched.omega_eff_1, baths.T_c);
    const double n_hot_ref = n_thermal(sched.omega_eff_2, baths.T_h);

    for (int c = 0; c < sched.n_cycles; ++c) {
        CycleReport rep;
        rep.index = c + 1;
        rep.t_begin = prop.t();
        const std::size_t first = ledger.size() - 1;
        sched.cycle_starts.push_back(prop.t());

        double ramp_peak = 0.0, hot_peak = 0.0;
        prop.run(n_tau, &ramp_peak);
        boundary_check();

        rep.N_c_begin_hot = prop.number(Channel::cavity);
        rep.N_w2_begin_hot = prop.number(Channel::wall2);
        rep.N_w2_min_hot = rep.N_w2_begin_hot;
        prop.run(
            n_hot,
            [&] {
                rep.N_w2_min_hot = std::min(rep.N_w2_min_hot, ledger.back().N_w2);
                return false;
            },
            &hot_peak);
        rep.N_w2_min_hot = std::min(rep.N_w2_min_hot, ledger.back().N_w2);
        rep.N_c_end_hot = prop.number(Channel::cavity);
        boundary_check();

        prop.run(n_tau, &ramp_peak);
        boundary_check();

        const double cold_begin = prop.t();
        prop.run(n_cold);
        rep.cold_plateau = plateau_since(first);
        if (opt.extend_cold && !rep.cold_plateau && n_cold_max > n_cold) {
            prop.run(n_cold_max - n_cold, [&] { return plateau_since(first); });
            rep.cold_plateau = plateau_since(first);
        }
        rep.cold_duration = prop.t() - cold_begin;
        rep.N_c_end_cold = prop.number(Channel::cavity);
        rep.t_end = prop.t();
        rep.heat_rate_peak_hot = hot_peak;
        rep.heat_rate_peak_ramps = ramp_peak;
        boundary_check();
        result.cycles.push_back(rep);
        say(fmt("cycle %.0f done at t = %.2f", c + 1.0, prop.t()));
    }

    const auto flows = stroke_attribution(ledger, sched);
    for (std::size_t c = 0; c < result.cycles.size(); ++c) {
        CycleReport& rep = result.cycles[c];
        rep.strokes = flows[c];
        rep.W_net = 0.0;
        for (const auto& s : rep.strokes) rep.W_net += s.dW;
        rep.W_out = -rep.W_net;
        rep.Q_in = rep.strokes[static_cast<int>(Stroke::hot)].dQ;
        rep.Q_out = -rep.strokes[static_cast<int>(Stroke::cold)].dQ;
        rep.eta_carnot = carnot_efficiency(baths.T_c, baths.T_h);
        try {
            rep.eta = efficiency(rep.W_net, rep.Q_in, baths.T_c, baths.T_h).eta;
        } catch (const NoHeatInput&) {
            rep.eta = std::numeric_limits<double>::quiet_NaN();
        }
        rep.engine_works = rep.W_out > 0.0;
        rep.suppression_cold = 1.0 - rep.N_c_end_cold / n_cold_ref;
        rep.suppression_hot = 1.0 - rep.N_c_end_hot / n_hot_ref;
    }

    diag.max_trace_drift = prop.trace_log().max_drift;
    diag.trace_renormalizations = prop.trace_log().renormalizations;
    diag.min_eigenvalue = *std::min_element(min_eigs.begin(), min_eigs.end());
    result.schedule = sched;
    result.ledger = std::move(ledger);
    diag.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

} // namespace qfe
