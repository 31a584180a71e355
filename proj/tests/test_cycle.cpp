// test_cycle.cpp — plateau detection, efficiencies, stroke attribution and short engine runs

#include <doctest.h>

#include "qfe/cycle.hpp"
#include "qfe/errors.hpp"

#include <cmath>
#include <vector>

using namespace qfe;

namespace {

// A small, fast configuration: short strokes and a tiny truncation.
EngineResult short_run(ModelParams model, BathParams baths, int n_cycles, double omega_eff_1 = 1.0092,
                       double omega_eff_2 = 1.3068) {
    model.omega_c = omega_eff_1;
    DriveSchedule sched{omega_eff_1, omega_eff_2, 5.0, 300.0, 300.0, {}, n_cycles};
    EngineOptions opt;
    opt.transient_max = 600.0;
    opt.cold_max = 300.0;
    opt.plateau_window = 50.0;
    return run_engine(model, baths, sched, TruncationSpec{4, 3, 3}, opt);
}

} // namespace

TEST_CASE("plateau detection") {
    std::vector<double> flat(20, 1.0);
    CHECK(detect_plateau(flat, 10, 1e-12));
    std::vector<double> ramp;
    for (int k = 0; k < 20; ++k) ramp.push_back(k * 0.1);
    CHECK_FALSE(detect_plateau(ramp, 10, 0.5));
    CHECK(detect_plateau(ramp, 10, 1.0));
    CHECK_FALSE(detect_plateau(std::vector<double>(5, 1.0), 10, 1.0));  // shorter than the window
    CHECK_THROWS_AS(detect_plateau(flat, 9, 1.0), std::invalid_argument);
}

TEST_CASE("efficiency and the Carnot bound") {
    CHECK(carnot_efficiency(0.15, 0.40) == 0.625);
    const Efficiency e = efficiency(-1.0, 4.0, 0.15, 0.40);
    CHECK(e.eta == 0.25);
    CHECK(e.eta_carnot == 0.625);
    CHECK_THROWS_AS(efficiency(-1.0, 0.0, 0.15, 0.40), NoHeatInput);
    CHECK_THROWS_AS(carnot_efficiency(0.0, 0.4), InvalidParameter);
    CHECK(std::string(to_string(Stroke::hot)) == "hot_isochoric");
}

TEST_CASE("stroke attribution splits a synthetic ledger at the stroke edges") {
    DriveSchedule sched{1.0, 1.3, 10.0, 100.0, 100.0, {0.0}, 1};
    Ledger ledger;
    for (int k = 0; k <= 230; ++k) {
        LedgerSample s;
        s.t = k;
        s.W = -0.01 * k;          // linear work
        s.U = 0.001 * k * k;      // arbitrary energy
        s.Q = s.U - s.W;
        ledger.push_back(s);
    }
    const auto flows = stroke_attribution(ledger, sched);
    REQUIRE(flows.size() == 1);
    const CycleFlows& c = flows[0];
    CHECK(c[0].t_begin == 0.0);
    CHECK(c[0].t_end == 10.0);
    CHECK(c[1].t_end == 110.0);
    CHECK(c[2].t_end == 120.0);
    CHECK(c[3].t_end == 230.0);  // last cold stroke ends at the last sample
    double W = 0.0, Q = 0.0, U = 0.0;
    for (const auto& s : c) {
        W += s.dW;
        Q += s.dQ;
        U += s.dU;
    }
    CHECK(W == doctest::Approx(-2.3));
    CHECK(U == doctest::Approx(ledger.back().U));
    CHECK(U == doctest::Approx(W + Q));
    CHECK(c[1].dW == doctest::Approx(-1.0));
}

TEST_CASE("option validation") {
    EngineOptions o;
    CHECK(o.violations().empty());
    o.step = -1.0;
    o.sample_stride = 0;
    const auto v = o.violations();
    CHECK(v.size() >= 2);
    CHECK(v[0].find("integrator.step") != std::string::npos);
    CHECK_THROWS_AS(o.validate(), InvalidParameter);
}

TEST_CASE("no cycles: only the transient is integrated") {
    const EngineResult r = short_run(ModelParams{}, BathParams{}, 0);
    CHECK(r.cycles.empty());
    CHECK(r.ledger.size() > 10);
    CHECK(r.diagnostics.dressed_builds == 1);
    CHECK(r.diagnostics.block_mode);
    CHECK(r.ledger.back().U == doctest::Approx(0.0).epsilon(1e-14));  // reference point
}

TEST_CASE("short coupled run keeps the state physical and balances the books") {
    const EngineResult r = short_run(ModelParams{}, BathParams{}, 2);
    REQUIRE(r.cycles.size() == 2);
    const RunDiagnostics& d = r.diagnostics;
    CHECK(d.max_trace_drift < 1e-7);
    CHECK(d.max_hermiticity_residual < 1e-10);
    CHECK(d.positivity_violations == 0);
    CHECK(d.min_eigenvalue >= -1e-8);
    CHECK(d.max_first_law_residual < 1e-6);
    for (const CycleReport& c : r.cycles) {
        CHECK(c.W_net == doctest::Approx(c.strokes[0].dW + c.strokes[1].dW + c.strokes[2].dW + c.strokes[3].dW));
        CHECK(c.eta_carnot == 0.625);
        CHECK(c.engine_works == (c.W_out > 0.0));
        CHECK(c.Q_out == doctest::Approx(-c.strokes[3].dQ));
    }
    CHECK(r.schedule.cycle_starts.size() == 2);
    CHECK(r.schedule.cycle_starts[0] == doctest::Approx(d.transient_end));
}

TEST_CASE("equal bath temperatures produce no work") {
    BathParams b{};
    b.T_c = b.T_h = 0.3;
    const EngineResult r = short_run(ModelParams{}, b, 2);
    for (const CycleReport& c : r.cycles) CHECK(c.W_out <= 1e-4);
}

TEST_CASE("uncoupled model: the drive does no work on the empty cavity") {
    ModelParams p{};
    p.g_1 = p.g_2 = 0.0;
    const EngineResult r = short_run(p, BathParams{}, 1, 1.0, 1.3);
    REQUIRE(r.cycles.size() == 1);
    CHECK(std::abs(r.cycles[0].W_net) < 1e-12);
    for (const auto& s : r.ledger) CHECK(s.N_c < 1e-12);
    CHECK((std::isnan(r.cycles[0].eta) || std::abs(r.cycles[0].W_out) < 1e-12));
}

TEST_CASE("min_eigenvalue by block") {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 0.7;
    m(2, 2) = -0.2;
    CHECK(min_eigenvalue(m) == doctest::Approx(-0.2));
    CHECK(min_eigenvalue(m, {0, 1, 1}) == doctest::Approx(-0.2));
}
