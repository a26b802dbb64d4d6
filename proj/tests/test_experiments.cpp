#include <doctest.h>

#include <cmath>
#include <vector>

#include "chemovir/experiments.hpp"
#include "chemovir/output.hpp"

using namespace chemovir;

namespace {

RunSetup small_interval_setup() {
    RunSetup setup;
    setup.model.kappa = 1.0;
    setup.model.conversion = {ConversionKind::Saturated, 1.0, 1.0, {}, {}};
    setup.grid = {Geometry::Interval, 1.0, 1.0, 32, 1};
    setup.stepper.t_end = 2.0;
    setup.stepper.dt_max = 1e-2;
    setup.initial.family = InitialFamily::RandomBump;
    setup.initial.mass_u = 1.0;
    setup.initial.mass_v = 0.2;
    setup.initial.mass_w = 0.2;
    setup.sample_interval = 0.1;
    return setup;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("gradient-monitor exponent defaults to dimension plus one") {
    RunSetup setup = small_interval_setup();
    CHECK(effective_q(setup) == 2.0);
    setup.grid.geometry = Geometry::RadialDisk;
    CHECK(effective_q(setup) == 3.0);
    setup.grid = {Geometry::Rectangle, 1.0, 1.0, 8, 8};
    CHECK(effective_q(setup) == 3.0);
    setup.q = 4.5;
    CHECK(effective_q(setup) == 4.5);
}

TEST_CASE("a full run produces a classified series with positive margin") {
    const RunRecord rec = execute_run(small_interval_setup());
    CHECK(rec.outcome.classification == Classification::Bounded);
    CHECK(rec.series.size() >= 10);
    CHECK(rec.series.front().t == 0.0);
    CHECK(rec.series.back().t == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rec.steps > 0);
    CHECK(rec.positivity_margin >= 0.0);
    CHECK(rec.final_state.u.size() == 32);
    CHECK(rec.wall_seconds > 0.0);
}

TEST_CASE("runs are reproducible to the byte") {
    const RunRecord a = execute_run(small_interval_setup());
    const RunRecord b = execute_run(small_interval_setup());
    CHECK(diagnostics_csv(a.series) == diagnostics_csv(b.series));
    CHECK(a.final_state.u.values == b.final_state.u.values);
}

TEST_CASE("the homogeneous system runs through the same front door") {
    RunSetup setup;
    setup.model.system = SystemKind::MayNowakODE;
    setup.model.kappa = 2.0;
    setup.model.conversion = {ConversionKind::Identity, 1.0, 1.0, {}, {}};
    setup.stepper.dt_init = 0.01;
    setup.stepper.t_end = 50.0;
    setup.initial.family = InitialFamily::Constant;
    setup.initial.mass_u = 2.4;
    setup.initial.mass_v = 0.1;
    setup.initial.mass_w = 0.1;
    setup.sample_interval = 0.5;

    const RunRecord rec = execute_run(setup);
    CHECK(rec.outcome.classification == Classification::Bounded);
    CHECK(rec.series.size() >= 10);
    // settles on the infected state (1, 1, 1)
    CHECK(rec.series.back().mass_u == doctest::Approx(1.0).epsilon(1e-3));
    REQUIRE(rec.series.back().mass_w.has_value());
    CHECK(*rec.series.back().mass_w == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rec.steps == 5000);
}

TEST_CASE("sweep enumerates tuples in order and stays deterministic") {
    SweepSpec spec;
    spec.base = small_interval_setup();
    spec.base.stepper.t_end = 1.5;
    spec.alpha_values = {0.5, 1.5};
    spec.kappa_values = {1.0};
    spec.seeds = {1, 2};

    const SweepResult a = run_sweep(spec);
    REQUIRE(a.entries.size() == 4);
    CHECK(a.entries[0].alpha == 0.5);
    CHECK(a.entries[0].seed == 1);
    CHECK(a.entries[1].alpha == 0.5);
    CHECK(a.entries[1].seed == 2);
    CHECK(a.entries[2].alpha == 1.5);
    for (const auto& e : a.entries)
        CHECK(e.outcome.classification == Classification::Bounded);

    const SweepResult b = run_sweep(spec);
    CHECK(sweep_summary_csv(a) == sweep_summary_csv(b));
    for (size_t i = 0; i < a.entries.size(); ++i)
        CHECK(diagnostics_csv(a.entries[i].series) ==
              diagnostics_csv(b.entries[i].series));
}

TEST_CASE("a failing tuple is recorded as diverged without aborting the sweep") {
    SweepSpec spec;
    spec.base = small_interval_setup();
    spec.base.sample_interval = 10.0;  // too coarse for any plateau verdict
    spec.alpha_values = {1.0};
    spec.kappa_values = {1.0};
    spec.seeds = {1};

    const SweepResult res = run_sweep(spec);
    REQUIRE(res.entries.size() == 1);
    CHECK(res.entries[0].outcome.classification == Classification::Diverged);
}

TEST_CASE("bisection refines the bracket by the prescribed arithmetic") {
    std::vector<double> asked;
    auto probe = [&](double alpha) {
        asked.push_back(alpha);
        return alpha > 0.9;
    };
    const CriticalAlphaResult res = estimate_critical_alpha(probe, 0.5, 1.5, 4);

    CHECK(res.hi - res.lo == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(res.lo == doctest::Approx(0.875));
    CHECK(res.hi == doctest::Approx(0.9375));
    CHECK(res.estimate == doctest::Approx((0.875 + 0.9375) / 2.0));
    REQUIRE(asked.size() == 6);  // two endpoints + four refinements
    CHECK(asked[0] == 0.5);
    CHECK(asked[1] == 1.5);
    CHECK(asked[2] == 1.0);
    CHECK(res.probes.size() == 6);
    CHECK(res.probes[0] == std::pair{0.5, false});
    CHECK(res.probes[1] == std::pair{1.5, true});
}

TEST_CASE("bisection rejects brackets whose endpoints agree") {
    auto never = [](double) { return false; };
    CHECK_THROWS_AS(estimate_critical_alpha(never, 0.5, 1.5, 4), BracketInvalid);
    auto always = [](double) { return true; };
    CHECK_THROWS_AS(estimate_critical_alpha(always, 0.5, 1.5, 4), BracketInvalid);
}

TEST_CASE("bisection accepts an inverted dichotomy") {
    // Blow-up on the low side still brackets; the refinement just tracks
    // the transition from the other end.
    auto probe = [](double alpha) { return alpha < 0.9; };
    const CriticalAlphaResult res = estimate_critical_alpha(probe, 0.5, 1.5, 4);
    CHECK(res.hi - res.lo == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(res.estimate == doctest::Approx((0.875 + 0.9375) / 2.0));
}

TEST_CASE("discrete operator study observes second order") {
    const auto rows = convergence_study(StudyKind::LaplacianEigen, 4);
    REQUIRE(rows.size() == 4);
    CHECK(!rows[0].observed_order.has_value());
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].error < rows[i - 1].error);
        CHECK(*rows[i].observed_order == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("time-refinement study of the decoupled species observes first order") {
    const auto rows = convergence_study(StudyKind::WEquationTime, 3);
    REQUIRE(rows.size() == 3);
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(*rows[i].observed_order == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("space-refinement study of the decoupled species observes second order") {
    const auto rows = convergence_study(StudyKind::WEquationSpace, 3);
    REQUIRE(rows.size() == 3);
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(*rows[i].observed_order == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("mass-relation study observes first order in the step size") {
    const auto rows = convergence_study(StudyKind::MassODE, 3);
    REQUIRE(rows.size() == 3);
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(*rows[i].observed_order == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("study rejects fewer than three levels") {
    CHECK_THROWS_AS(convergence_study(StudyKind::LaplacianEigen, 2),
                    std::invalid_argument);
}

TEST_CASE("phase study matches limits against the steady-state catalog") {
    ConversionSpec ident{ConversionKind::Identity, 1.0, 1.0, {}, {}};
    const auto entries = ode_phase_study({0.5, 2.0}, ident, 100.0);
    REQUIRE(entries.size() == 2);

    CHECK(entries[0].kappa == 0.5);
    CHECK(entries[0].converged);
    CHECK(entries[0].matched_equilibrium == 0);  // infection-free
    CHECK(entries[0].limit[0] == doctest::Approx(0.5).epsilon(1e-4));

    CHECK(entries[1].kappa == 2.0);
    CHECK(entries[1].converged);
    CHECK(entries[1].matched_equilibrium == 1);  // infected
    CHECK(entries[1].limit[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(entries[1].limit[2] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_SUITE_END();
