#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "chemovir/diagnostics.hpp"

using namespace chemovir;

namespace {

std::shared_ptr<const Grid> unit_interval(int cells) {
    return std::make_shared<const Grid>(
        build_grid({Geometry::Interval, 1.0, 1.0, cells, 1}));
}

State constant_state(std::shared_ptr<const Grid> grid, double u, double v,
                     double w, double t = 0.0) {
    State s;
    s.t = t;
    s.u = Field(grid, u);
    s.v = Field(grid, v);
    s.w = Field(grid, w);
    return s;
}

std::vector<DiagnosticsRow> synthetic_series(
    const std::vector<double>& linf_u, double dt = 0.1,
    const std::vector<double>& grad = {}, const std::vector<double>& linf_w = {}) {
    std::vector<DiagnosticsRow> rows;
    for (size_t i = 0; i < linf_u.size(); ++i) {
        DiagnosticsRow r;
        r.t = static_cast<double>(i) * dt;
        r.dt = dt;
        r.mass_u = 1.0;
        r.mass_v = 0.5;
        r.linf_u = linf_u[i];
        if (!grad.empty()) r.grad_v_lq = grad[i];
        if (!linf_w.empty()) r.linf_w = linf_w[i];
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("row quadratures on a constant state") {
    auto grid = unit_interval(32);
    ModelSpec spec;
    spec.kappa = 1.0;
    spec.conversion = {ConversionKind::Saturated, 1.5, 1.0, {}, {}};

    const State s = constant_state(grid, 2.0, 1.0, 0.5);
    const DiagnosticsRow row = compute_row(s, spec, 2.0, nullptr);

    CHECK(row.mass_u == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(row.mass_v == doctest::Approx(1.0).epsilon(1e-13));
    REQUIRE(row.mass_w.has_value());
    CHECK(*row.mass_w == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(row.linf_u == 2.0);
    REQUIRE(row.linf_w.has_value());
    CHECK(*row.linf_w == 0.5);
    REQUIRE(row.grad_v_lq.has_value());
    CHECK(*row.grad_v_lq == 0.0);

    // Energy monitor for a flat state: (1/alpha) * |domain| * u^alpha.
    REQUIRE(row.functional_E.has_value());
    CHECK(*row.functional_E ==
          doctest::Approx(std::pow(2.0, 1.5) / 1.5).epsilon(1e-12));

    REQUIRE(row.mass_ode_residual.has_value());
    CHECK(*row.mass_ode_residual == 0.0);

    CHECK_THROWS_AS(compute_row(s, spec, 1.0, nullptr), std::invalid_argument);
}

TEST_CASE("two-species rows leave the three-species columns empty") {
    auto grid = unit_interval(16);
    ModelSpec spec;
    spec.system = SystemKind::KSParabolicParabolic;
    spec.conversion = {ConversionKind::PowerLaw, 1.5, 1.0, {}, {}};

    State s;
    s.u = Field(grid, 1.0);
    s.v = Field(grid, 0.2);
    const DiagnosticsRow row = compute_row(s, spec, 3.0, nullptr);
    CHECK(!row.mass_w.has_value());
    CHECK(!row.linf_w.has_value());
    CHECK(!row.mass_ode_residual.has_value());
    CHECK(row.functional_E.has_value());
}

TEST_CASE("nonuniform rates disable the mass-relation residual") {
    auto grid = unit_interval(16);
    ModelSpec spec;
    spec.decay_v = 2.0;
    const State s = constant_state(grid, 1.0, 0.1, 0.1);
    const DiagnosticsRow row = compute_row(s, spec, 2.0, nullptr);
    CHECK(!row.mass_ode_residual.has_value());
}

TEST_CASE("the residual measures the gap to the exponential relaxation") {
    auto grid = unit_interval(32);
    ModelSpec spec;
    spec.kappa = 2.0;
    spec.conversion = {ConversionKind::Identity, 1.0, 1.0, {}, {}};

    const State s0 = constant_state(grid, 1.0, 0.5, 0.3, 0.0);
    const DiagnosticsRow r0 = compute_row(s0, spec, 2.0, nullptr);

    // Later state placed exactly on the relaxation curve of u+v.
    const double t = 0.7;
    const double z = 1.5 * std::exp(-t) + 2.0 * (1.0 - std::exp(-t));
    const State s1 = constant_state(grid, z - 0.2, 0.2, 0.3, t);
    const DiagnosticsRow r1 = compute_row(s1, spec, 2.0, &r0);
    REQUIRE(r1.mass_ode_residual.has_value());
    CHECK(std::abs(*r1.mass_ode_residual) < 1e-13);

    // Placing it off the curve by 0.05 shows up as exactly that gap.
    const State s2 = constant_state(grid, z - 0.2 + 0.05, 0.2, 0.3, t);
    const DiagnosticsRow r2 = compute_row(s2, spec, 2.0, &r0);
    CHECK(*r2.mass_ode_residual == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("functional exponent per conversion profile") {
    CHECK(*functional_exponent({ConversionKind::Saturated, 0.7, 1.0, {}, {}}) ==
          0.7);
    CHECK(*functional_exponent({ConversionKind::PowerLaw, 1.5, 1.0, {}, {}}) ==
          1.5);
    CHECK(*functional_exponent({ConversionKind::Identity, 0.3, 1.0, {}, {}}) ==
          1.0);
    CHECK(!functional_exponent(
               {ConversionKind::Custom, 1.0, 1.0, {0.0, 1.0}, {0.0, 1.0}})
               .has_value());
}

TEST_CASE("flat series classify as bounded with the worst ratio reported") {
    auto series = synthetic_series(std::vector<double>(24, 1.0));
    series[20].linf_u = 1.04;  // small late excursion
    const RunOutcome out =
        classify(series, Termination::ReachedTEnd, 2.3, false);
    CHECK(out.classification == Classification::Bounded);
    CHECK(out.plateau_ratio == doctest::Approx(1.04));
    CHECK(out.peak_linf_u == doctest::Approx(1.04));
    CHECK(out.t_detect == 2.3);
}

TEST_CASE("doubling of the sup norm between halves classifies as growing") {
    std::vector<double> linf;
    for (int i = 0; i < 24; ++i) linf.push_back(std::pow(1.15, i));
    const RunOutcome out =
        classify(synthetic_series(linf), Termination::ReachedTEnd, 2.3, false);
    CHECK(out.classification == Classification::Growing);
}

TEST_CASE("drift above the plateau band without doubling is inconclusive") {
    std::vector<double> linf;
    for (int i = 0; i < 24; ++i) linf.push_back(1.0 + 0.01 * i);
    const RunOutcome out =
        classify(synthetic_series(linf), Termination::ReachedTEnd, 2.3, false);
    CHECK(out.classification == Classification::Inconclusive);
}

TEST_CASE("a growing signal monitor alone blocks the bounded verdict") {
    std::vector<double> flat(24, 1.0), grad;
    for (int i = 0; i < 24; ++i) grad.push_back(0.5 + 0.05 * i);
    const RunOutcome out = classify(synthetic_series(flat, 0.1, grad),
                                    Termination::ReachedTEnd, 2.3, false);
    CHECK(out.classification == Classification::Inconclusive);
    CHECK(out.peak_grad_v_lq == doctest::Approx(0.5 + 0.05 * 23));
}

TEST_CASE("early termination passes through before any row-count rule") {
    auto series = synthetic_series({1.0, 5.0, 400.0});
    const RunOutcome blow =
        classify(series, Termination::BlowUpSuspected, 0.2, true);
    CHECK(blow.classification == Classification::BlowUp);
    CHECK(blow.dt_collapsed);
    CHECK(blow.t_detect == 0.2);
    CHECK(blow.peak_linf_u == 400.0);

    const RunOutcome div = classify(series, Termination::Diverged, 0.2, false);
    CHECK(div.classification == Classification::Diverged);
}

TEST_CASE("plateau analysis requires ten samples") {
    auto series = synthetic_series({1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(classify(series, Termination::ReachedTEnd, 0.5, false),
                    TooFewSamples);
}

TEST_CASE("classification is stable under twofold subsampling") {
    std::vector<double> linf;
    for (int i = 0; i < 40; ++i)
        linf.push_back(1.0 + 0.3 * std::exp(-0.5 * i));  // settling transient
    const auto full = synthetic_series(linf);
    std::vector<DiagnosticsRow> half;
    for (size_t i = 0; i < full.size(); i += 2) half.push_back(full[i]);

    const auto a = classify(full, Termination::ReachedTEnd, 3.9, false);
    const auto b = classify(half, Termination::ReachedTEnd, 3.9, false);
    CHECK(a.classification == Classification::Bounded);
    CHECK(b.classification == a.classification);
}

TEST_CASE("halves are split by time, not by row index") {
    // Cluster many early samples before t = 1, then a few late ones; a
    // row-index split would place late rows in the early half and
    // misread the late excursion.
    std::vector<DiagnosticsRow> rows;
    for (int i = 0; i < 18; ++i) {
        DiagnosticsRow r;
        r.t = 0.05 * i;  // up to 0.85
        r.linf_u = 1.0;
        rows.push_back(r);
    }
    for (int i = 0; i < 4; ++i) {
        DiagnosticsRow r;
        r.t = 1.6 + 0.1 * i;
        r.linf_u = 2.5;  // late doubling
        rows.push_back(r);
    }
    const auto out = classify(rows, Termination::ReachedTEnd, 2.0, false);
    CHECK(out.classification == Classification::Growing);
}

TEST_CASE("dissipation report fits the settling energy") {
    std::vector<DiagnosticsRow> rows;
    for (int i = 0; i <= 60; ++i) {
        DiagnosticsRow r;
        r.t = 0.1 * i;
        r.linf_u = 1.0;
        r.functional_E = 1.0 + std::exp(-r.t);  // dE/dt = -(E - 1)
        rows.push_back(r);
    }
    const FunctionalReport rep = check_functional_dissipation(rows, 1.5, 1);
    CHECK(rep.applicable);
    CHECK(rep.sup_E == doctest::Approx(2.0));
    CHECK(rep.plateau);
    CHECK(rep.fit_slope < 0.0);
    CHECK(rep.fit_slope == doctest::Approx(-1.0).epsilon(0.1));

    CHECK(!check_functional_dissipation(rows, 1.5, 2).applicable);
    CHECK(!check_functional_dissipation(rows, 0.8, 1).applicable);
    CHECK(!check_functional_dissipation(rows, 1.0, 1).applicable);
}

TEST_CASE("verdict and termination names") {
    CHECK(to_string(Classification::Bounded) == "Bounded");
    CHECK(to_string(Classification::Growing) == "Growing");
    CHECK(to_string(Classification::BlowUp) == "BlowUp");
    CHECK(to_string(Classification::Inconclusive) == "Inconclusive");
    CHECK(to_string(Classification::Diverged) == "Diverged");
    CHECK(to_string(Termination::ReachedTEnd) == "ReachedTEnd");
    CHECK(to_string(Termination::BlowUpSuspected) == "BlowUpSuspected");
    CHECK(to_string(Termination::Diverged) == "Diverged");
}

TEST_SUITE_END();
