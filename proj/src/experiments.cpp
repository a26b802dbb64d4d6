#include "chemovir/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "chemovir/kernels.hpp"

namespace chemovir {

void RunSetup::validate() const {
    model.validate();
    grid.validate();
    stepper.validate();
    initial.validate();
    if (sample_interval < 0.0)
        throw std::invalid_argument("run: sample_interval must be >= 0");
    if (q > 0.0 && q <= 1.0)
        throw std::invalid_argument("run: explicit q must exceed 1");
}

double effective_q(const RunSetup& setup) {
    if (setup.q > 1.0) return setup.q;
    const int dim = setup.grid.geometry == Geometry::Interval ? 1 : 2;
    return dim + 1.0;
}

namespace {

// Positivity audit over the fields the rejection policy guards (the
// zero-mean quasi-static v of the parabolic-elliptic system is exempt).
double positivity_margin_of(const State& s, SystemKind system) {
    double min_val = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    auto scan = [&](const Field& f) {
        for (double v : f.values) {
            min_val = std::min(min_val, v);
            max_abs = std::max(max_abs, std::abs(v));
        }
    };
    scan(s.u);
    if (system != SystemKind::KSParabolicElliptic) scan(s.v);
    if (system == SystemKind::MayNowakChemotaxis) scan(s.w);
    return min_val + 1e-12 * (1.0 + max_abs);
}

// Scalar trajectory of the homogeneous system: fixed-step RK4, with the
// initial targets read as point values (unit domain volume). The
// snapshot sink does not apply; the final state is reported as constant
// fields on a token grid.
RunRecord execute_run_ode(const RunSetup& setup,
                          std::chrono::steady_clock::time_point start) {
    RunRecord rec;
    rec.positivity_margin = std::numeric_limits<double>::infinity();

    Termination termination = Termination::ReachedTEnd;
    double t_stop = setup.stepper.t_end;
    std::optional<DiagnosticsRow> prev;
    auto observer = [&](double t, const std::array<double, 3>& y) {
        if (termination != Termination::ReachedTEnd) return;
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !std::isfinite(y[2])) {
            termination = Termination::Diverged;
            t_stop = t;
            return;
        }
        DiagnosticsRow row;
        row.t = t;
        row.dt = setup.stepper.dt_init;
        row.mass_u = std::abs(y[0]);
        row.mass_v = std::abs(y[1]);
        row.mass_w = std::abs(y[2]);
        row.linf_u = std::abs(y[0]);
        row.linf_w = std::abs(y[2]);
        if (prev) {
            const double z = y[0] + y[1];
            const double z_prev = prev->mass_u + prev->mass_v;
            const double decay = std::exp(-(t - prev->t));
            row.mass_ode_residual =
                z - (z_prev * decay + setup.model.kappa * (1.0 - decay));
        } else {
            row.mass_ode_residual = 0.0;
        }
        const double max_abs =
            std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y[2])});
        rec.positivity_margin =
            std::min(rec.positivity_margin,
                     std::min({y[0], y[1], y[2]}) + 1e-12 * (1.0 + max_abs));
        rec.series.push_back(row);
        prev = std::move(row);
    };

    const std::array<double, 3> y0{setup.initial.mass_u, setup.initial.mass_v,
                                   setup.initial.mass_w};
    const auto y_end =
        integrate_ode(y0, setup.model.kappa, &setup.model.conversion,
                      setup.stepper.dt_init, setup.stepper.t_end,
                      setup.sample_interval, observer);
    rec.steps = std::llround(setup.stepper.t_end / setup.stepper.dt_init);
    rec.outcome = classify(rec.series, termination, t_stop, false);

    GridSpec token;
    token.cells_x = 4;
    auto grid = std::make_shared<const Grid>(build_grid(token));
    rec.final_state.t = setup.stepper.t_end;
    rec.final_state.u = Field(grid, y_end[0]);
    rec.final_state.v = Field(grid, y_end[1]);
    rec.final_state.w = Field(grid, y_end[2]);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return rec;
}

}  // namespace

RunRecord execute_run(const RunSetup& setup,
                      const std::function<void(const State&)>& sample_sink) {
    setup.validate();
    const auto start = std::chrono::steady_clock::now();
    if (setup.model.system == SystemKind::MayNowakODE)
        return execute_run_ode(setup, start);

    auto grid = std::make_shared<const Grid>(build_grid(setup.grid));
    State state0 = make_initial_state(grid, setup.initial, setup.model.system);
    const double q = effective_q(setup);

    RunRecord rec;
    rec.positivity_margin = std::numeric_limits<double>::infinity();
    std::optional<DiagnosticsRow> prev;
    auto observer = [&](const State& s, double dt_used) {
        DiagnosticsRow row = compute_row(s, setup.model, q, prev ? &*prev : nullptr);
        row.dt = dt_used;
        rec.positivity_margin = std::min(
            rec.positivity_margin, positivity_margin_of(s, setup.model.system));
        rec.series.push_back(row);
        prev = std::move(row);
        if (sample_sink) sample_sink(s);
    };

    IntegrationResult ir = integrate(std::move(state0), setup.model, setup.stepper,
                                     setup.sample_interval, observer);
    rec.outcome = classify(rec.series, ir.termination, ir.t_stop, ir.dt_collapsed);
    if (const auto alpha = functional_exponent(setup.model.conversion))
        rec.functional = check_functional_dissipation(
            rec.series, *alpha, grid->dimension());
    rec.final_state = std::move(ir.state);
    rec.steps = ir.steps;
    rec.rejections = ir.rejections;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return rec;
}

void SweepSpec::validate() const {
    base.validate();
    if (alpha_values.empty() || kappa_values.empty() || seeds.empty())
        throw std::invalid_argument("sweep: alpha, kappa and seed lists must be nonempty");
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const int na = static_cast<int>(spec.alpha_values.size());
    const int nk = static_cast<int>(spec.kappa_values.size());
    const int ns = static_cast<int>(spec.seeds.size());
    const int total = na * nk * ns;

    SweepResult result;
    result.entries.resize(total);
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < total; ++idx) {
        const int ia = idx / (nk * ns);
        const int ik = (idx / ns) % nk;
        const int is = idx % ns;
        SweepEntry& entry = result.entries[idx];
        entry.alpha = spec.alpha_values[ia];
        entry.kappa = spec.kappa_values[ik];
        entry.seed = spec.seeds[is];

        RunSetup setup = spec.base;
        setup.model.conversion.alpha = entry.alpha;
        setup.model.kappa = entry.kappa;
        setup.initial.seed = entry.seed;
        try {
            RunRecord rec = execute_run(setup);
            entry.outcome = rec.outcome;
            entry.series = std::move(rec.series);
        } catch (const std::exception&) {
            entry.outcome.classification = Classification::Diverged;
            entry.outcome.termination = Termination::Diverged;
        }
    }
    return result;
}

CriticalAlphaResult estimate_critical_alpha(const BlowUpProbe& probe,
                                            double alpha_lo, double alpha_hi,
                                            int iterations) {
    if (!(alpha_lo < alpha_hi))
        throw std::invalid_argument("critical-alpha: need alpha_lo < alpha_hi");
    if (iterations < 1)
        throw std::invalid_argument("critical-alpha: need at least one iteration");

    CriticalAlphaResult res;
    bool lo_blew = probe(alpha_lo);
    bool hi_blew = probe(alpha_hi);
    res.probes.emplace_back(alpha_lo, lo_blew);
    res.probes.emplace_back(alpha_hi, hi_blew);
    if (lo_blew == hi_blew)
        throw BracketInvalid("critical-alpha: bracket endpoints classify identically");

    double lo = alpha_lo, hi = alpha_hi;
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool mid_blew = probe(mid);
        res.probes.emplace_back(mid, mid_blew);
        if (mid_blew == lo_blew)
            lo = mid;
        else
            hi = mid;
    }
    res.lo = lo;
    res.hi = hi;
    res.estimate = 0.5 * (lo + hi);
    return res;
}

CriticalAlphaResult estimate_critical_alpha(const RunSetup& base,
                                            double alpha_lo, double alpha_hi,
                                            int iterations) {
    auto probe = [&base](double alpha) {
        RunSetup setup = base;
        setup.model.conversion.alpha = alpha;
        try {
            const RunRecord rec = execute_run(setup);
            return rec.outcome.classification == Classification::BlowUp ||
                   rec.outcome.classification == Classification::Diverged;
        } catch (const std::exception&) {
            return true;  // a failed run counts as blow-up-side evidence
        }
    };
    return estimate_critical_alpha(probe, alpha_lo, alpha_hi, iterations);
}

namespace {

// Decoupled w equation: u = v = 0, kappa = 0, w0 = cos(pi x) + 1.5 on
// the unit interval, whose solution is
//   w(x, t) = exp(-(1 + pi^2) t) cos(pi x) + 1.5 exp(-t).
double w_equation_error(int cells, double dt, double t_end) {
    GridSpec gs;
    gs.geometry = Geometry::Interval;
    gs.length_x = 1.0;
    gs.cells_x = cells;
    auto grid = std::make_shared<const Grid>(build_grid(gs));

    State s;
    s.u = Field(grid);
    s.v = Field(grid);
    s.w = Field(grid);
    const double pi = std::numbers::pi;
    for (int i = 0; i < grid->nx; ++i)
        s.w[i] = std::cos(pi * grid->cell_x(i)) + 1.5;

    ModelSpec model;
    model.system = SystemKind::MayNowakChemotaxis;
    model.kappa = 0.0;

    StepperConfig cfg;
    cfg.dt_init = dt;
    cfg.dt_max = dt;
    cfg.dt_min = std::min(dt, 1e-12);
    cfg.t_end = t_end;

    const IntegrationResult ir = integrate(std::move(s), model, cfg, t_end, {});
    const double mode = std::exp(-(1.0 + pi * pi) * t_end);
    const double base = 1.5 * std::exp(-t_end);
    double err = 0.0;
    for (int i = 0; i < grid->nx; ++i) {
        const double exact = mode * std::cos(pi * grid->cell_x(i)) + base;
        err = std::max(err, std::abs(ir.state.w[i] - exact));
    }
    return err;
}

double laplacian_eigen_error(int cells) {
    GridSpec gs;
    gs.geometry = Geometry::Interval;
    gs.length_x = 1.0;
    gs.cells_x = cells;
    const Grid grid = build_grid(gs);
    const double pi = std::numbers::pi;
    std::vector<double> f(cells), lap(cells);
    for (int i = 0; i < cells; ++i) f[i] = std::cos(pi * grid.cell_x(i));
    kernels::neumann_laplacian(grid, f, lap);
    double err = 0.0;
    for (int i = 0; i < cells; ++i)
        err = std::max(err, std::abs(lap[i] + pi * pi * f[i]));
    return err;
}

// Homogeneous run of the normalized three-species system; constant
// fields make the step an exact time discretization of the total-mass
// relation, so the final-time defect against the exponential solution
// isolates the temporal error.
double mass_ode_error(double dt) {
    GridSpec gs;
    gs.geometry = Geometry::Interval;
    gs.length_x = 1.0;
    gs.cells_x = 32;
    auto grid = std::make_shared<const Grid>(build_grid(gs));

    InitialSpec init;
    init.family = InitialFamily::Constant;
    init.mass_u = 1.0;
    init.mass_v = 0.3;
    init.mass_w = 0.3;

    ModelSpec model;
    model.system = SystemKind::MayNowakChemotaxis;
    model.kappa = 1.0;

    StepperConfig cfg;
    cfg.dt_init = dt;
    cfg.dt_max = dt;
    cfg.dt_min = std::min(dt, 1e-12);
    cfg.t_end = 2.0;

    State s = make_initial_state(grid, init, model.system);
    const double z0 = field_integral(s.u) + field_integral(s.v);
    const IntegrationResult ir = integrate(std::move(s), model, cfg, cfg.t_end, {});
    const double z_end = field_integral(ir.state.u) + field_integral(ir.state.v);
    const double decay = std::exp(-cfg.t_end);
    const double z_exact =
        z0 * decay + model.kappa * grid->total_volume * (1.0 - decay);
    return std::abs(z_end - z_exact);
}

}  // namespace

std::vector<StudyRow> convergence_study(StudyKind kind, int levels) {
    if (levels < 3)
        throw std::invalid_argument("convergence: need at least 3 levels");

    std::vector<StudyRow> rows;
    for (int level = 0; level < levels; ++level) {
        StudyRow row;
        switch (kind) {
            case StudyKind::LaplacianEigen: {
                const int cells = 32 << level;
                row.h = 1.0 / cells;
                row.error = laplacian_eigen_error(cells);
                break;
            }
            case StudyKind::WEquationTime: {
                const double dt = 4e-3 / (1 << level);
                row.h = dt;
                row.error = w_equation_error(64, dt, 1.0);
                break;
            }
            case StudyKind::WEquationSpace: {
                const int cells = 32 << level;
                const double dx = 1.0 / cells;
                row.h = dx;
                row.error = w_equation_error(cells, 0.25 * dx * dx, 0.1);
                break;
            }
            case StudyKind::MassODE: {
                const double dt = 4e-3 / (1 << level);
                row.h = dt;
                row.error = mass_ode_error(dt);
                break;
            }
        }
        if (!rows.empty() && row.error > 0.0)
            row.observed_order = std::log2(rows.back().error / row.error);
        rows.push_back(row);
    }
    return rows;
}

std::vector<PhaseEntry> ode_phase_study(const std::vector<double>& kappa_values,
                                        const ConversionSpec& conversion,
                                        double t_end) {
    std::vector<PhaseEntry> entries;
    entries.reserve(kappa_values.size());
    for (double kappa : kappa_values) {
        ModelSpec model;
        model.system = SystemKind::MayNowakODE;
        model.kappa = kappa;
        model.conversion = conversion;
        const auto equilibria = homogeneous_equilibria(model);

        PhaseEntry entry;
        entry.kappa = kappa;
        const std::array<double, 3> y0{std::max(kappa, 0.1) * 1.2, 0.1, 0.1};
        entry.limit = integrate_ode(y0, kappa, &conversion, 0.01, t_end, 0.0, {});

        const auto rhs = rhs_may_nowak_ode(entry.limit, kappa, conversion);
        entry.converged = std::max({std::abs(rhs[0]), std::abs(rhs[1]),
                                    std::abs(rhs[2])}) < 1e-6;
        double best = 1e-4;
        for (size_t k = 0; k < equilibria.size(); ++k) {
            double dist = 0.0;
            for (int c = 0; c < 3; ++c)
                dist = std::max(dist, std::abs(entry.limit[c] - equilibria[k][c]));
            if (dist < best) {
                best = dist;
                entry.matched_equilibrium = static_cast<int>(k);
            }
        }
        entries.push_back(entry);
    }
    return entries;
}

}  // namespace chemovir
