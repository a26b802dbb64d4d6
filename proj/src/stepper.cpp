#include "chemovir/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemovir/kernels.hpp"

namespace chemovir {

void StepperConfig::validate() const {
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
        throw std::invalid_argument("stepper: need 0 < dt_min <= dt_init <= dt_max");
    if (!(t_end > 0.0)) throw std::invalid_argument("stepper: t_end must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw std::invalid_argument("stepper: cfl_safety must lie in (0, 1]");
    if (!(blowup_threshold > 1.0))
        throw std::invalid_argument("stepper: blowup_threshold must exceed 1");
}

namespace {

struct Workspace {
    Field fu, chemo, eu, ev, ew, nu, nv, nw, poisson_rhs;
    explicit Workspace(const std::shared_ptr<const Grid>& g)
        : fu(g), chemo(g), eu(g), ev(g), ew(g), nu(g), nv(g), nw(g),
          poisson_rhs(g) {}
};

double min_spacing(const Grid& g) {
    return g.spec.geometry == Geometry::Rectangle ? std::min(g.dx, g.dy) : g.dx;
}

double cfl_limit(const State& s, const ModelSpec& m, const StepperConfig& cfg) {
    const double speed = m.chi * kernels::max_face_gradient(*s.u.grid, s.v.span());
    if (speed <= 0.0) return std::numeric_limits<double>::infinity();
    return cfg.cfl_safety * min_spacing(*s.u.grid) / speed;
}

// Quasi-static signal of the parabolic-elliptic system: Lap v =
// mean(f(u)) - f(u), zero volume mean.
void refresh_elliptic_signal(State& s, const ModelSpec& m, Workspace& ws) {
    const Grid& g = *s.u.grid;
    const int n = g.size();
    apply_conversion(m.conversion, s.u.span(), ws.fu.span());
    const double mean_fu = field_integral(ws.fu) / g.total_volume;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) ws.poisson_rhs[i] = mean_fu - ws.fu[i];
    if (s.v.empty()) s.v = Field(s.u.grid);
    kernels::solve_poisson_neumann(g, ws.poisson_rhs.span(), s.v.span());
}

// Explicit transport/reaction stage followed by the implicit
// diffusion-decay solves; candidate lands in ws.nu / ws.nv / ws.nw.
void build_candidate(const State& s, const ModelSpec& m, double dt, Workspace& ws) {
    const Grid& g = *s.u.grid;
    const int n = g.size();
    switch (m.system) {
        case SystemKind::MayNowakChemotaxis: {
            apply_conversion(m.conversion, s.u.span(), ws.fu.span());
            kernels::chemotactic_divergence(g, s.u.span(), s.v.span(), ws.chemo.span());
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) {
                const double infect = ws.fu[i] * s.w[i];
                ws.eu[i] = s.u[i] + dt * (m.chi * ws.chemo[i] - infect + m.kappa);
                ws.ev[i] = s.v[i] + dt * infect;
                ws.ew[i] = s.w[i] + dt * m.production * s.v[i];
            }
            kernels::solve_implicit_diffusion(g, ws.eu.span(), m.diff_u * dt,
                                              m.decay_u * dt, ws.nu.span());
            kernels::solve_implicit_diffusion(g, ws.ev.span(), m.diff_v * dt,
                                              m.decay_v * dt, ws.nv.span());
            kernels::solve_implicit_diffusion(g, ws.ew.span(), m.diff_w * dt,
                                              m.decay_w * dt, ws.nw.span());
            break;
        }
        case SystemKind::KSParabolicParabolic: {
            apply_conversion(m.conversion, s.u.span(), ws.fu.span());
            kernels::chemotactic_divergence(g, s.u.span(), s.v.span(), ws.chemo.span());
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i) {
                ws.eu[i] = s.u[i] + dt * m.chi * ws.chemo[i];
                ws.ev[i] = s.v[i] + dt * ws.fu[i];
            }
            kernels::solve_implicit_diffusion(g, ws.eu.span(), m.diff_u * dt, 0.0,
                                              ws.nu.span());
            kernels::solve_implicit_diffusion(g, ws.ev.span(), m.diff_v * dt,
                                              m.decay_v * dt, ws.nv.span());
            break;
        }
        case SystemKind::KSParabolicElliptic: {
            // s.v holds the quasi-static signal refreshed from the current u.
            kernels::chemotactic_divergence(g, s.u.span(), s.v.span(), ws.chemo.span());
#pragma omp parallel for schedule(static)
            for (int i = 0; i < n; ++i)
                ws.eu[i] = s.u[i] + dt * m.chi * ws.chemo[i];
            kernels::solve_implicit_diffusion(g, ws.eu.span(), m.diff_u * dt, 0.0,
                                              ws.nu.span());
            break;
        }
        case SystemKind::MayNowakODE:
            throw std::invalid_argument("stepper: homogeneous system has no field step");
    }
}

struct FieldCheck {
    bool finite = true;
    double max_abs = 0.0;
    double min_val = std::numeric_limits<double>::infinity();
};

void inspect(const Field& f, FieldCheck& c) {
    for (double v : f.values) {
        if (!std::isfinite(v)) {
            c.finite = false;
            return;
        }
        c.max_abs = std::max(c.max_abs, std::abs(v));
        c.min_val = std::min(c.min_val, v);
    }
}

enum class Verdict { Accept, Reject, NonFinite };

Verdict judge_candidate(const ModelSpec& m, const Workspace& ws) {
    FieldCheck c;
    inspect(ws.nu, c);
    if (m.system != SystemKind::KSParabolicElliptic) inspect(ws.nv, c);
    if (m.system == SystemKind::MayNowakChemotaxis) inspect(ws.nw, c);
    if (!c.finite) return Verdict::NonFinite;
    const double floor = -1e-12 * (1.0 + c.max_abs);
    return c.min_val < floor ? Verdict::Reject : Verdict::Accept;
}

// Shrinks dt by halving until a candidate passes the positivity and
// finiteness checks. Throws StepTooSmall / NonFiniteState.
double attempt_step(const State& s, const ModelSpec& m, const StepperConfig& cfg,
                    double dt_start, Workspace& ws, long long& rejections) {
    double dt = dt_start;
    for (;;) {
        build_candidate(s, m, dt, ws);
        const Verdict verdict = judge_candidate(m, ws);
        if (verdict == Verdict::Accept) return dt;
        ++rejections;
        dt *= 0.5;
        if (dt < cfg.dt_min) {
            // Out of retries: report what kept failing at the floor.
            if (verdict == Verdict::NonFinite) throw NonFiniteState(s.t);
            throw StepTooSmall(s.t);
        }
    }
}

void commit_candidate(State& s, const ModelSpec& m, Workspace& ws, double dt) {
    s.u.values.swap(ws.nu.values);
    if (m.system != SystemKind::KSParabolicElliptic) s.v.values.swap(ws.nv.values);
    if (m.system == SystemKind::MayNowakChemotaxis) s.w.values.swap(ws.nw.values);
    s.t += dt;
}

}  // namespace

StepResult step_imex(const State& state, const ModelSpec& spec,
                     const StepperConfig& cfg, double prev_dt) {
    spec.validate();
    cfg.validate();
    State s = state;
    Workspace ws(s.u.grid);
    if (spec.system == SystemKind::KSParabolicElliptic)
        refresh_elliptic_signal(s, spec, ws);

    const double dt0 =
        std::min({cfg.dt_max, prev_dt * 1.2, cfl_limit(s, spec, cfg)});
    if (dt0 < cfg.dt_min) throw StepTooSmall(s.t);

    long long rejections = 0;
    const double dt = attempt_step(s, spec, cfg, dt0, ws, rejections);
    commit_candidate(s, spec, ws, dt);
    return {std::move(s), dt, static_cast<int>(rejections)};
}

IntegrationResult integrate(State state, const ModelSpec& spec,
                            const StepperConfig& cfg, double sample_interval,
                            const StateObserver& observer) {
    spec.validate();
    cfg.validate();
    if (spec.system == SystemKind::MayNowakODE)
        throw std::invalid_argument("integrate: use integrate_ode for the homogeneous system");
    if (cfg.scheme != Scheme::IMEXEuler)
        throw std::invalid_argument("integrate: field systems require the IMEX scheme");

    Workspace ws(state.u.grid);
    if (spec.system == SystemKind::KSParabolicElliptic)
        refresh_elliptic_signal(state, spec, ws);

    const double u_limit = cfg.blowup_threshold * std::max(1.0, field_linf(state.u));
    const double t_tol = cfg.t_end * 1e-12;

    IntegrationResult res;
    double prev_dt = cfg.dt_init;
    double next_sample = sample_interval > 0.0 ? sample_interval : 0.0;
    double last_observed = -1.0;

    auto fire = [&](const State& s, double dt_used) {
        if (observer && s.t != last_observed) {
            observer(s, dt_used);
            last_observed = s.t;
        }
    };
    fire(state, 0.0);

    for (;;) {
        const double remaining = cfg.t_end - state.t;
        if (remaining <= t_tol) {
            res.termination = Termination::ReachedTEnd;
            break;
        }
        double dt_used;
        try {
            const double dt0 =
                std::min({cfg.dt_max, prev_dt * 1.2, cfl_limit(state, spec, cfg)});
            if (dt0 < cfg.dt_min) throw StepTooSmall(state.t);
            dt_used = attempt_step(state, spec, cfg, std::min(dt0, remaining), ws,
                                   res.rejections);
        } catch (const StepTooSmall&) {
            res.termination = Termination::BlowUpSuspected;
            res.dt_collapsed = true;
            break;
        } catch (const NonFiniteState&) {
            res.termination = Termination::Diverged;
            break;
        }
        commit_candidate(state, spec, ws, dt_used);
        prev_dt = dt_used;
        ++res.steps;
        if (spec.system == SystemKind::KSParabolicElliptic)
            refresh_elliptic_signal(state, spec, ws);

        if (field_linf(state.u) > u_limit) {
            fire(state, dt_used);
            res.termination = Termination::BlowUpSuspected;
            break;
        }
        if (sample_interval <= 0.0) {
            fire(state, dt_used);
        } else if (state.t >= next_sample - t_tol) {
            fire(state, dt_used);
            while (next_sample <= state.t + t_tol) next_sample += sample_interval;
        }
    }

    res.t_stop = state.t;
    fire(state, prev_dt);
    res.state = std::move(state);
    return res;
}

std::array<double, 3> integrate_ode(std::array<double, 3> y0, double kappa,
                                    const ConversionSpec* conversion, double dt,
                                    double t_end, double sample_interval,
                                    const OdeObserver& observer) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("integrate_ode: dt and t_end must be positive");

    auto rhs = [&](const std::array<double, 3>& y) {
        return conversion ? rhs_may_nowak_ode(y, kappa, *conversion)
                          : rhs_may_nowak_ode(y, kappa);
    };
    auto shifted = [](const std::array<double, 3>& y, double a,
                      const std::array<double, 3>& k) {
        return std::array<double, 3>{y[0] + a * k[0], y[1] + a * k[1],
                                     y[2] + a * k[2]};
    };

    double t = 0.0;
    const double t_tol = t_end * 1e-12;
    double next_sample = sample_interval > 0.0 ? sample_interval : 0.0;
    if (observer) observer(0.0, y0);

    while (t_end - t > t_tol) {
        const double h = std::min(dt, t_end - t);
        const auto k1 = rhs(y0);
        const auto k2 = rhs(shifted(y0, 0.5 * h, k1));
        const auto k3 = rhs(shifted(y0, 0.5 * h, k2));
        const auto k4 = rhs(shifted(y0, h, k3));
        for (int c = 0; c < 3; ++c)
            y0[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        t += h;
        if (observer) {
            if (sample_interval <= 0.0) {
                observer(t, y0);
            } else if (t >= next_sample - t_tol || t_end - t <= t_tol) {
                observer(t, y0);
                while (next_sample <= t + t_tol) next_sample += sample_interval;
            }
        }
    }
    return y0;
}

}  // namespace chemovir
