#include "chemovir/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chemovir/kernels.hpp"

namespace chemovir {

void ConversionSpec::validate() const {
    if (growth_constant <= 0.0)
        throw std::invalid_argument("conversion: growth_constant must be positive");
    switch (kind) {
        case ConversionKind::Saturated:
        case ConversionKind::PowerLaw:
            if (!std::isfinite(alpha))
                throw std::invalid_argument("conversion: alpha must be finite");
            break;
        case ConversionKind::Identity:
            break;
        case ConversionKind::Custom: {
            if (table_s.size() != table_f.size() || table_s.size() < 2)
                throw std::invalid_argument("conversion: table needs >= 2 matched points");
            if (table_s.front() != 0.0 || table_f.front() != 0.0)
                throw std::invalid_argument("conversion: table must start at (0, 0)");
            if (!std::is_sorted(table_s.begin(), table_s.end()))
                throw std::invalid_argument("conversion: table abscissae must be sorted");
            for (double f : table_f)
                if (f < 0.0)
                    throw std::invalid_argument("conversion: table values must be >= 0");
            break;
        }
    }
}

double eval_f(const ConversionSpec& spec, double s) {
    if (s < 0.0) throw std::invalid_argument("eval_f: negative argument");
    if (s == 0.0) return 0.0;
    switch (spec.kind) {
        case ConversionKind::Saturated:
            return s / (1.0 + std::pow(s, 1.0 - spec.alpha));
        case ConversionKind::PowerLaw:
            return std::pow(s, spec.alpha);
        case ConversionKind::Identity:
            return s;
        case ConversionKind::Custom: {
            const auto& xs = spec.table_s;
            const auto& ys = spec.table_f;
            if (s >= xs.back()) return ys.back();
            const auto it = std::upper_bound(xs.begin(), xs.end(), s);
            const auto hi = static_cast<size_t>(it - xs.begin());
            const double x0 = xs[hi - 1], x1 = xs[hi];
            const double y0 = ys[hi - 1], y1 = ys[hi];
            const double t = x1 > x0 ? (s - x0) / (x1 - x0) : 0.0;
            return y0 + t * (y1 - y0);
        }
    }
    return 0.0;
}

void apply_conversion(const ConversionSpec& spec, std::span<const double> s,
                      std::span<double> out) {
    const int n = static_cast<int>(s.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[i] = eval_f(spec, std::max(s[i], 0.0));
}

void ModelSpec::validate() const {
    if (kappa < 0.0) throw std::invalid_argument("model: kappa must be >= 0");
    if (diff_u <= 0.0 || diff_v <= 0.0 || diff_w <= 0.0)
        throw std::invalid_argument("model: diffusivities must be positive");
    if (decay_u <= 0.0 || decay_v <= 0.0 || decay_w <= 0.0)
        throw std::invalid_argument("model: decay rates must be positive");
    if (production <= 0.0)
        throw std::invalid_argument("model: production rate must be positive");
    if (chi <= 0.0)
        throw std::invalid_argument("model: chi must be positive");
    conversion.validate();
}

bool ModelSpec::unit_rates() const {
    return diff_u == 1.0 && diff_v == 1.0 && diff_w == 1.0 && chi == 1.0 &&
           decay_u == 1.0 && decay_v == 1.0 && decay_w == 1.0 && production == 1.0;
}

FieldTriple rhs_may_nowak_chemotaxis(const State& state, const ModelSpec& spec) {
    const Grid& g = *state.u.grid;
    const int n = g.size();
    FieldTriple out{Field(state.u.grid), Field(state.u.grid), Field(state.u.grid)};
    Field lap(state.u.grid), chemo(state.u.grid), fu(state.u.grid);

    apply_conversion(spec.conversion, state.u.span(), fu.span());
    kernels::chemotactic_divergence(g, state.u.span(), state.v.span(), chemo.span());

    kernels::neumann_laplacian(g, state.u.span(), lap.span());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        out.du[i] = spec.diff_u * lap[i] + spec.chi * chemo[i] -
                    spec.decay_u * state.u[i] - fu[i] * state.w[i] + spec.kappa;

    kernels::neumann_laplacian(g, state.v.span(), lap.span());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        out.dv[i] = spec.diff_v * lap[i] - spec.decay_v * state.v[i] + fu[i] * state.w[i];

    kernels::neumann_laplacian(g, state.w.span(), lap.span());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        out.dw[i] = spec.diff_w * lap[i] - spec.decay_w * state.w[i] +
                    spec.production * state.v[i];

    return out;
}

std::array<double, 3> rhs_may_nowak_ode(const std::array<double, 3>& s,
                                        double kappa) {
    const auto [u, v, w] = s;
    return {-u - u * w + kappa, -v + u * w, -w + v};
}

std::array<double, 3> rhs_may_nowak_ode(const std::array<double, 3>& s,
                                        double kappa,
                                        const ConversionSpec& conversion) {
    const auto [u, v, w] = s;
    const double fu = eval_f(conversion, std::max(u, 0.0));
    return {-u - fu * w + kappa, -v + fu * w, -w + v};
}

FieldPair rhs_ks_parabolic_parabolic(const State& state, const ModelSpec& spec) {
    const Grid& g = *state.u.grid;
    const int n = g.size();
    FieldPair out{Field(state.u.grid), Field(state.u.grid)};
    Field lap(state.u.grid), chemo(state.u.grid), fu(state.u.grid);

    apply_conversion(spec.conversion, state.u.span(), fu.span());
    kernels::chemotactic_divergence(g, state.u.span(), state.v.span(), chemo.span());

    kernels::neumann_laplacian(g, state.u.span(), lap.span());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        out.du[i] = spec.diff_u * lap[i] + spec.chi * chemo[i];

    kernels::neumann_laplacian(g, state.v.span(), lap.span());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        out.dv[i] = spec.diff_v * lap[i] - spec.decay_v * state.v[i] + fu[i];

    return out;
}

EllipticRhs rhs_ks_parabolic_elliptic(const Field& u, const ModelSpec& spec) {
    const Grid& g = *u.grid;
    const int n = g.size();
    EllipticRhs out{Field(u.grid), Field(u.grid)};
    Field fu(u.grid), rhs(u.grid), lap(u.grid), chemo(u.grid);

    apply_conversion(spec.conversion, u.span(), fu.span());
    const double mean_fu = field_integral(fu) / g.total_volume;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) rhs[i] = mean_fu - fu[i];

    kernels::solve_poisson_neumann(g, rhs.span(), out.v.span());

    kernels::neumann_laplacian(g, u.span(), lap.span());
    kernels::chemotactic_divergence(g, u.span(), out.v.span(), chemo.span());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        out.du[i] = spec.diff_u * lap[i] + spec.chi * chemo[i];

    return out;
}

std::vector<std::array<double, 3>> homogeneous_equilibria(const ModelSpec& spec) {
    std::vector<std::array<double, 3>> states;
    states.push_back({spec.kappa / spec.decay_u, 0.0, 0.0});

    // Infected states: f(u*) * production = decay_v * decay_w with
    // v* = (kappa - decay_u*u*) / decay_v positive, so u* < kappa/decay_u.
    const double target = spec.decay_v * spec.decay_w / spec.production;
    auto residual = [&](double u) { return eval_f(spec.conversion, u) - target; };

    double lo = 1e-12;
    double hi = spec.kappa / spec.decay_u;
    if (hi <= lo) return states;
    double rlo = residual(lo);
    double rhi = residual(hi);
    if (rlo * rhi > 0.0) return states;  // no sign change: no infected state

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = residual(mid);
        if ((rm < 0.0) == (rlo < 0.0)) {
            lo = mid;
            rlo = rm;
        } else {
            hi = mid;
            rhi = rm;
        }
    }
    const double u_star = 0.5 * (lo + hi);
    const double v_star = (spec.kappa - spec.decay_u * u_star) / spec.decay_v;
    const double w_star = spec.production * v_star / spec.decay_w;
    if (v_star > 0.0) states.push_back({u_star, v_star, w_star});
    return states;
}

}  // namespace chemovir
