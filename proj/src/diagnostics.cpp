#include "chemovir/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "chemovir/kernels.hpp"

namespace chemovir {

std::optional<double> functional_exponent(const ConversionSpec& conversion) {
    switch (conversion.kind) {
        case ConversionKind::Saturated:
        case ConversionKind::PowerLaw:
            return conversion.alpha;
        case ConversionKind::Identity:
            return 1.0;
        case ConversionKind::Custom:
            return std::nullopt;
    }
    return std::nullopt;
}

DiagnosticsRow compute_row(const State& state, const ModelSpec& spec, double q,
                           const DiagnosticsRow* prev) {
    if (!(q > 1.0)) throw std::invalid_argument("diagnostics: q must exceed 1");
    const Grid& g = *state.u.grid;

    DiagnosticsRow row;
    row.t = state.t;
    row.mass_u = field_l1(state.u);
    row.mass_v = field_l1(state.v);
    row.linf_u = field_linf(state.u);
    row.grad_v_lq = kernels::grad_norm_lq(g, state.v.span(), q);

    const bool three_species = spec.system == SystemKind::MayNowakChemotaxis;
    if (three_species) {
        row.mass_w = field_l1(state.w);
        row.linf_w = field_linf(state.w);
    }

    if (const auto alpha = functional_exponent(spec.conversion);
        alpha && *alpha > 0.0) {
        double u_part = 0.0;
        for (int i = 0; i < g.size(); ++i)
            u_part += std::pow(std::max(state.u[i], 0.0), *alpha) * g.cell_volume[i];
        const double grad2 = kernels::grad_norm_lq(g, state.v.span(), 2.0);
        row.functional_E = u_part / *alpha + 0.5 * grad2 * grad2;
    }

    if (three_species && spec.unit_rates()) {
        if (prev == nullptr) {
            row.mass_ode_residual = 0.0;
        } else {
            const double z = field_integral(state.u) + field_integral(state.v);
            const double z_prev = prev->mass_u + prev->mass_v;
            const double decay = std::exp(-(row.t - prev->t));
            row.mass_ode_residual =
                z - (z_prev * decay + spec.kappa * g.total_volume * (1.0 - decay));
        }
    }
    return row;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::Bounded: return "Bounded";
        case Classification::Growing: return "Growing";
        case Classification::BlowUp: return "BlowUp";
        case Classification::Inconclusive: return "Inconclusive";
        case Classification::Diverged: return "Diverged";
    }
    return "Inconclusive";
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::ReachedTEnd: return "ReachedTEnd";
        case Termination::BlowUpSuspected: return "BlowUpSuspected";
        case Termination::Diverged: return "Diverged";
    }
    return "ReachedTEnd";
}

namespace {

struct HalfMaxima {
    double early = 0.0;
    double late = 0.0;
    bool any = false;
};

template <typename Get>
HalfMaxima half_maxima(const std::vector<DiagnosticsRow>& series, double t_mid,
                       Get get) {
    HalfMaxima h;
    for (const auto& row : series) {
        const auto value = get(row);
        if (!value) continue;
        h.any = true;
        double& slot = row.t <= t_mid ? h.early : h.late;
        slot = std::max(slot, *value);
    }
    return h;
}

// late/early max ratio; 1 when both halves are zero.
double ratio(const HalfMaxima& h) {
    if (h.early == 0.0) return h.late == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return h.late / h.early;
}

}  // namespace

RunOutcome classify(const std::vector<DiagnosticsRow>& series,
                    Termination termination, double t_stop, bool dt_collapsed) {
    RunOutcome out;
    out.termination = termination;
    out.dt_collapsed = dt_collapsed;
    out.t_detect = t_stop;
    for (const auto& row : series) {
        out.peak_linf_u = std::max(out.peak_linf_u, row.linf_u);
        if (row.grad_v_lq) out.peak_grad_v_lq = std::max(out.peak_grad_v_lq, *row.grad_v_lq);
        if (row.linf_w) out.peak_linf_w = std::max(out.peak_linf_w, *row.linf_w);
    }

    if (termination == Termination::BlowUpSuspected) {
        out.classification = Classification::BlowUp;
        return out;
    }
    if (termination == Termination::Diverged) {
        out.classification = Classification::Diverged;
        return out;
    }

    if (series.size() < 10)
        throw TooFewSamples("classify: need at least 10 diagnostics rows");

    const double t_mid = 0.5 * (series.front().t + series.back().t);
    const auto u_half = half_maxima(series, t_mid, [](const DiagnosticsRow& r) {
        return std::optional<double>(r.linf_u);
    });
    const auto g_half = half_maxima(series, t_mid,
                                    [](const DiagnosticsRow& r) { return r.grad_v_lq; });
    const auto w_half =
        half_maxima(series, t_mid, [](const DiagnosticsRow& r) { return r.linf_w; });

    constexpr double delta = 0.05;
    double worst = ratio(u_half);
    bool plateau = ratio(u_half) <= 1.0 + delta;
    if (g_half.any) {
        plateau = plateau && ratio(g_half) <= 1.0 + delta;
        worst = std::max(worst, ratio(g_half));
    }
    if (w_half.any) {
        plateau = plateau && ratio(w_half) <= 1.0 + delta;
        worst = std::max(worst, ratio(w_half));
    }
    out.plateau_ratio = worst;

    if (plateau)
        out.classification = Classification::Bounded;
    else if (ratio(u_half) > 2.0)
        out.classification = Classification::Growing;
    else
        out.classification = Classification::Inconclusive;
    return out;
}

FunctionalReport check_functional_dissipation(
    const std::vector<DiagnosticsRow>& series, double alpha, int dimension) {
    FunctionalReport rep;
    rep.applicable = dimension == 1 && alpha > 1.0 && alpha < 2.0;
    if (!rep.applicable) return rep;

    std::vector<std::pair<double, double>> points;  // (t, E)
    for (const auto& row : series)
        if (row.functional_E) points.emplace_back(row.t, *row.functional_E);
    if (points.size() < 10) {
        rep.applicable = false;
        return rep;
    }

    double early = 0.0, late = 0.0;
    const double t_mid = 0.5 * (points.front().first + points.back().first);
    for (const auto& [t, e] : points) {
        rep.sup_E = std::max(rep.sup_E, e);
        double& slot = t <= t_mid ? early : late;
        slot = std::max(slot, e);
    }
    rep.plateau = early == 0.0 ? late == 0.0 : late <= 1.05 * early;

    // Fit dE/dt = slope * E + intercept on the late half.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t k = 0; k + 1 < points.size(); ++k) {
        const auto [t0, e0] = points[k];
        const auto [t1, e1] = points[k + 1];
        if (t0 <= t_mid || t1 <= t0) continue;
        const double x = e0;
        const double y = (e1 - e0) / (t1 - t0);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        const double denom = m * sxx - sx * sx;
        if (denom != 0.0) {
            rep.fit_slope = (m * sxy - sx * sy) / denom;
            rep.fit_intercept = (sy - rep.fit_slope * sx) / m;
        }
    }
    return rep;
}

}  // namespace chemovir
