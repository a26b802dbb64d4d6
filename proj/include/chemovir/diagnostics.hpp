#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemovir/models.hpp"
#include "chemovir/stepper.hpp"

namespace chemovir {

/// One sampled row of the monitored quantities. Fields that do not apply
/// to the running system (w norms for two-species systems, the energy
/// functional without a usable exponent, the mass relation away from the
/// normalized coefficients) stay empty and serialize as empty CSV cells.
struct DiagnosticsRow {
    double t = 0.0;
    double dt = 0.0;
    double mass_u = 0.0;
    double mass_v = 0.0;
    std::optional<double> mass_w;
    double linf_u = 0.0;
    std::optional<double> linf_w;
    std::optional<double> grad_v_lq;
    std::optional<double> functional_E;
    std::optional<double> mass_ode_residual;
};

// Fixed CSV column order for diagnostics series.
inline constexpr const char* kDiagnosticsHeader =
    "t,dt,mass_u,mass_v,mass_w,linf_u,linf_w,grad_v_lq,functional_E,"
    "mass_ode_residual";

struct TooFewSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exponent used for the u-part of the energy functional: alpha for the
// power-type conversions, 1 for Identity, absent for Custom tables.
std::optional<double> functional_exponent(const ConversionSpec& conversion);

/// Computes every monitored quantity by quadrature: masses (L1), sup
/// norms, the gradient monitor at exponent q, the energy functional
/// (1/alpha) * integral(u^alpha) + 1/2 * integral(|grad v|^2) when the
/// exponent is positive, and — for the normalized three-species system —
/// the step residual of the total-mass relation
///   z(t) = z(prev) e^{-(t - t_prev)} + kappa |domain| (1 - e^{-(t - t_prev)})
/// with z = integral(u) + integral(v). The caller fills dt. Throws for
/// q <= 1.
DiagnosticsRow compute_row(const State& state, const ModelSpec& spec, double q,
                           const DiagnosticsRow* prev);

enum class Classification { Bounded, Growing, BlowUp, Inconclusive, Diverged };

std::string to_string(Classification c);
std::string to_string(Termination t);

struct RunOutcome {
    Classification classification = Classification::Inconclusive;
    Termination termination = Termination::ReachedTEnd;
    double t_detect = 0.0;  // meaningful for BlowUp / Diverged
    bool dt_collapsed = false;
    double peak_linf_u = 0.0;
    double peak_grad_v_lq = 0.0;
    double peak_linf_w = 0.0;
    // Worst late/early max ratio among the plateau monitors (1 = flat).
    double plateau_ratio = 0.0;
};

/// Applies the plateau criterion: the run is Bounded when, for each
/// monitored norm (linf_u, grad_v_lq, linf_w where present), the max over
/// the late half of the time range stays within 5% of the max over the
/// early half; Growing when linf_u at least doubles instead;
/// Inconclusive otherwise. Early termination passes through as
/// BlowUp/Diverged before any row-count requirement; the plateau
/// analysis itself needs >= 10 rows (TooFewSamples).
RunOutcome classify(const std::vector<DiagnosticsRow>& series,
                    Termination termination, double t_stop, bool dt_collapsed);

struct FunctionalReport {
    bool applicable = false;  // one-dimensional run with exponent in (1, 2)
    double sup_E = 0.0;
    bool plateau = false;
    // Least-squares fit of dE/dt against E over the late half; a
    // dissipative trend shows as a negative slope. Reported, not asserted.
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
};

FunctionalReport check_functional_dissipation(
    const std::vector<DiagnosticsRow>& series, double alpha, int dimension);

}  // namespace chemovir
