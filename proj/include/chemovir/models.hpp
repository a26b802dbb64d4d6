#pragma once

#include <array>
#include <span>
#include <vector>

#include "chemovir/grid.hpp"

namespace chemovir {

/// Conversion-rate profiles f for the infection term f(u)w. All satisfy
/// f(0) = 0 and f >= 0; Saturated and PowerLaw obey the growth bound
/// f(s) <= growth_constant * s^alpha for s >= 1.
///   Saturated:  s / (1 + s^(1-alpha))   (meant for alpha <= 1)
///   PowerLaw:   s^alpha                 (meant for alpha > 0; f(0) := 0)
///   Identity:   s
///   Custom:     piecewise-linear table starting at (0, 0); constant
///               extension beyond the last breakpoint.
enum class ConversionKind { Saturated, PowerLaw, Identity, Custom };

struct ConversionSpec {
    ConversionKind kind = ConversionKind::Identity;
    double alpha = 1.0;
    double growth_constant = 1.0;
    std::vector<double> table_s, table_f;  // Custom only

    void validate() const;
};

double eval_f(const ConversionSpec& spec, double s);

// Vectorized f over a span; inputs below zero are treated as zero (the
// stepper's rejection policy bounds how negative an accepted state can be).
void apply_conversion(const ConversionSpec& spec, std::span<const double> s,
                      std::span<double> out);

enum class SystemKind {
    MayNowakChemotaxis,    // three species with chemotaxis of u toward v
    MayNowakODE,           // spatially homogeneous three-species system
    KSParabolicParabolic,  // two-species comparison system, v parabolic
    KSParabolicElliptic    // two-species comparison system, v quasi-static
};

/// All model coefficients. The normalized three-species system is the
/// point where every rate equals one; that configuration makes the exact
/// total-mass relation for u+v available as a diagnostic.
struct ModelSpec {
    SystemKind system = SystemKind::MayNowakChemotaxis;
    double diff_u = 1.0, diff_v = 1.0, diff_w = 1.0;
    double chi = 1.0;
    double decay_u = 1.0, decay_v = 1.0, decay_w = 1.0;
    double production = 1.0;  // rate of w production from v
    double kappa = 0.0;       // replenishment of u
    ConversionSpec conversion;

    void validate() const;
    // True when every rate is one, i.e. the normalized system.
    bool unit_rates() const;
};

/// Time plus the per-species fields. w stays empty for the two-species
/// systems; v is recomputed from u each step for KSParabolicElliptic.
struct State {
    double t = 0.0;
    Field u, v, w;
};

struct FieldTriple {
    Field du, dv, dw;
};

struct FieldPair {
    Field du, dv;
};

struct EllipticRhs {
    Field du;
    Field v;  // the quasi-static signal recovered from u
};

// du = diff_u*Lap(u) - chi*div(u grad v) - decay_u*u - f(u)*w + kappa
// dv = diff_v*Lap(v) - decay_v*v + f(u)*w
// dw = diff_w*Lap(w) - decay_w*w + production*v
FieldTriple rhs_may_nowak_chemotaxis(const State& state, const ModelSpec& spec);

// Normalized homogeneous system: (-u - u*w + kappa, -v + u*w, -w + v).
std::array<double, 3> rhs_may_nowak_ode(const std::array<double, 3>& s,
                                        double kappa);
// Generalized homogeneous system with a conversion profile:
// (-u - f(u)*w + kappa, -v + f(u)*w, -w + v).
std::array<double, 3> rhs_may_nowak_ode(const std::array<double, 3>& s,
                                        double kappa,
                                        const ConversionSpec& conversion);

// du = diff_u*Lap(u) - chi*div(u grad v)
// dv = diff_v*Lap(v) - decay_v*v + f(u)
FieldPair rhs_ks_parabolic_parabolic(const State& state, const ModelSpec& spec);

// v solves Lap(v) = mean(f(u)) - f(u) with Neumann conditions and
// zero volume mean; du = diff_u*Lap(u) - chi*div(u grad v).
EllipticRhs rhs_ks_parabolic_elliptic(const Field& u, const ModelSpec& spec);

/// Spatially constant steady states of the three-species system. The
/// uninfected state (kappa/decay_u, 0, 0) always exists; infected states
/// solve f(u*)*production = decay_v*decay_w with v* = (kappa -
/// decay_u*u*)/decay_v and w* = production*v*/decay_w, found by bisection
/// on u* in (1e-12, kappa/decay_u). Uninfected state first.
std::vector<std::array<double, 3>> homogeneous_equilibria(const ModelSpec& spec);

}  // namespace chemovir
