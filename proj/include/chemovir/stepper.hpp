#pragma once

#include <array>
#include <functional>
#include <stdexcept>

#include "chemovir/models.hpp"

namespace chemovir {

enum class Scheme { IMEXEuler, ExplicitRK4 };

struct StepperConfig {
    double dt_init = 1e-3;
    double dt_min = 1e-10;
    double dt_max = 0.1;
    double cfl_safety = 0.4;  // fraction of dx / max transport speed
    double t_end = 50.0;
    Scheme scheme = Scheme::IMEXEuler;
    double blowup_threshold = 1e6;  // multiples of max(1, |u0|_inf)

    void validate() const;
};

// Raised when step control would push dt below dt_min; downstream this is
// read as blow-up evidence (the transport speed has run away).
struct StepTooSmall : std::runtime_error {
    double t;
    explicit StepTooSmall(double time)
        : std::runtime_error("step size collapsed below dt_min"), t(time) {}
};

// Raised when NaN/Inf survives at the smallest admissible step.
struct NonFiniteState : std::runtime_error {
    double t;
    explicit NonFiniteState(double time)
        : std::runtime_error("non-finite state"), t(time) {}
};

struct StepResult {
    State state;
    double dt_used = 0.0;
    int rejected_count = 0;
};

/// One IMEX Euler step: chemotaxis transport and the reaction coupling
/// (f(u)w, kappa, production*v) explicit, diffusion and linear decay
/// implicit via tridiagonal solves (dimension-split on rectangles).
/// Candidate dt = min(dt_max, prev_dt*1.2, cfl_safety*h/max|chi grad v|);
/// a step producing any component below -1e-12*(1+|state|_inf) is
/// rejected and retried with dt/2. Throws StepTooSmall / NonFiniteState.
StepResult step_imex(const State& state, const ModelSpec& spec,
                     const StepperConfig& cfg, double prev_dt);

enum class Termination { ReachedTEnd, BlowUpSuspected, Diverged };

struct IntegrationResult {
    State state;
    Termination termination = Termination::ReachedTEnd;
    double t_stop = 0.0;       // detection time for early termination
    long long steps = 0;       // accepted steps
    long long rejections = 0;  // rejected step attempts
    bool dt_collapsed = false; // stopped because dt fell below dt_min
};

using StateObserver = std::function<void(const State&, double dt_used)>;

/// Runs step_imex until t_end, an excursion of |u|_inf beyond
/// blowup_threshold*max(1, |u0|_inf), step collapse, or a non-finite
/// state. The observer fires on the initial state, then at every accepted
/// step that crosses the next multiple of sample_interval (every step if
/// sample_interval <= 0), and on the final state. For KSParabolicElliptic
/// the v field is refreshed from u before each step and on entry.
IntegrationResult integrate(State state, const ModelSpec& spec,
                            const StepperConfig& cfg, double sample_interval,
                            const StateObserver& observer);

using OdeObserver = std::function<void(double t, const std::array<double, 3>&)>;

/// Classical fixed-step fourth-order Runge-Kutta for the homogeneous
/// three-species system. conversion == nullptr selects the normalized
/// system (identity conversion). Observer semantics as in integrate.
std::array<double, 3> integrate_ode(std::array<double, 3> y0, double kappa,
                                    const ConversionSpec* conversion, double dt,
                                    double t_end, double sample_interval,
                                    const OdeObserver& observer);

}  // namespace chemovir
