#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "chemovir/diagnostics.hpp"
#include "chemovir/initial_data.hpp"

namespace chemovir {

/// Everything one simulation needs: model, domain, stepping policy,
/// seeded initial data, and sampling choices.
struct RunSetup {
    ModelSpec model;
    GridSpec grid;
    StepperConfig stepper;
    InitialSpec initial;
    double sample_interval = 0.1;  // <= 0 samples every accepted step
    double q = 0.0;                // gradient monitor exponent; <= 0 picks dimension + 1

    void validate() const;
};

// The configured gradient-monitor exponent, defaulting to dimension + 1.
double effective_q(const RunSetup& setup);

struct RunRecord {
    std::vector<DiagnosticsRow> series;
    RunOutcome outcome;
    FunctionalReport functional;
    State final_state;
    long long steps = 0;
    long long rejections = 0;
    // min over sampled states of min_component + 1e-12*(1 + sup norm);
    // nonnegative iff the positivity policy held at every sample.
    double positivity_margin = 0.0;
    double wall_seconds = 0.0;
};

/// Builds the grid and initial state, integrates, samples diagnostics,
/// and classifies. The zero-mean quasi-static signal of the
/// parabolic-elliptic system is exempt from the positivity audit. When
/// given, sample_sink receives every sampled state (for snapshots).
RunRecord execute_run(const RunSetup& setup,
                      const std::function<void(const State&)>& sample_sink = {});

struct SweepSpec {
    RunSetup base;
    std::vector<double> alpha_values;
    std::vector<double> kappa_values;
    std::vector<std::uint64_t> seeds;

    void validate() const;
};

struct SweepEntry {
    double alpha = 0.0;
    double kappa = 0.0;
    std::uint64_t seed = 0;
    RunOutcome outcome;
    std::vector<DiagnosticsRow> series;
};

struct SweepResult {
    std::vector<SweepEntry> entries;  // ordered by (alpha, kappa, seed)
};

/// Runs every (alpha, kappa, seed) tuple independently (parallel across
/// tuples); a run that throws is recorded as Diverged and the sweep
/// continues.
SweepResult run_sweep(const SweepSpec& spec);

struct BracketInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CriticalAlphaResult {
    double estimate = 0.0;
    double lo = 0.0, hi = 0.0;                    // final bracket
    std::vector<std::pair<double, bool>> probes;  // (alpha, blew_up)
};

// Returns true when the run at this exponent shows blow-up evidence.
using BlowUpProbe = std::function<bool(double alpha)>;

/// Bisection on the exponent between one bounded and one blow-up
/// endpoint; throws BracketInvalid when both endpoints land on the same
/// side. The probe-taking overload keeps the refinement logic testable
/// without simulations; the RunSetup overload probes by executing runs
/// (blow-up side = BlowUp or Diverged classification).
CriticalAlphaResult estimate_critical_alpha(const BlowUpProbe& probe,
                                            double alpha_lo, double alpha_hi,
                                            int iterations);
CriticalAlphaResult estimate_critical_alpha(const RunSetup& base,
                                            double alpha_lo, double alpha_hi,
                                            int iterations);

/// Verification studies against analytic oracles:
///   LaplacianEigen — cosine eigenfunction of the discrete operator,
///     grid doubling, expected order 2;
///   WEquationTime — decoupled w equation vs its separation-of-variables
///     solution, dt halving at fixed grid, expected order 1;
///   WEquationSpace — same solution, dt tied to dx^2 under grid
///     doubling, expected order 2;
///   MassODE — total-mass relation of the normalized system vs the exact
///     exponential, dt halving, expected order 1.
enum class StudyKind { LaplacianEigen, WEquationTime, WEquationSpace, MassODE };

struct StudyRow {
    double h = 0.0;      // dx or dt, whichever is refined
    double error = 0.0;
    std::optional<double> observed_order;  // vs previous level
};

std::vector<StudyRow> convergence_study(StudyKind kind, int levels);

struct PhaseEntry {
    double kappa = 0.0;
    std::array<double, 3> limit{};
    int matched_equilibrium = -1;  // index into homogeneous_equilibria, -1 if none
    bool converged = false;        // rhs residual settled below 1e-6
};

/// Integrates the homogeneous system from perturbed data for each kappa
/// and matches the limit against the equilibrium catalog within 1e-4.
std::vector<PhaseEntry> ode_phase_study(const std::vector<double>& kappa_values,
                                        const ConversionSpec& conversion,
                                        double t_end);

}  // namespace chemovir
