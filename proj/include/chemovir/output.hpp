#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemovir/config.hpp"

namespace chemovir {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All numbers are rendered with shortest-exact formatting, so identical
// runs serialize byte-identically.

/// Diagnostics series in the fixed column order; absent values are empty
/// cells. Includes the header line; rows end with '\n'.
std::string diagnostics_csv(const std::vector<DiagnosticsRow>& series);

/// Sweep table: alpha, kappa, seed, classification, t_detect,
/// peak_linf_u, peak_grad_v_lq, peak_linf_w.
std::string sweep_summary_csv(const SweepResult& result);

/// Stable-order JSON summary of one run, embedding the config echo.
std::string run_summary_json(const RunConfig& config, const RunRecord& record);

/// One sampled state as CSV: t, x [, y], u, v [, w].
std::string snapshot_csv(const State& state);

/// Self-contained SVG line plot of the monitored norms over time.
std::string monitors_svg(const std::vector<DiagnosticsRow>& series);

/// Convergence table: h, error, observed_order (empty for the first row).
std::string study_csv(const std::vector<StudyRow>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace chemovir
