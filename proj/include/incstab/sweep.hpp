#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "incstab/config.hpp"
#include "incstab/recovery.hpp"

namespace incstab {

/// Constants fitted once on a calibration corpus and frozen into a JSON
/// manifest; every bound reported by a sweep is reproducible from the
/// config plus this manifest.
struct CalibrationManifest {
    double C_cal = 1.0;        // remainder decay ||w|| <= C ||q|| / sigma
    double C_coupling = 1.0;   // coupling term C / sigma
    double C_reflected = 1.0;  // mollified transform decay at the mirror freq
    double C_data = 1.0;       // data-route boundary term
    double C_rl = 1.0;         // frozen Riemann-Lebesgue certificate
    double C_int = 1.0;        // L^infty lift of the H^{-1} estimate
    double C_rhs = 1.0;        // headline stability bound
    double C_trivial = 1.0;    // a-priori fallback when the schedule fails
    double C_tail = 0.0;       // high-frequency tail mass (class L^2 bound)
    double rl_satisfied = 0.0; // fraction of decay checks met at C_rl
    uint64_t seed = 0;
};

void write_manifest(const CalibrationManifest& m,
                    const std::filesystem::path& file);
CalibrationManifest read_manifest(const std::filesystem::path& file);

struct FrameReport {
    int checked = 0;
    int failed = 0;
    double max_rel = 0.0;              // worst relative invariant defect
    bool schedule_degenerate = false;  // C_star or N not positive
    std::vector<double> sigmas;        // scheduled |Im zeta| per k
};

/// Random-frame invariant audit plus the schedule diagnostics for every
/// configured k at the first noise level; writes frames.json.
FrameReport run_frames(const ExperimentConfig& cfg,
                       const std::filesystem::path& out);

struct SweepCell {
    double k = 0.0;
    double noise = 0.0;
    std::string status;   // "ok", "infeasible", or an error tag
    double dist = 0.0;
    double E = 0.0;
    double rho = 0.0;
    double epsilon = 0.0;
    int modes = 0;
    double err_linf = 0.0;
    double err_l2 = 0.0;
    double err_hminus1 = 0.0;
    double hminus1_bound = 0.0;
    double linf_bound = 0.0;
    double rhs = 0.0;
    double wall_seconds = 0.0;
    std::vector<ModeEstimate> budget;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    bool any_failed = false;
};

/// Full stability sweep over the (k, noise) grid. Cells run in a bounded
/// worker pool; a failing cell is recorded and never aborts its siblings.
/// Writes manifest.json, sweep.csv, budgets.csv, fields/ and timings.csv
/// (timings are wall-clock and excluded from the determinism contract).
SweepResult run_sweep(const ExperimentConfig& cfg,
                      const CalibrationManifest& cal,
                      const std::filesystem::path& out);

/// Fit the manifest constants on the configured potentials; deterministic
/// under the config seed. Writes calibration.json into `out`.
CalibrationManifest run_calibrate(const ExperimentConfig& cfg,
                                  const std::filesystem::path& out);

/// Descriptor for q2 = q1 + q0.
PotentialDescriptor combined_descriptor(const ExperimentConfig& cfg);

/// Spearman rank correlation of y against x (ties broken by index order).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

} // namespace incstab
