#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfil/compat.hpp"
#include "vfil/evolve.hpp"
#include "vfil/reconstruct.hpp"

namespace vfil {

/// A maximum over a run together with where it was attained.
struct MaxRecord {
    double value = 0.0;
    long step = 0;
    double t = 0.0;

    void offer(double v, long at_step, double at_t) {
        if (v > value) {
            value = v;
            step = at_step;
            t = at_t;
        }
    }
};

struct EndpointSample {
    double t = 0.0;
    Vec3 position;
};

struct RunSummary {
    std::map<std::string, std::string> config;
    std::string grid_kind;
    long steps = 0;
    double dt = 0.0;

    MaxRecord norm_drift;
    MaxRecord bending_energy_drift;
    // Whole-line runs only.
    bool has_wall = false;
    MaxRecord symmetry_residual;
    MaxRecord boundary_error;
    MaxRecord boundary_transverse;  // max(|v1|, |v2|) at s = 0
    MaxRecord boundary_axial;       // |v3 - 1| at s = 0
    MaxRecord wall_residual;
    // Runs with reconstructed curves only.
    bool has_curves = false;
    MaxRecord endpoint_height;
    MaxRecord arclength_deviation;
    std::vector<EndpointSample> endpoint_track;

    std::map<std::string, double> oracle_errors;
    std::map<std::string, double> convergence_orders;
    /// Kept out of the JSON summary unless asked for, so repeated runs compare equal.
    double wall_clock_seconds = 0.0;

    std::map<std::string, bool> verdicts;
    std::optional<std::string> root_cause;
    std::optional<CompatibilityReport> compat;

    bool passed() const;
};

/// Evaluates every run invariant against cfg.tol and stamps verdicts.
/// `series` is the trajectory the telemetry was recorded on (whole-line for
/// half-space runs); `curves` are the reconstructed positions, if any.
RunSummary invariant_suite(const TimeSeries& series, const std::vector<FilamentCurve>* curves, const SimConfig& cfg,
                           const std::optional<CompatibilityReport>& compat = std::nullopt);

// ---------------------------------------------------------------------------
// Closed-form oracles

struct OracleResult {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    /// Relative error, or the absolute deviation when the expected value is zero.
    double error = 0.0;
};

struct OracleOptions {
    std::size_t n = 256;
    double t_final = 0.5;
    /// Family parameters: helix a, c, k; ring r.
    std::map<std::string, double> params;
    Scheme scheme = Scheme::Rk4Project;
};

/// helix_dispersion | ring_translation | stationary_line
OracleResult oracle_error(const std::string& name, const OracleOptions& opts = {});

/// Phase rate of a helix-like run: least-squares slope of the unwrapped mean
/// phase of (u1, u2) relative to k*s, sign-flipped so that a wave moving
/// towards +s has positive frequency.
double measured_angular_frequency(const TimeSeries& series, double k);

// ---------------------------------------------------------------------------
// Convergence studies

struct StudyLevel {
    std::size_t n = 0;
    double h = 0.0;
    double dt = 0.0;
    double error = 0.0;
};

struct StudyResult {
    std::string name;
    std::vector<StudyLevel> levels;
    /// Least-squares slope of log(error) against log(h); empty when exact.
    std::optional<double> order;
    bool exact = false;
};

struct StudyOptions {
    double t_final = 0.5;
    std::map<std::string, double> params;
    Scheme scheme = Scheme::Rk4Project;
    /// Half length for half_space studies.
    double length = 20.0;
};

/// helix | helix_nls | ring | stationary_line | half_space. Levels run in
/// parallel; results are keyed by level.
StudyResult convergence_study(const std::string& name, std::span<const std::size_t> levels, const StudyOptions& opts = {});

/// Least-squares slope of log(error) over log(h).
double fitted_order(std::span<const double> h, std::span<const double> error);

inline constexpr double order_band_low = 1.8;
inline constexpr double order_band_high = 2.5;
inline constexpr double oracle_tolerance = 1e-2;

}  // namespace vfil
