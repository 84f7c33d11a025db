#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfil/compat.hpp"
#include "vfil/geometry.hpp"
#include "vfil/reflect.hpp"

namespace vfil {

enum class Scheme { Rk4Project, MidpointFixedPoint };

std::string to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct Tolerances {
    double norm = 1e-9;
    double boundary = 1e-10;
    double symmetry = 1e-12;
    double endpoint = 1e-8;
    double fixed_point = 1e-12;
    int fixed_point_max_iter = 50;
    double compat = default_compat_tolerance;
    /// Gate on |v x v_ss| at the wall; see RunSummary::wall_residual.
    double wall = 1e-2;
};

struct SimConfig {
    GridKind kind = GridKind::HalfLine;
    /// Half length for line grids, period for periodic grids (which start at s = 0).
    double length = 20.0;
    /// Node count of the grid the data lives on (half-line count for half-space runs).
    std::size_t n = 512;
    /// Explicit step; default_dt_factor * h^2 when unset.
    std::optional<double> dt;
    double t_final = 1.0;
    Scheme scheme = Scheme::Rk4Project;
    int renormalize_every = 1;
    int monitor_every = 50;
    int snapshot_every = 50;
    Tolerances tol;
    /// Reject half-space data that fails the compatibility check of order compat_order.
    bool strict = false;
    int compat_order = 1;

    Grid make_grid() const;
};

inline constexpr double default_dt_factor = 0.1;
inline constexpr double stability_factor = 0.28;

/// Largest admissible explicit step, 0.28 h^2.
inline double stability_cap(double h) { return stability_factor * h * h; }

/// Per-step diagnostics. Wall quantities are only defined on whole-line grids.
struct Telemetry {
    long step = 0;
    double t = 0.0;
    double norm_drift = 0.0;
    std::optional<double> symmetry_residual;
    std::optional<Vec3> boundary_value;
    std::optional<double> boundary_error;
    /// |u(0) x d^2u(0+)| from a one-sided stencil; vanishes for smooth T-fixed solutions.
    std::optional<double> wall_residual;
    double bending_energy = 0.0;
};

/// Recorded trajectory. Times strictly increase; every snapshot lives on `grid`.
class TimeSeries {
public:
    TimeSeries(Grid grid, Scheme scheme, double dt) : grid_(std::move(grid)), scheme_(scheme), dt_(dt) {}

    void add_snapshot(double t, long step, VectorField snapshot);
    void add_telemetry(const Telemetry& record) { telemetry_.push_back(record); }

    const Grid& grid() const { return grid_; }
    Scheme scheme() const { return scheme_; }
    double dt() const { return dt_; }
    long steps() const { return steps_.empty() ? 0 : steps_.back(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<long>& snapshot_steps() const { return steps_; }
    const std::vector<VectorField>& snapshots() const { return snapshots_; }
    const std::vector<Telemetry>& telemetry() const { return telemetry_; }

private:
    Grid grid_;
    Scheme scheme_;
    double dt_;
    std::vector<double> times_;
    std::vector<long> steps_;
    std::vector<VectorField> snapshots_;
    std::vector<Telemetry> telemetry_;
};

/// u x u_ss with second-order central differences. Periodic grids wrap;
/// whole-line grids hold their two end nodes fixed (u = e3 far field).
VectorField rhs(const VectorField& u);
void rhs_into(const Grid& grid, std::span<const Vec3> u, std::span<Vec3> out);

struct StepOptions {
    bool project = true;
    double fixed_point_tol = 1e-12;
    int fixed_point_max_iter = 50;
};

/// One time step. Rk4Project: classical RK4 then projection onto the sphere
/// (when `project`). MidpointFixedPoint: implicit midpoint solved by
/// fixed-point iteration, norm-conserving without projection.
VectorField step(const VectorField& u, double dt, Scheme scheme, const StepOptions& opts = {});

/// Evolves u0 on its own grid (whole-line or periodic) to cfg.t_final.
TimeSeries solve_whole_line(const VectorField& u0, const SimConfig& cfg);

struct HalfSpaceSolution {
    TimeSeries whole;
    TimeSeries half;
    /// Compatibility report computed by the strict gate, if it ran.
    std::optional<CompatibilityReport> gate;
};

/// extend -> solve_whole_line -> restrict, snapshot by snapshot.
HalfSpaceSolution solve_half_space(const VectorField& v0, const SimConfig& cfg);

/// Step actually used: cfg.dt (or the default) shortened so that it divides t_final.
struct TimeGrid {
    double dt;
    long steps;
};
TimeGrid time_grid(const SimConfig& cfg, double h);

/// Discrete bending energy, trapezoid integral of |u_s|^2.
double bending_energy(const VectorField& u);

Telemetry measure(const VectorField& u, long step, double t);

}  // namespace vfil
