#include "vfil/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace vfil {

std::string to_string(Scheme scheme) {
    return scheme == Scheme::Rk4Project ? "rk4_project" : "midpoint_fixedpoint";
}

Scheme parse_scheme(std::string_view text) {
    if (text == "rk4_project") return Scheme::Rk4Project;
    if (text == "midpoint_fixedpoint") return Scheme::MidpointFixedPoint;
    throw Error(ErrorCode::Parse, "unknown scheme '" + std::string(text) + "'");
}

Grid SimConfig::make_grid() const {
    switch (kind) {
        case GridKind::HalfLine: return Grid::half_line(length, n);
        case GridKind::WholeLine: return Grid::whole_line(length, n);
        case GridKind::Periodic: return Grid::periodic(0.0, length, n);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown grid kind");
}

void TimeSeries::add_snapshot(double t, long step, VectorField snapshot) {
    if (!times_.empty() && !(t > times_.back())) throw Error(ErrorCode::InvalidArgument, "snapshot times must increase");
    if (!(snapshot.grid() == grid_)) throw Error(ErrorCode::GridMismatch, "snapshot grid differs from series grid");
    times_.push_back(t);
    steps_.push_back(step);
    snapshots_.push_back(std::move(snapshot));
}

void rhs_into(const Grid& grid, std::span<const Vec3> u, std::span<Vec3> out) {
    if (grid.kind() == GridKind::HalfLine) {
        throw Error(ErrorCode::InvalidArgument, "evolution runs on whole-line or periodic grids; extend half-line data first");
    }
    deriv_into<Vec3>(u, out, grid.h(), 2, grid.is_periodic());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = cross(u[i], out[i]);
    if (!grid.is_periodic()) {
        out.front() = Vec3{};
        out.back() = Vec3{};
    }
}

VectorField rhs(const VectorField& u) {
    std::vector<Vec3> out(u.size());
    rhs_into(u.grid(), u.values(), out);
    return VectorField(u.grid(), std::move(out));
}

namespace {

/// Reusable stage buffers for one trajectory.
class Stepper {
public:
    Stepper(Grid grid, Scheme scheme, StepOptions opts)
        : grid_(std::move(grid)), scheme_(scheme), opts_(opts), n_(grid_.size()),
          k1_(n_), k2_(n_), k3_(n_), k4_(n_), tmp_(n_) {}

    void advance(std::vector<Vec3>& u, double dt, bool project) {
        if (scheme_ == Scheme::Rk4Project) {
            rk4(u, dt, project);
        } else {
            midpoint(u, dt);
        }
    }

private:
    void rk4(std::vector<Vec3>& u, double dt, bool project) {
        rhs_into(grid_, u, k1_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = u[i] + (0.5 * dt) * k1_[i];
        rhs_into(grid_, tmp_, k2_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = u[i] + (0.5 * dt) * k2_[i];
        rhs_into(grid_, tmp_, k3_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = u[i] + dt * k3_[i];
        rhs_into(grid_, tmp_, k4_);
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < n_; ++i) {
            u[i] += w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
            if (project) u[i] = project_unit(u[i]);
        }
    }

    // u+ = u + dt * F((u + u+) / 2), iterated from an explicit Euler guess.
    void midpoint(std::vector<Vec3>& u, double dt) {
        auto& next = k4_;
        auto& mid = tmp_;
        auto& f = k1_;
        rhs_into(grid_, u, f);
        for (std::size_t i = 0; i < n_; ++i) next[i] = u[i] + dt * f[i];
        for (int it = 0; it < opts_.fixed_point_max_iter; ++it) {
            for (std::size_t i = 0; i < n_; ++i) mid[i] = 0.5 * (u[i] + next[i]);
            rhs_into(grid_, mid, f);
            double change = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                const Vec3 candidate = u[i] + dt * f[i];
                change = std::max(change, max_abs(candidate - next[i]));
                next[i] = candidate;
            }
            if (!std::isfinite(change)) break;
            if (change <= opts_.fixed_point_tol) {
                u.swap(next);
                return;
            }
        }
        throw Error(ErrorCode::FixedPointDiverged,
                    "implicit midpoint iteration did not reach " + std::to_string(opts_.fixed_point_tol) + " in " +
                        std::to_string(opts_.fixed_point_max_iter) + " iterations");
    }

    Grid grid_;
    Scheme scheme_;
    StepOptions opts_;
    std::size_t n_;
    std::vector<Vec3> k1_, k2_, k3_, k4_, tmp_;
};

void check_dt(double dt, double h) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
    if (dt > stability_cap(h) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::StabilityViolated,
                    "dt = " + std::to_string(dt) + " exceeds the cap 0.28 h^2 = " + std::to_string(stability_cap(h)));
    }
}

}  // namespace

VectorField step(const VectorField& u, double dt, Scheme scheme, const StepOptions& opts) {
    check_dt(dt, u.grid().h());
    std::vector<Vec3> values(u.values().begin(), u.values().end());
    Stepper stepper(u.grid(), scheme, opts);
    stepper.advance(values, dt, opts.project);
    return VectorField(u.grid(), std::move(values));
}

TimeGrid time_grid(const SimConfig& cfg, double h) {
    if (!(cfg.t_final > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_final must be positive");
    const double dt = cfg.dt.value_or(default_dt_factor * h * h);
    check_dt(dt, h);
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_final / dt - 1e-9)));
    return {cfg.t_final / static_cast<double>(steps), steps};
}

double bending_energy(const VectorField& u) {
    const auto us = deriv(u, 1);
    std::vector<double> density(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) density[i] = dot(us[i], us[i]);
    return integrate(ScalarField(u.grid(), std::move(density)));
}

Telemetry measure(const VectorField& u, long step_index, double t) {
    Telemetry rec;
    rec.step = step_index;
    rec.t = t;
    rec.norm_drift = max_norm_deviation(u);
    rec.bending_energy = bending_energy(u);
    if (u.grid().kind() == GridKind::WholeLine) {
        const Vec3 trace = u[*u.grid().origin()];
        rec.symmetry_residual = symmetry_residual(u);
        rec.boundary_value = trace;
        rec.boundary_error = norm(trace - e3);
        rec.wall_residual = norm(cross(trace, one_sided_deriv_at_zero(u, 2, BoundaryStencil{}, Side::Right)));
    }
    return rec;
}

TimeSeries solve_whole_line(const VectorField& u0, const SimConfig& cfg) {
    const Grid& grid = u0.grid();
    if (grid.kind() == GridKind::HalfLine) throw Error(ErrorCode::InvalidArgument, "solve_whole_line needs a whole-line or periodic grid");
    if (const double dev = max_norm_deviation(u0); dev > cfg.tol.norm) {
        throw Error(ErrorCode::NotUnitField, "initial data deviates from the unit sphere by " + std::to_string(dev));
    }
    if (cfg.renormalize_every < 1 || cfg.monitor_every < 1 || cfg.snapshot_every < 1) {
        throw Error(ErrorCode::InvalidArgument, "cadences must be >= 1");
    }
    const auto [dt, steps] = time_grid(cfg, grid.h());

    StepOptions opts;
    opts.fixed_point_tol = cfg.tol.fixed_point;
    opts.fixed_point_max_iter = cfg.tol.fixed_point_max_iter;
    Stepper stepper(grid, cfg.scheme, opts);

    TimeSeries series(grid, cfg.scheme, dt);
    std::vector<Vec3> u(u0.values().begin(), u0.values().end());
    series.add_snapshot(0.0, 0, u0);
    series.add_telemetry(measure(u0, 0, 0.0));

    for (long k = 1; k <= steps; ++k) {
        const bool project = cfg.scheme == Scheme::Rk4Project && k % cfg.renormalize_every == 0;
        stepper.advance(u, dt, project);
        const double t = k == steps ? cfg.t_final : static_cast<double>(k) * dt;
        const bool snap = k % cfg.snapshot_every == 0 || k == steps;
        const bool monitor = k % cfg.monitor_every == 0 || k == steps;
        if (!snap && !monitor) continue;
        VectorField field(grid, u);
        if (monitor) series.add_telemetry(measure(field, k, t));
        if (snap) series.add_snapshot(t, k, std::move(field));
    }
    return series;
}

HalfSpaceSolution solve_half_space(const VectorField& v0, const SimConfig& cfg) {
    if (v0.grid().kind() != GridKind::HalfLine) throw Error(ErrorCode::InvalidArgument, "solve_half_space needs half-line data");
    if (const double dev = max_norm_deviation(v0); dev > cfg.tol.norm) {
        throw Error(ErrorCode::NotUnitField, "initial data deviates from the unit sphere by " + std::to_string(dev));
    }
    if (const double far = far_field_deviation(v0); far > far_field_tolerance) {
        throw Error(ErrorCode::FarFieldRejected, "mean |v0 - e3| over the outer 10% is " + std::to_string(far));
    }
    std::optional<CompatibilityReport> gate;
    if (cfg.strict) {
        gate = check_A(v0, cfg.compat_order, cfg.tol.compat);
        if (!gate->passed()) {
            throw Error(ErrorCode::CompatibilityRejected,
                        "initial data fails the compatibility condition at order " + std::to_string(*gate->first_failed_order()));
        }
    }

    TimeSeries whole = solve_whole_line(extend(v0), cfg);
    TimeSeries half(v0.grid(), whole.scheme(), whole.dt());
    for (std::size_t i = 0; i < whole.snapshots().size(); ++i) {
        half.add_snapshot(whole.times()[i], whole.snapshot_steps()[i], restrict_to_half_line(whole.snapshots()[i]));
    }
    for (const auto& rec : whole.telemetry()) half.add_telemetry(rec);
    return {std::move(whole), std::move(half), std::move(gate)};
}

}  // namespace vfil
