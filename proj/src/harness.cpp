#include "vfil/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "vfil/hasimoto.hpp"

namespace vfil {

bool RunSummary::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second; });
}

RunSummary invariant_suite(const TimeSeries& series, const std::vector<FilamentCurve>* curves, const SimConfig& cfg,
                           const std::optional<CompatibilityReport>& compat) {
    RunSummary s;
    s.grid_kind = to_string(series.grid().kind());
    s.steps = series.steps();
    s.dt = series.dt();
    s.compat = compat;

    const auto& tele = series.telemetry();
    const double e0 = tele.empty() ? 0.0 : tele.front().bending_energy;
    for (const auto& rec : tele) {
        s.norm_drift.offer(rec.norm_drift, rec.step, rec.t);
        s.bending_energy_drift.offer(std::fabs(rec.bending_energy - e0), rec.step, rec.t);
        if (rec.boundary_value) {
            s.has_wall = true;
            const Vec3 b = *rec.boundary_value;
            s.symmetry_residual.offer(*rec.symmetry_residual, rec.step, rec.t);
            s.boundary_error.offer(*rec.boundary_error, rec.step, rec.t);
            s.boundary_transverse.offer(std::max(std::fabs(b.x), std::fabs(b.y)), rec.step, rec.t);
            s.boundary_axial.offer(std::fabs(b.z - 1.0), rec.step, rec.t);
            s.wall_residual.offer(*rec.wall_residual, rec.step, rec.t);
        }
    }

    if (curves != nullptr && !curves->empty()) {
        s.has_curves = true;
        const auto& steps = series.snapshot_steps();
        for (std::size_t j = 0; j < curves->size(); ++j) {
            const auto& c = (*curves)[j];
            const long at = j < steps.size() ? steps[j] : 0;
            if (c.grid.origin()) {
                const Vec3 p = endpoint(c);
                s.endpoint_track.push_back({c.t, p});
                s.endpoint_height.offer(std::fabs(p.z), at, c.t);
            }
            s.arclength_deviation.offer(arclength_deviation(c), at, c.t);
        }
    }

    s.verdicts["unit_norm"] = s.norm_drift.value <= cfg.tol.norm;
    if (s.has_wall) {
        s.verdicts["t_symmetry"] = s.symmetry_residual.value <= cfg.tol.symmetry;
        s.verdicts["boundary_trace"] =
            s.boundary_transverse.value <= cfg.tol.boundary && s.boundary_axial.value <= cfg.tol.boundary;
        s.verdicts["wall_regularity"] = s.wall_residual.value <= cfg.tol.wall;
    }
    if (s.has_curves && s.has_wall) s.verdicts["endpoint_on_wall"] = s.endpoint_height.value <= cfg.tol.endpoint;

    const bool wall_failed = s.has_wall && (!s.verdicts["wall_regularity"] || !s.verdicts["boundary_trace"]);
    if (wall_failed) {
        if (compat && !compat->passed()) {
            s.root_cause = "initial data violates the compatibility condition of order " +
                           std::to_string(*compat->first_failed_order());
        } else {
            s.root_cause = "wall residual exceeds tolerance with compatible initial data";
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

double measured_angular_frequency(const TimeSeries& series, double k) {
    const auto& snaps = series.snapshots();
    const auto& times = series.times();
    std::vector<double> phase(snaps.size());
    for (std::size_t j = 0; j < snaps.size(); ++j) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < snaps[j].size(); ++i) {
            const Vec3 u = snaps[j][i];
            const double rel = std::atan2(u.y, u.x) - k * series.grid().s(i);
            sx += std::cos(rel);
            sy += std::sin(rel);
        }
        phase[j] = std::atan2(sy, sx);
        if (j > 0) {
            // unwrap
            while (phase[j] - phase[j - 1] > std::numbers::pi) phase[j] -= 2.0 * std::numbers::pi;
            while (phase[j] - phase[j - 1] < -std::numbers::pi) phase[j] += 2.0 * std::numbers::pi;
        }
    }
    const double n = static_cast<double>(phase.size());
    double mt = 0.0, mp = 0.0;
    for (std::size_t j = 0; j < phase.size(); ++j) {
        mt += times[j];
        mp += phase[j];
    }
    mt /= n;
    mp /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < phase.size(); ++j) {
        num += (times[j] - mt) * (phase[j] - mp);
        den += (times[j] - mt) * (times[j] - mt);
    }
    return -num / den;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

FamilySpec helix_spec(const std::map<std::string, double>& p) {
    return {"helix", {{"a", param(p, "a", 0.6)}, {"c", param(p, "c", 0.8)}, {"k", param(p, "k", 2.0)}}};
}

SimConfig periodic_config(const Grid& g, double t_final, Scheme scheme) {
    SimConfig cfg;
    cfg.kind = GridKind::Periodic;
    cfg.length = g.s_max() - g.s_min();
    cfg.n = g.size();
    cfg.t_final = t_final;
    cfg.scheme = scheme;
    return cfg;
}

Vec3 mean_displacement(const FilamentCurve& from, const FilamentCurve& to) {
    Vec3 d{};
    for (std::size_t i = 0; i < from.positions.size(); ++i) d += to.positions[i] - from.positions[i];
    return d / static_cast<double>(from.positions.size());
}

struct RingRun {
    Vec3 displacement;
    Vec3 expected;
};

RingRun run_ring(double r, std::size_t n, double t_final, Scheme scheme) {
    const FamilySpec ring{"ring", {{"r", r}}};
    const Grid g = Grid::periodic(0.0, 2.0 * std::numbers::pi * r, n);
    const auto v0 = builtin_initial_data(ring, g);
    const auto series = solve_whole_line(v0, periodic_config(g, t_final, scheme));
    const auto curves = reconstruct_positions(initial_curve(v0), series);
    return {mean_displacement(curves.front(), curves.back()), Vec3{0.0, 0.0, t_final / r}};
}

double helix_error(const std::map<std::string, double>& p, std::size_t n, double t_final, Scheme scheme, StudyLevel& level) {
    const FamilySpec helix = helix_spec(p);
    const double a = helix.params.at("a"), c = helix.params.at("c"), k = helix.params.at("k");
    const Grid g = Grid::periodic(0.0, 2.0 * std::numbers::pi, n);
    const auto series = solve_whole_line(builtin_initial_data(helix, g), periodic_config(g, t_final, scheme));
    level.dt = series.dt();
    const double omega = c * k * k;
    const auto& u = series.snapshots().back();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = k * g.s(i) - omega * t_final;
        worst = std::max(worst, max_abs(u[i] - Vec3{a * std::cos(phase), a * std::sin(phase), c}));
    }
    return worst;
}

double helix_nls_error(const std::map<std::string, double>& p, std::size_t n, double t_final, Scheme scheme, StudyLevel& level) {
    const Grid g = Grid::periodic(0.0, 2.0 * std::numbers::pi, n);
    auto cfg = periodic_config(g, t_final, scheme);
    const auto series = solve_whole_line(builtin_initial_data(helix_spec(p), g), cfg);
    level.dt = series.dt();
    const auto fields = hasimoto_series(series);
    return nls_residual(fields, series.times()).value;
}

}  // namespace

OracleResult oracle_error(const std::string& name, const OracleOptions& opts) {
    OracleResult out;
    out.name = name;
    if (name == "helix_dispersion") {
        const FamilySpec helix = helix_spec(opts.params);
        const double c = helix.params.at("c"), k = helix.params.at("k");
        const Grid g = Grid::periodic(0.0, 2.0 * std::numbers::pi, opts.n);
        const auto series = solve_whole_line(builtin_initial_data(helix, g), periodic_config(g, opts.t_final, opts.scheme));
        out.expected = c * k * k;
        out.measured = measured_angular_frequency(series, k);
        out.error = std::fabs(out.measured - out.expected) / out.expected;
    } else if (name == "ring_translation") {
        const auto run = run_ring(param(opts.params, "r", 0.5), opts.n, opts.t_final, opts.scheme);
        out.expected = norm(run.expected);
        out.measured = run.displacement.z;
        out.error = norm(run.displacement - run.expected) / norm(run.expected);
    } else if (name == "stationary_line") {
        const std::size_t n = opts.n % 2 == 0 ? opts.n + 1 : opts.n;
        const Grid g = Grid::whole_line(10.0, n);
        SimConfig cfg;
        cfg.kind = GridKind::WholeLine;
        cfg.length = 10.0;
        cfg.n = n;
        cfg.t_final = opts.t_final;
        cfg.scheme = opts.scheme;
        const auto series = solve_whole_line(builtin_initial_data({"straight", {}}, g), cfg);
        double worst = 0.0;
        for (const auto& snap : series.snapshots()) {
            for (const auto& u : snap.values()) worst = std::max(worst, max_abs(u - e3));
        }
        out.expected = 0.0;
        out.measured = worst;
        out.error = worst;
    } else {
        throw Error(ErrorCode::UnknownOracle, "unknown oracle '" + name + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------

double fitted_order(std::span<const double> h, std::span<const double> error) {
    if (h.size() != error.size() || h.size() < 2) throw Error(ErrorCode::InvalidArgument, "fitted_order needs matching samples");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        mx += std::log(h[i]);
        my += std::log(error[i]);
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double dx = std::log(h[i]) - mx;
        num += dx * (std::log(error[i]) - my);
        den += dx * dx;
    }
    return num / den;
}

namespace {

constexpr double exact_threshold = 1e-13;

void finish(StudyResult& r, std::span<const StudyLevel> fitted) {
    std::vector<double> hs, errs;
    bool all_zero = true;
    for (const auto& l : fitted) {
        hs.push_back(l.h);
        errs.push_back(l.error);
        all_zero = all_zero && l.error <= exact_threshold;
    }
    r.exact = all_zero;
    if (!all_zero) r.order = fitted_order(hs, errs);
}

StudyResult half_space_study(std::span<const std::size_t> levels, const StudyOptions& opts) {
    const FamilySpec family{"planar_odd", {{"a", param(opts.params, "a", 0.5)}}};
    const std::size_t finest = *std::max_element(levels.begin(), levels.end());
    for (auto n : levels) {
        if ((finest - 1) % (n - 1) != 0) {
            throw Error(ErrorCode::InvalidArgument, "half_space levels need (n_finest - 1) divisible by (n - 1)");
        }
    }
    std::vector<std::future<VectorField>> jobs;
    std::vector<double> dts(levels.size());
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        jobs.push_back(std::async(std::launch::async, [&, idx] {
            const Grid g = Grid::half_line(opts.length, levels[idx]);
            SimConfig cfg;
            cfg.kind = GridKind::HalfLine;
            cfg.length = opts.length;
            cfg.n = levels[idx];
            cfg.t_final = opts.t_final;
            cfg.scheme = opts.scheme;
            auto sol = solve_half_space(builtin_initial_data(family, g), cfg);
            dts[idx] = sol.half.dt();
            return sol.half.snapshots().back();
        }));
    }
    std::vector<VectorField> finals;
    for (auto& j : jobs) finals.push_back(j.get());

    const std::size_t ref_idx = static_cast<std::size_t>(std::max_element(levels.begin(), levels.end()) - levels.begin());
    const auto& ref = finals[ref_idx];
    StudyResult r;
    r.name = "half_space";
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        StudyLevel l{levels[idx], finals[idx].grid().h(), dts[idx], 0.0};
        if (idx != ref_idx) {
            const std::size_t stride = (finest - 1) / (levels[idx] - 1);
            for (std::size_t i = 0; i < levels[idx]; ++i) l.error = std::max(l.error, max_abs(finals[idx][i] - ref[i * stride]));
        }
        r.levels.push_back(l);
    }
    std::vector<StudyLevel> fitted;
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        if (idx != ref_idx) fitted.push_back(r.levels[idx]);
    }
    finish(r, fitted);
    return r;
}

}  // namespace

StudyResult convergence_study(const std::string& name, std::span<const std::size_t> levels, const StudyOptions& opts) {
    if (levels.size() < 3) throw Error(ErrorCode::InvalidArgument, "a convergence study needs at least three levels");
    if (name == "half_space") return half_space_study(levels, opts);

    using Runner = double (*)(const StudyOptions&, std::size_t, StudyLevel&);
    Runner runner = nullptr;
    if (name == "helix") {
        runner = [](const StudyOptions& o, std::size_t n, StudyLevel& l) {
            l.h = 2.0 * std::numbers::pi / static_cast<double>(n);
            return helix_error(o.params, n, o.t_final, o.scheme, l);
        };
    } else if (name == "helix_nls") {
        runner = [](const StudyOptions& o, std::size_t n, StudyLevel& l) {
            l.h = 2.0 * std::numbers::pi / static_cast<double>(n);
            return helix_nls_error(o.params, n, o.t_final, o.scheme, l);
        };
    } else if (name == "ring") {
        runner = [](const StudyOptions& o, std::size_t n, StudyLevel& l) {
            const double r = param(o.params, "r", 0.5);
            l.h = 2.0 * std::numbers::pi * r / static_cast<double>(n);
            const auto run = run_ring(r, n, o.t_final, o.scheme);
            l.dt = default_dt_factor * l.h * l.h;
            return norm(run.displacement - run.expected);
        };
    } else if (name == "stationary_line") {
        runner = [](const StudyOptions& o, std::size_t n, StudyLevel& l) {
            OracleOptions oo;
            oo.n = n;
            oo.t_final = o.t_final;
            oo.scheme = o.scheme;
            const auto res = oracle_error("stationary_line", oo);
            l.h = 10.0 / static_cast<double>((oo.n % 2 == 0 ? oo.n + 1 : oo.n) - 1) * 2.0;
            l.dt = default_dt_factor * l.h * l.h;
            return res.error;
        };
    } else {
        throw Error(ErrorCode::UnknownOracle, "unknown convergence case '" + name + "'");
    }

    std::vector<StudyLevel> results(levels.size());
    std::vector<std::future<void>> jobs;
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        jobs.push_back(std::async(std::launch::async, [&, idx] {
            results[idx].n = levels[idx];
            results[idx].error = runner(opts, levels[idx], results[idx]);
        }));
    }
    for (auto& j : jobs) j.get();

    StudyResult r;
    r.name = name;
    r.levels = results;
    finish(r, r.levels);
    return r;
}

}  // namespace vfil
