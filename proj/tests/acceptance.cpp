// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <sys/wait.h>

#include "vfil/compat.hpp"
#include "vfil/harness.hpp"
#include "vfil/hasimoto.hpp"
#include "vfil/io.hpp"
#include "vfil/reflect.hpp"

using namespace vfil;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

char buf[512];

template <class... Args>
std::string fmt(const char* f, Args... args) {
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

io::RunSpec half_space_spec(Scheme scheme) {
    auto spec = io::parse_run_spec({{"grid.kind", "half-line"},
                                    {"grid.L", "20"},
                                    {"grid.n", "512"},
                                    {"time.t_final", "1"},
                                    {"scheme", to_string(scheme)},
                                    {"data.family", "planar_odd"},
                                    {"data.params", "a=0.5"}});
    spec.reconstruct = true;
    return spec;
}

const io::RunResult& rk4_run() {
    static const io::RunResult r = io::run_simulation(half_space_spec(Scheme::Rk4Project));
    return r;
}

/// Exact maxima over every recorded snapshot, independent of the telemetry cadence.
struct WallMaxima {
    double norm = 0, transverse = 0, axial = 0, symmetry = 0, height = 0;
};

WallMaxima wall_maxima(const io::RunResult& r) {
    WallMaxima m;
    for (const auto& u : r.trajectory.snapshots()) {
        m.norm = std::max(m.norm, max_norm_deviation(u));
        const Vec3 b = u[*u.grid().origin()];
        m.transverse = std::max({m.transverse, std::fabs(b.x), std::fabs(b.y)});
        m.axial = std::max(m.axial, std::fabs(b.z - 1.0));
        m.symmetry = std::max(m.symmetry, symmetry_residual(u));
    }
    for (const auto& c : r.curves) m.height = std::max(m.height, std::fabs(endpoint_height(c)));
    const auto& s = r.summary;
    m.norm = std::max(m.norm, s.norm_drift.value);
    m.transverse = std::max(m.transverse, s.boundary_transverse.value);
    m.axial = std::max(m.axial, s.boundary_axial.value);
    m.symmetry = std::max(m.symmetry, s.symmetry_residual.value);
    return m;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(VFIL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome c1() {
    const auto m = wall_maxima(rk4_run());
    return {m.norm <= 1e-12, fmt("max ||v|-1| = %.3e (tol 1e-12)", m.norm)};
}

Outcome c2() {
    const auto m = wall_maxima(rk4_run());
    return {m.transverse <= 1e-10 && m.axial <= 1e-10,
            fmt("max |v1|,|v2| at s=0 = %.3e, max |v3-1| = %.3e (tol 1e-10)", m.transverse, m.axial)};
}

Outcome c3() {
    const auto m = wall_maxima(rk4_run());
    return {m.symmetry <= 1e-12, fmt("max symmetry residual = %.3e (tol 1e-12)", m.symmetry)};
}

Outcome c4() {
    const auto& r = rk4_run();
    const auto m = wall_maxima(r);
    const bool tracked = r.summary.endpoint_track.size() == r.curves.size() && !r.curves.empty();
    return {m.height <= 1e-8 && tracked,
            fmt("max |x3(0,t)| = %.3e (tol 1e-8), %zu endpoint samples recorded", m.height, r.summary.endpoint_track.size())};
}

Outcome c5() {
    const std::size_t levels[] = {128, 256, 512};
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 3; ++k) {
        std::vector<double> hs, rs;
        for (auto n : levels) {
            const auto ext = extend(builtin_initial_data(FamilySpec::parse("planar_odd:a=0.5"), Grid::half_line(20.0, n)));
            hs.push_back(ext.grid().h());
            rs.push_back(derivative_jump_residual(ext, k));
        }
        const bool monotone = rs[1] < rs[0] && rs[2] < rs[1];
        const double order = fitted_order(hs, rs);
        ok = ok && monotone && order >= 1.8;
        detail += fmt("k=%d order %.2f%s; ", k, order, monotone ? "" : " (not monotone)");
    }
    double lo = 1e300, hi = 0.0;
    for (auto n : levels) {
        const auto ext = extend(builtin_initial_data(FamilySpec::parse("planar_bad"), Grid::half_line(20.0, n)));
        const double r = derivative_jump_residual(ext, 2);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    const double spread = (hi - lo) / lo;
    ok = ok && spread < 0.10 && lo > 0.0;
    detail += fmt("planar_bad k=2 in [%.3f, %.3f], spread %.1f%% (< 10%%)", lo, hi, 100.0 * spread);
    return {ok, detail};
}

Outcome c6() {
    const auto grid = default_check_grid();
    const auto odd = builtin_initial_data(FamilySpec::parse("planar_odd:a=0.5"), grid);
    const auto bad = builtin_initial_data(FamilySpec::parse("planar_bad"), grid);
    bool ok = true;
    for (int n = 0; n <= 2; ++n) ok = ok && check_A(odd, n).passed();
    ok = ok && !check_A(bad, 1).passed();
    int odd_codes[3];
    for (int n = 0; n <= 2; ++n) odd_codes[n] = cli("check --family planar_odd:a=0.5 --strict --order " + std::to_string(n));
    const int bad_code = cli("check --family planar_bad --strict --order 1");
    ok = ok && odd_codes[0] == 0 && odd_codes[1] == 0 && odd_codes[2] == 0 && bad_code == 2;
    return {ok, fmt("planar_odd orders 0-2 exit %d,%d,%d; planar_bad order 1 exit %d", odd_codes[0], odd_codes[1], odd_codes[2],
                    bad_code)};
}

Outcome c7() {
    OracleOptions o;
    o.n = 256;
    o.t_final = 0.5;
    o.params = {{"a", 0.6}, {"c", 0.8}, {"k", 2.0}};
    const auto r = oracle_error("helix_dispersion", o);
    return {r.error <= 1e-2, fmt("omega = %.6f vs %.6f, rel. error %.3e (tol 1e-2)", r.measured, r.expected, r.error)};
}

Outcome c8() {
    OracleOptions o;
    o.n = 256;
    o.t_final = 0.5;
    o.params = {{"r", 0.5}};
    const auto r = oracle_error("ring_translation", o);
    return {r.error <= 1e-2, fmt("displacement z = %.6f vs %.6f, rel. error %.3e (tol 1e-2)", r.measured, r.expected, r.error)};
}

const StudyResult& helix_study() {
    static const StudyResult r = [] {
        const std::vector<std::size_t> levels{64, 128, 256};
        return convergence_study("helix", levels);
    }();
    return r;
}

Outcome c9() {
    const auto& r = helix_study();
    const double order = r.order.value_or(0.0);
    return {order >= order_band_low && order <= order_band_high,
            fmt("fitted order %.3f (band [1.8, 2.5]), errors %.3e %.3e %.3e", order, r.levels[0].error, r.levels[1].error,
                r.levels[2].error)};
}

Outcome c10() {
    bool ok = true;
    double worst_k = 0.0, worst_t = 0.0;
    for (std::size_t n : {64, 128, 256}) {
        const auto g = Grid::periodic(0.0, 2.0 * std::numbers::pi, n);
        SimConfig cfg;
        cfg.kind = GridKind::Periodic;
        cfg.length = 2.0 * std::numbers::pi;
        cfg.n = n;
        cfg.t_final = 0.5;
        const auto series = solve_whole_line(builtin_initial_data(FamilySpec::parse("helix"), g), cfg);
        const double bound = 2.0 * g.h() * g.h();
        for (const auto& snap : series.snapshots()) {
            const auto f = frenet(snap);
            for (std::size_t i = 0; i < n; ++i) {
                const double dk = std::fabs(f.kappa[i] - 1.2), dt = std::fabs(f.tau[i] - 1.6);
                ok = ok && f.mask[i] && dk <= bound && dt <= bound;
                worst_k = std::max(worst_k, dk / (g.h() * g.h()));
                worst_t = std::max(worst_t, dt / (g.h() * g.h()));
            }
        }
    }
    const std::vector<std::size_t> levels{64, 128, 256};
    const auto nls = convergence_study("helix_nls", levels);
    const double order = nls.order.value_or(0.0);
    ok = ok && order >= 1.8;
    return {ok, fmt("max |kappa-1.2|/h^2 = %.3f, max |tau-1.6|/h^2 = %.3f (C = 2); NLS residual order %.3f (>= 1.8)", worst_k,
                    worst_t, order)};
}

Outcome c11() {
    const auto r = io::run_simulation(half_space_spec(Scheme::MidpointFixedPoint));
    const auto m = wall_maxima(r);
    const bool ok = m.norm <= 1e-10 && m.transverse <= 1e-10 && m.axial <= 1e-10 && m.symmetry <= 1e-12 && m.height <= 1e-8;
    return {ok, fmt("norm %.3e (1e-10), boundary %.3e/%.3e (1e-10), symmetry %.3e (1e-12), |x3(0)| %.3e (1e-8)", m.norm,
                    m.transverse, m.axial, m.symmetry, m.height)};
}

Outcome c12() {
    const auto first = io::to_json(rk4_run().summary).dump();
    const auto second = io::to_json(io::run_simulation(half_space_spec(Scheme::Rk4Project)).summary).dump();
    return {first == second, fmt("%zu-byte summaries %s", first.size(), first == second ? "identical" : "differ")};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1  unit-norm conservation", c1},
        {"2  boundary trace equals e3", c2},
        {"3  reflection symmetry preserved", c3},
        {"4  endpoint stays on the wall", c4},
        {"5  extension smoothness", c5},
        {"6  compatibility gate", c6},
        {"7  helix dispersion oracle", c7},
        {"8  ring translation oracle", c8},
        {"9  convergence order", c9},
        {"10 curvature/torsion and NLS residual", c10},
        {"11 scheme independence (midpoint)", c11},
        {"12 determinism", c12},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %-40s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
