// vfil: compatibility checks, reflection, simulation and diagnostics for a
// vortex filament attached to a plane wall.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vfil/compat.hpp"
#include "vfil/evolve.hpp"
#include "vfil/harness.hpp"
#include "vfil/hasimoto.hpp"
#include "vfil/io.hpp"
#include "vfil/reconstruct.hpp"
#include "vfil/reflect.hpp"

namespace fs = std::filesystem;
using namespace vfil;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_rejected = 2;
constexpr int exit_numerical = 3;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::CompatibilityRejected: return exit_rejected;
        case ErrorCode::StabilityViolated:
        case ErrorCode::FixedPointDiverged:
        case ErrorCode::DegenerateVector:
        case ErrorCode::MaskFragmented: return exit_numerical;
        default: return exit_usage;
    }
}

struct DataSource {
    std::string family;
    std::string file;

    void add_to(CLI::App* cmd) {
        auto* fam = cmd->add_option("--family", family, "builtin family, e.g. planar_odd:a=0.5");
        auto* fil = cmd->add_option("--file", file, "sampled data CSV with columns s,v1,v2,v3");
        fam->excludes(fil);
    }

    /// Sampled field: the file as given, or the family on `grid_for(family)`.
    template <class GridFor>
    VectorField load(GridFor grid_for) const {
        if (!file.empty()) return io::load_field_csv(file);
        if (family.empty()) throw Error(ErrorCode::InvalidArgument, "give --family or --file");
        const auto spec = FamilySpec::parse(family);
        return builtin_initial_data(spec, grid_for(spec));
    }
};

void emit(const nlohmann::json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        io::write_text(out, j.dump(2) + "\n");
    }
}

std::vector<std::size_t> parse_levels(const std::string& text) {
    std::vector<std::size_t> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double v = io::parse_double(item);
        if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw Error(ErrorCode::Parse, "bad level '" + item + "'");
        }
        levels.push_back(static_cast<std::size_t>(v));
    }
    return levels;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::Parse, "expected key=value, got '" + item + "'");
        out[item.substr(0, eq)] = io::parse_double(item.substr(eq + 1));
    }
    return out;
}

// --------------------------------------------------------------------------

struct CheckArgs {
    DataSource data;
    int order = 1;
    int smoothness = -1;
    double tol = default_compat_tolerance;
    bool strict = false;
    std::string out;
};

int run_check(const CheckArgs& a) {
    const auto v0 = a.data.load([](const FamilySpec& f) {
        if (!is_half_line_family(f)) throw Error(ErrorCode::InvalidArgument, "family '" + f.name + "' is not half-line data");
        return default_check_grid();
    });
    const int order = a.smoothness >= 0 ? required_order_for_smoothness(a.smoothness) : a.order;
    const auto report = check_compatibility(v0, order, a.tol);
    for (const auto& r : report.a_residuals) {
        std::fprintf(stderr, "A order %d: residual %.3e (half resolution %.3e) %s\n", r.k, r.residual, r.coarse_residual,
                     r.pass() ? "pass" : "FAIL");
    }
    std::fprintf(stderr, "compatibility order %d: %s\n", order, report.passed() ? "pass" : "FAIL");
    emit(io::to_json(report), a.out);
    return a.strict && !report.passed() ? exit_rejected : exit_ok;
}

struct ExtendArgs {
    DataSource data;
    int order = 1;
    int k_max = 3;
    std::size_t n = 512;
    double length = 20.0;
    std::string out;
};

int run_extend(const ExtendArgs& a) {
    const auto v0 = a.data.load([&](const FamilySpec& f) {
        if (!is_half_line_family(f)) throw Error(ErrorCode::InvalidArgument, "family '" + f.name + "' is not half-line data");
        return Grid::half_line(a.length, a.n);
    });
    const auto ext = extend(v0);
    if (!a.out.empty()) io::save_field_csv(a.out, ext);
    const int certified = certified_jump_order(a.order);
    nlohmann::json jumps = nlohmann::json::array();
    for (int k = 1; k <= a.k_max; ++k) {
        const double r = derivative_jump_residual(ext, k);
        jumps.push_back({{"k", k}, {"residual", r}, {"certified", k <= certified}});
        if (k > certified) std::fprintf(stderr, "note: k = %d is beyond the order certified by order-%d data\n", k, a.order);
    }
    std::cout << nlohmann::json{{"n", ext.size()}, {"h", ext.grid().h()}, {"symmetry_residual", symmetry_residual(ext)},
                                {"jumps", jumps}}
                     .dump(2)
              << '\n';
    return exit_ok;
}

struct SimulateArgs {
    std::string config;
    bool reconstruct = false;
    std::string out;
    bool timing = false;
};

/// Curve nodes with s >= 0, matching the restricted tangent field.
FilamentCurve restrict_curve(const FilamentCurve& c, const Grid& half) {
    const std::size_t o = *c.grid.origin();
    return {half, std::vector<Vec3>(c.positions.begin() + static_cast<std::ptrdiff_t>(o), c.positions.end()), c.t};
}

int run_simulate(const SimulateArgs& a) {
    auto spec = io::load_run_spec(a.config);
    if (a.reconstruct) spec.reconstruct = true;
    if (!a.out.empty()) spec.out_dir = a.out;

    const auto result = io::run_simulation(spec);
    fs::create_directories(spec.out_dir);

    if (spec.write_snapshots) {
        const TimeSeries& shown = result.half ? *result.half : result.trajectory;
        std::vector<FilamentCurve> curves;
        if (spec.reconstruct) {
            for (const auto& c : result.curves) curves.push_back(result.half ? restrict_curve(c, shown.grid()) : c);
        }
        std::ostringstream os;
        io::write_snapshots_csv(os, shown, spec.reconstruct ? &curves : nullptr);
        io::write_text(spec.out_dir / "snapshots.csv", os.str());
    }
    std::ostringstream tele;
    io::write_telemetry_csv(tele, result.trajectory);
    io::write_text(spec.out_dir / "telemetry.csv", tele.str());
    io::write_text(spec.out_dir / "summary.json", io::to_json(result.summary, a.timing).dump(2) + "\n");

    const auto& s = result.summary;
    std::fprintf(stderr, "%ld steps, dt = %.3e, max norm drift %.3e\n", s.steps, s.dt, s.norm_drift.value);
    for (const auto& [name, ok] : s.verdicts) std::fprintf(stderr, "  %-18s %s\n", name.c_str(), ok ? "pass" : "FAIL");
    if (s.root_cause) std::fprintf(stderr, "root cause: %s\n", s.root_cause->c_str());
    return s.passed() ? exit_ok : exit_numerical;
}

struct DiagnoseArgs {
    std::string snapshots;
    double kappa_floor = default_kappa_floor;
    std::string out;
};

int run_diagnose(const DiagnoseArgs& a) {
    std::ifstream is(a.snapshots);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + a.snapshots);
    const auto series = io::read_snapshots_csv(is);

    nlohmann::json frames = nlohmann::json::array();
    std::vector<HasimotoField> fields;
    for (std::size_t j = 0; j < series.snapshots().size(); ++j) {
        const auto f = frenet(series.snapshots()[j], a.kappa_floor);
        std::size_t masked = 0;
        double kmax = 0.0, tmin = 0.0, tmax = 0.0;
        bool first = true;
        for (std::size_t i = 0; i < f.mask.size(); ++i) {
            if (!f.mask[i]) continue;
            ++masked;
            kmax = std::max(kmax, f.kappa[i]);
            tmin = first ? f.tau[i] : std::min(tmin, f.tau[i]);
            tmax = first ? f.tau[i] : std::max(tmax, f.tau[i]);
            first = false;
        }
        frames.push_back({{"t", series.times()[j]}, {"masked_nodes", masked}, {"kappa_max", kmax}, {"tau_min", tmin},
                          {"tau_max", tmax}});
        fields.push_back(hasimoto_psi(f));
    }
    nlohmann::json out{{"snapshots", frames}};
    if (fields.size() >= 3) {
        const auto r = nls_residual(fields, series.times());
        out["nls_residual"] = r.value;
        out["nls_samples"] = r.samples;
        if (r.samples == 0) std::fprintf(stderr, "warning: curvature is below the floor everywhere; residual is 0\n");
    } else {
        std::fprintf(stderr, "warning: fewer than three snapshots, no NLS residual\n");
    }
    emit(out, a.out);
    return exit_ok;
}

struct OracleArgs {
    std::string name;
    std::size_t n = 256;
    double t_final = 0.5;
    std::vector<std::string> params;
    std::string scheme = "rk4_project";
};

int run_oracle(const OracleArgs& a) {
    OracleOptions o;
    o.n = a.n;
    o.t_final = a.t_final;
    o.params = parse_params(a.params);
    o.scheme = parse_scheme(a.scheme);
    const auto r = oracle_error(a.name, o);
    auto j = io::to_json(r);
    j["pass"] = r.error <= oracle_tolerance;
    std::cout << j.dump(2) << '\n';
    return r.error <= oracle_tolerance ? exit_ok : exit_numerical;
}

struct ConvergenceArgs {
    std::string name;
    std::string levels = "64,128,256";
    double t_final = 0.5;
    std::vector<std::string> params;
    std::string scheme = "rk4_project";
};

int run_convergence(const ConvergenceArgs& a) {
    StudyOptions o;
    o.t_final = a.t_final;
    o.params = parse_params(a.params);
    o.scheme = parse_scheme(a.scheme);
    const auto levels = parse_levels(a.levels);
    const auto r = convergence_study(a.name, levels, o);
    // Residual and self-convergence studies may converge faster than the scheme order.
    const bool upper = a.name != "helix_nls" && a.name != "half_space";
    const bool ok = r.exact || (r.order && *r.order >= order_band_low && (!upper || *r.order <= order_band_high));
    auto j = io::to_json(r);
    j["pass"] = ok;
    std::cout << j.dump(2) << '\n';
    return ok ? exit_ok : exit_numerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vfil: vortex filament on a plane wall"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* c = app.add_subcommand("check", "check compatibility of half-line initial data");
    check.data.add_to(c);
    c->add_option("--order", check.order, "compatibility order n")->check(CLI::NonNegativeNumber);
    c->add_option("--smoothness", check.smoothness, "target smoothness m; checks order [(2+m)/2]")->check(CLI::NonNegativeNumber);
    c->add_option("--tol", check.tol, "residual tolerance")->check(CLI::PositiveNumber);
    c->add_flag("--strict", check.strict, "exit 2 when the data is incompatible");
    c->add_option("--out", check.out, "report JSON path (stdout when omitted)");

    ExtendArgs ext;
    auto* e = app.add_subcommand("extend", "extend half-line data to the whole line by reflection");
    ext.data.add_to(e);
    e->add_option("--order", ext.order, "compatibility order the data is known to satisfy")->check(CLI::NonNegativeNumber);
    e->add_option("--k-max", ext.k_max, "highest derivative jump to report")->check(CLI::Range(1, 4));
    e->add_option("--n", ext.n, "half-line grid points for --family");
    e->add_option("--length", ext.length, "half-line length for --family");
    e->add_option("--out", ext.out, "CSV path for the extended field");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "run a configured simulation");
    s->add_option("config", sim.config, "key = value config file")->required();
    s->add_flag("--reconstruct", sim.reconstruct, "reconstruct filament positions");
    s->add_option("--out", sim.out, "output directory (overrides output.dir)");
    s->add_flag("--timing", sim.timing, "include wall-clock time in summary.json");

    DiagnoseArgs diag;
    auto* d = app.add_subcommand("diagnose", "curvature, torsion and NLS residual of a snapshot file");
    d->add_option("snapshots", diag.snapshots, "snapshots CSV")->required();
    d->add_option("--kappa-floor", diag.kappa_floor, "curvature below which torsion is masked");
    d->add_option("--out", diag.out, "JSON path (stdout when omitted)");

    OracleArgs orc;
    auto* o = app.add_subcommand("oracle", "compare a run against a closed-form solution");
    o->add_option("name", orc.name, "helix_dispersion | ring_translation | stationary_line")->required();
    o->add_option("--n", orc.n, "grid points");
    o->add_option("--t-final", orc.t_final, "final time");
    o->add_option("--param", orc.params, "family parameter key=value");
    o->add_option("--scheme", orc.scheme, "rk4_project | midpoint_fixedpoint");

    ConvergenceArgs conv;
    auto* v = app.add_subcommand("convergence", "grid refinement study");
    v->add_option("case", conv.name, "helix | helix_nls | ring | stationary_line | half_space")->required();
    v->add_option("--levels", conv.levels, "comma-separated grid sizes");
    v->add_option("--t-final", conv.t_final, "final time");
    v->add_option("--param", conv.params, "family parameter key=value");
    v->add_option("--scheme", conv.scheme, "rk4_project | midpoint_fixedpoint");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (c->parsed()) return run_check(check);
        if (e->parsed()) return run_extend(ext);
        if (s->parsed()) return run_simulate(sim);
        if (d->parsed()) return run_diagnose(diag);
        if (o->parsed()) return run_oracle(orc);
        if (v->parsed()) return run_convergence(conv);
    } catch (const Error& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return exit_code_for(err.code());
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return exit_usage;
    }
    return exit_usage;
}
