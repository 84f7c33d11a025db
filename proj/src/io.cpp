#include "vfil/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vfil::io {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCode::Parse, key + ": expected a boolean, got '" + v + "'");
}

long parse_long(const std::string& key, const std::string& v) {
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw Error(ErrorCode::Parse, key + ": expected an integer, got '" + v + "'");
    return out;
}

GridKind parse_kind(const std::string& v) {
    if (v == "half-line") return GridKind::HalfLine;
    if (v == "whole-line") return GridKind::WholeLine;
    if (v == "periodic") return GridKind::Periodic;
    throw Error(ErrorCode::Parse, "grid.kind must be half-line, whole-line or periodic, got '" + v + "'");
}

std::string grid_comment(const Grid& g) {
    return "# grid kind=" + std::string(to_string(g.kind())) + " s_min=" + format_double(g.s_min()) +
           " length=" + format_double(g.s_max() - g.s_min()) + " n=" + std::to_string(g.size());
}

std::optional<Grid> parse_grid_comment(const std::string& line) {
    if (line.rfind("# grid", 0) != 0) return std::nullopt;
    std::map<std::string, std::string> kv;
    std::istringstream is(line.substr(6));
    std::string item;
    while (is >> item) {
        const auto eq = item.find('=');
        if (eq != std::string::npos) kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    for (const char* key : {"kind", "s_min", "length", "n"}) {
        if (!kv.contains(key)) throw Error(ErrorCode::Parse, std::string("grid comment lacks ") + key);
    }
    const GridKind kind = parse_kind(kv["kind"]);
    const double s_min = parse_double(kv["s_min"]);
    const double length = parse_double(kv["length"]);
    const auto n = static_cast<std::size_t>(parse_long("n", kv["n"]));
    switch (kind) {
        case GridKind::HalfLine: return Grid::half_line(length, n);
        case GridKind::WholeLine: return Grid::whole_line(0.5 * length, n);
        case GridKind::Periodic: return Grid::periodic(s_min, length, n);
    }
    return std::nullopt;
}

Grid infer_grid(const std::vector<double>& s) {
    if (s.size() < Grid::min_points) throw Error(ErrorCode::GridTooSmall, "too few samples");
    const std::size_t n = s.size();
    Grid g = s.front() == 0.0 ? Grid::half_line(s.back(), n)
             : s.front() == -s.back() ? Grid::whole_line(s.back(), n)
                                      : throw Error(ErrorCode::Parse, "cannot infer grid; add a '# grid' comment line");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(g.s(i) - s[i]) > 1e-9 * std::max(1.0, std::fabs(s.back()))) {
            throw Error(ErrorCode::Parse, "samples are not on a uniform grid");
        }
    }
    return g;
}

struct CsvTable {
    std::optional<Grid> grid;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_table(std::istream& is) {
    CsvTable t;
    std::string line;
    while (std::getline(is, line)) {
        const std::string l = trim(line);
        if (l.empty()) continue;
        if (l[0] == '#') {
            if (auto g = parse_grid_comment(l)) t.grid = g;
            continue;
        }
        if (t.header.empty()) {
            t.header = split(l, ',');
            continue;
        }
        const auto cells = split(l, ',');
        if (cells.size() != t.header.size()) throw Error(ErrorCode::Parse, "row width differs from header");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_double(c));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw Error(ErrorCode::Parse, "empty CSV");
    return t;
}

std::size_t column(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == name) return i;
    }
    throw Error(ErrorCode::Parse, "missing column '" + name + "'");
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(ErrorCode::Parse, "bad number '" + s + "'");
    return v;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string l = trim(line);
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected key = value");
        kv[trim(std::string_view(l).substr(0, eq))] = trim(std::string_view(l).substr(eq + 1));
    }
    return kv;
}

RunSpec parse_run_spec(const std::map<std::string, std::string>& kv) {
    RunSpec spec;
    auto& sim = spec.sim;
    bool kind_given = false, length_given = false, n_given = false;
    std::string family_name, family_params;
    for (const auto& [key, value] : kv) {
        if (key == "grid.kind") { sim.kind = parse_kind(value); kind_given = true; }
        else if (key == "grid.L") { sim.length = parse_double(value); length_given = true; }
        else if (key == "grid.n") { sim.n = static_cast<std::size_t>(parse_long(key, value)); n_given = true; }
        else if (key == "time.dt") sim.dt = parse_double(value);
        else if (key == "time.t_final") sim.t_final = parse_double(value);
        else if (key == "time.monitor_every") sim.monitor_every = static_cast<int>(parse_long(key, value));
        else if (key == "time.snapshot_every") sim.snapshot_every = static_cast<int>(parse_long(key, value));
        else if (key == "time.renormalize_every") sim.renormalize_every = static_cast<int>(parse_long(key, value));
        else if (key == "scheme") sim.scheme = parse_scheme(value);
        else if (key == "data.family") family_name = value;
        else if (key == "data.params") family_params = value;
        else if (key == "data.file") spec.data_file = value;
        else if (key == "data.strict") sim.strict = parse_bool(key, value);
        else if (key == "data.compat_order") sim.compat_order = static_cast<int>(parse_long(key, value));
        else if (key == "tolerances.norm") sim.tol.norm = parse_double(value);
        else if (key == "tolerances.boundary") sim.tol.boundary = parse_double(value);
        else if (key == "tolerances.symmetry") sim.tol.symmetry = parse_double(value);
        else if (key == "tolerances.endpoint") sim.tol.endpoint = parse_double(value);
        else if (key == "tolerances.fixed_point") sim.tol.fixed_point = parse_double(value);
        else if (key == "tolerances.fixed_point_max_iter") sim.tol.fixed_point_max_iter = static_cast<int>(parse_long(key, value));
        else if (key == "tolerances.compat") sim.tol.compat = parse_double(value);
        else if (key == "tolerances.wall") sim.tol.wall = parse_double(value);
        else if (key == "output.dir") spec.out_dir = value;
        else if (key == "output.reconstruct") spec.reconstruct = parse_bool(key, value);
        else if (key == "output.snapshots") spec.write_snapshots = parse_bool(key, value);
        else throw Error(ErrorCode::Parse, "unknown config key '" + key + "'");
    }
    if (!family_name.empty() && spec.data_file) throw Error(ErrorCode::Parse, "data.family and data.file are exclusive");
    if (family_name.empty() && !spec.data_file) throw Error(ErrorCode::Parse, "config needs data.family or data.file");
    if (!family_name.empty()) {
        spec.family = FamilySpec::parse(family_params.empty() ? family_name : family_name + ":" + family_params);
        // Grid keys left out fall back to the family's own grid one by one.
        const Grid g = default_grid(*spec.family);
        if (!kind_given) sim.kind = g.kind();
        if (!length_given) sim.length = g.kind() == GridKind::Periodic ? g.s_max() - g.s_min() : g.s_max();
        if (!n_given) sim.n = g.size();
    }
    return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) { return parse_run_spec(parse_key_values(read_text(path))); }

std::map<std::string, std::string> echo(const RunSpec& spec) {
    const auto& sim = spec.sim;
    std::map<std::string, std::string> kv{
        {"grid.kind", to_string(sim.kind)},
        {"grid.L", format_double(sim.length)},
        {"grid.n", std::to_string(sim.n)},
        {"time.t_final", format_double(sim.t_final)},
        {"time.monitor_every", std::to_string(sim.monitor_every)},
        {"time.snapshot_every", std::to_string(sim.snapshot_every)},
        {"time.renormalize_every", std::to_string(sim.renormalize_every)},
        {"scheme", to_string(sim.scheme)},
        {"data.strict", sim.strict ? "true" : "false"},
        {"data.compat_order", std::to_string(sim.compat_order)},
        {"tolerances.norm", format_double(sim.tol.norm)},
        {"tolerances.boundary", format_double(sim.tol.boundary)},
        {"tolerances.symmetry", format_double(sim.tol.symmetry)},
        {"tolerances.endpoint", format_double(sim.tol.endpoint)},
        {"tolerances.fixed_point", format_double(sim.tol.fixed_point)},
        {"tolerances.fixed_point_max_iter", std::to_string(sim.tol.fixed_point_max_iter)},
        {"tolerances.compat", format_double(sim.tol.compat)},
        {"tolerances.wall", format_double(sim.tol.wall)},
        {"output.dir", spec.out_dir.string()},
        {"output.reconstruct", spec.reconstruct ? "true" : "false"},
        {"output.snapshots", spec.write_snapshots ? "true" : "false"},
    };
    if (sim.dt) kv["time.dt"] = format_double(*sim.dt);
    if (spec.family) {
        kv["data.family"] = spec.family->name;
        const auto full = spec.family->to_string();
        if (const auto colon = full.find(':'); colon != std::string::npos) kv["data.params"] = full.substr(colon + 1);
    }
    if (spec.data_file) kv["data.file"] = spec.data_file->string();
    return kv;
}

std::string to_config_text(const std::map<std::string, std::string>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

RunResult run_simulation(const RunSpec& spec_in) {
    RunSpec spec = spec_in;
    auto& sim = spec.sim;
    const auto started = std::chrono::steady_clock::now();

    std::optional<VectorField> data;
    if (spec.data_file) {
        data = load_field_csv(*spec.data_file);
        const Grid& g = data->grid();
        sim.kind = g.kind();
        sim.length = g.kind() == GridKind::Periodic ? g.s_max() - g.s_min() : g.s_max();
        sim.n = g.size();
    } else {
        data = builtin_initial_data(*spec.family, sim.make_grid());
    }

    std::optional<CompatibilityReport> compat;
    std::optional<TimeSeries> half;
    TimeSeries trajectory(data->grid(), sim.scheme, 0.0);
    if (sim.kind == GridKind::HalfLine) {
        if (spec.family) {
            const auto checked = builtin_initial_data(*spec.family, default_check_grid());
            compat = check_A(checked, sim.compat_order, sim.tol.compat);
            if (sim.strict && !compat->passed()) {
                throw Error(ErrorCode::CompatibilityRejected,
                            "initial data fails the compatibility condition at order " + std::to_string(*compat->first_failed_order()));
            }
            sim.strict = false;
        } else if (!sim.strict) {
            compat = check_A(*data, sim.compat_order, sim.tol.compat);
        }
        auto sol = solve_half_space(*data, sim);
        if (sol.gate) compat = sol.gate;
        trajectory = std::move(sol.whole);
        half = std::move(sol.half);
    } else {
        trajectory = solve_whole_line(*data, sim);
    }

    std::vector<FilamentCurve> curves;
    if (spec.reconstruct) {
        curves = reconstruct_positions(initial_curve(trajectory.snapshots().front()), trajectory);
    }
    RunSummary summary = invariant_suite(trajectory, spec.reconstruct ? &curves : nullptr, spec.sim, compat);
    summary.config = echo(spec_in);
    summary.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return {std::move(trajectory), std::move(half), std::move(curves), std::move(summary)};
}

// CSV ----------------------------------------------------------------------

void write_field_csv(std::ostream& os, const VectorField& field) {
    os << grid_comment(field.grid()) << "\ns,v1,v2,v3\n";
    for (std::size_t i = 0; i < field.size(); ++i) {
        const Vec3 v = field[i];
        os << format_double(field.grid().s(i)) << ',' << format_double(v.x) << ',' << format_double(v.y) << ','
           << format_double(v.z) << '\n';
    }
}

VectorField read_field_csv(std::istream& is) {
    const auto t = read_table(is);
    const auto cs = column(t, "s"), c1 = column(t, "v1"), c2 = column(t, "v2"), c3 = column(t, "v3");
    std::optional<std::size_t> ct;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == "t") ct = i;
    }
    std::vector<double> s;
    std::vector<Vec3> v;
    for (const auto& row : t.rows) {
        // Snapshot files hold several times; take the first one.
        if (ct && row[*ct] != t.rows.front()[*ct]) break;
        s.push_back(row[cs]);
        v.push_back({row[c1], row[c2], row[c3]});
    }
    const Grid g = t.grid ? *t.grid : infer_grid(s);
    return VectorField(g, std::move(v));
}

void save_field_csv(const std::filesystem::path& path, const VectorField& field) {
    std::ostringstream os;
    write_field_csv(os, field);
    write_text(path, os.str());
}

VectorField load_field_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_field_csv(is);
}

void write_snapshots_csv(std::ostream& os, const TimeSeries& series, const std::vector<FilamentCurve>* curves) {
    if (curves && curves->size() != series.snapshots().size()) throw Error(ErrorCode::GridMismatch, "one curve per snapshot expected");
    os << grid_comment(series.grid()) << "\nt,s,v1,v2,v3";
    if (curves) os << ",x1,x2,x3";
    os << '\n';
    const auto& g = series.grid();
    for (std::size_t j = 0; j < series.snapshots().size(); ++j) {
        const auto t = format_double(series.times()[j]);
        const auto& snap = series.snapshots()[j];
        for (std::size_t i = 0; i < snap.size(); ++i) {
            const Vec3 v = snap[i];
            os << t << ',' << format_double(g.s(i)) << ',' << format_double(v.x) << ',' << format_double(v.y) << ','
               << format_double(v.z);
            if (curves) {
                const Vec3 x = (*curves)[j].positions[i];
                os << ',' << format_double(x.x) << ',' << format_double(x.y) << ',' << format_double(x.z);
            }
            os << '\n';
        }
    }
}

TimeSeries read_snapshots_csv(std::istream& is) {
    const auto t = read_table(is);
    const auto ct = column(t, "t"), cs = column(t, "s"), c1 = column(t, "v1"), c2 = column(t, "v2"), c3 = column(t, "v3");
    std::vector<std::pair<double, std::vector<Vec3>>> groups;
    std::vector<double> s_first;
    for (const auto& row : t.rows) {
        if (groups.empty() || row[ct] != groups.back().first) groups.push_back({row[ct], {}});
        if (groups.size() == 1) s_first.push_back(row[cs]);
        groups.back().second.push_back({row[c1], row[c2], row[c3]});
    }
    if (groups.empty()) throw Error(ErrorCode::Parse, "no snapshot rows");
    const Grid g = t.grid ? *t.grid : infer_grid(s_first);
    const double dt = groups.size() > 1 ? groups[1].first - groups[0].first : 0.0;
    TimeSeries series(g, Scheme::Rk4Project, dt);
    long index = 0;
    for (auto& [time, values] : groups) series.add_snapshot(time, index++, VectorField(g, std::move(values)));
    return series;
}

void write_telemetry_csv(std::ostream& os, const TimeSeries& series) {
    os << "step,t,norm_drift,symmetry_residual,boundary_error,v1_0,v2_0,v3_0,wall_residual,bending_energy\n";
    for (const auto& r : series.telemetry()) {
        os << r.step << ',' << format_double(r.t) << ',' << format_double(r.norm_drift) << ',' << fmt_opt(r.symmetry_residual)
           << ',' << fmt_opt(r.boundary_error) << ',';
        if (r.boundary_value) {
            os << format_double(r.boundary_value->x) << ',' << format_double(r.boundary_value->y) << ','
               << format_double(r.boundary_value->z);
        } else {
            os << ",,";
        }
        os << ',' << fmt_opt(r.wall_residual) << ',' << format_double(r.bending_energy) << '\n';
    }
}

// JSON ---------------------------------------------------------------------

namespace {

nlohmann::json max_json(const MaxRecord& m) { return {{"value", m.value}, {"step", m.step}, {"t", m.t}}; }

}  // namespace

nlohmann::json to_json(const CompatibilityReport& report) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : report.a_residuals) {
        a.push_back({{"k", r.k},
                     {"residual", r.residual},
                     {"coarse_residual", std::isnan(r.coarse_residual) ? nlohmann::json() : nlohmann::json(r.coarse_residual)},
                     {"within_tolerance", r.within_tolerance},
                     {"refines", r.refines},
                     {"pass", r.pass()}});
    }
    nlohmann::json d = nlohmann::json::array();
    for (const auto& r : report.d_residuals) d.push_back({{"j", r.j}, {"l", r.l}, {"residual", r.residual}, {"pass", r.pass}});
    return {{"max_order", report.max_order},
            {"tolerance", report.tolerance},
            {"norm_residual", report.norm_residual},
            {"a_residuals", a},
            {"d_residuals", d},
            {"d_skipped", report.d_skipped},
            {"passed", report.passed()}};
}

nlohmann::json to_json(const RunSummary& s, bool include_timing) {
    nlohmann::json j;
    j["config"] = s.config;
    j["grid_kind"] = s.grid_kind;
    j["steps"] = s.steps;
    j["dt"] = s.dt;
    j["norm_drift"] = max_json(s.norm_drift);
    j["bending_energy_drift"] = max_json(s.bending_energy_drift);
    if (s.has_wall) {
        j["symmetry_residual"] = max_json(s.symmetry_residual);
        j["boundary_error"] = max_json(s.boundary_error);
        j["boundary_transverse"] = max_json(s.boundary_transverse);
        j["boundary_axial"] = max_json(s.boundary_axial);
        j["wall_residual"] = max_json(s.wall_residual);
    }
    if (s.has_curves) {
        j["endpoint_height"] = max_json(s.endpoint_height);
        j["arclength_deviation"] = max_json(s.arclength_deviation);
        nlohmann::json track = nlohmann::json::array();
        for (const auto& e : s.endpoint_track) track.push_back({e.t, e.position.x, e.position.y, e.position.z});
        j["endpoint_track"] = track;
    }
    if (!s.oracle_errors.empty()) j["oracle_errors"] = s.oracle_errors;
    if (!s.convergence_orders.empty()) j["convergence_orders"] = s.convergence_orders;
    j["verdicts"] = s.verdicts;
    j["passed"] = s.passed();
    j["root_cause"] = s.root_cause ? nlohmann::json(*s.root_cause) : nlohmann::json();
    if (s.compat) j["compatibility"] = to_json(*s.compat);
    if (include_timing) j["wall_clock_seconds"] = s.wall_clock_seconds;
    return j;
}

nlohmann::json to_json(const StudyResult& study) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : study.levels) levels.push_back({{"n", l.n}, {"h", l.h}, {"dt", l.dt}, {"error", l.error}});
    return {{"case", study.name},
            {"levels", levels},
            {"order", study.order ? nlohmann::json(*study.order) : nlohmann::json()},
            {"exact", study.exact}};
}

nlohmann::json to_json(const OracleResult& o) {
    return {{"oracle", o.name}, {"measured", o.measured}, {"expected", o.expected}, {"error", o.error}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
    os << text;
    if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace vfil::io
