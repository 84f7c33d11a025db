#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "vfil/compat.hpp"
#include "vfil/evolve.hpp"
#include "vfil/harness.hpp"
#include "vfil/reconstruct.hpp"

#include <json.hpp>

namespace vfil::io {

/// Flat `key = value` text, `#` starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Everything a `simulate` run needs, resolved from a key-value config.
struct RunSpec {
    SimConfig sim;
    std::optional<FamilySpec> family;
    std::optional<std::filesystem::path> data_file;
    bool reconstruct = false;
    bool write_snapshots = true;
    std::filesystem::path out_dir = "out";
};

/// Recognised keys: grid.kind, grid.L, grid.n, time.dt, time.t_final,
/// time.monitor_every, time.snapshot_every, time.renormalize_every, scheme,
/// data.family, data.params, data.file, data.strict, data.compat_order,
/// tolerances.{norm,boundary,symmetry,endpoint,fixed_point,fixed_point_max_iter,compat,wall},
/// output.dir, output.reconstruct, output.snapshots.
RunSpec parse_run_spec(const std::map<std::string, std::string>& kv);
RunSpec load_run_spec(const std::filesystem::path& path);

/// Effective configuration as key-value pairs; feeding it back through
/// parse_run_spec reproduces the same run.
std::map<std::string, std::string> echo(const RunSpec& spec);
std::string to_config_text(const std::map<std::string, std::string>& kv);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Outputs of one configured run.
struct RunResult {
    /// Trajectory the invariants are evaluated on (the mirrored whole-line run for half-space data).
    TimeSeries trajectory;
    /// Restriction to s >= 0 for half-space runs.
    std::optional<TimeSeries> half;
    /// Reconstructed positions on the trajectory grid, one per snapshot, when requested.
    std::vector<FilamentCurve> curves;
    RunSummary summary;
};

/// Builds the initial data, applies the far-field and compatibility gates,
/// evolves, reconstructs and summarises. Builtin half-line families are
/// checked on default_check_grid(); sampled data is checked as given.
RunResult run_simulation(const RunSpec& spec);

// CSV ----------------------------------------------------------------------

/// `# grid ...` comment, header `s,v1,v2,v3`, one row per node.
void write_field_csv(std::ostream& os, const VectorField& field);
VectorField read_field_csv(std::istream& is);
void save_field_csv(const std::filesystem::path& path, const VectorField& field);
VectorField load_field_csv(const std::filesystem::path& path);

/// Header `t,s,v1,v2,v3`, plus `x1,x2,x3` when curves are given.
void write_snapshots_csv(std::ostream& os, const TimeSeries& series, const std::vector<FilamentCurve>* curves = nullptr);
/// Reads snapshots back into a series (telemetry is not stored in this file).
TimeSeries read_snapshots_csv(std::istream& is);

void write_telemetry_csv(std::ostream& os, const TimeSeries& series);

// JSON ---------------------------------------------------------------------

nlohmann::json to_json(const CompatibilityReport& report);
nlohmann::json to_json(const RunSummary& summary, bool include_timing = false);
nlohmann::json to_json(const StudyResult& study);
nlohmann::json to_json(const OracleResult& oracle);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace vfil::io
