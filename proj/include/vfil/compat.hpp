#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfil/geometry.hpp"

namespace vfil {

// ---------------------------------------------------------------------------
// Closed-form initial data

/// A builtin tangent-field family with its numeric parameters, written on the
/// command line as `name` or `name:key=value,key=value`.
struct FamilySpec {
    std::string name;
    std::map<std::string, double> params;

    static FamilySpec parse(std::string_view text);
    std::string to_string() const;
    double param(const std::string& key, double fallback) const;

    friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

/// straight | planar_odd(a) | planar_bad(a, b) | helix(a, c, k) | ring(r).
///
/// planar_odd turns the tangent in the (e1, e3) plane by the odd angle
/// a*s*exp(-s^2), so every even s-derivative of its first two components
/// vanishes at s = 0. planar_bad adds b*s^2*exp(-s^2) to the angle, which
/// keeps v(0) = e3 but breaks the order-1 condition. helix and ring are
/// whole-line/periodic oracles and do not satisfy v(0) = e3.
VectorField builtin_initial_data(const FamilySpec& family, const Grid& grid);

/// Grid a family is simulated on when nothing else is requested.
Grid default_grid(const FamilySpec& family);

/// Finer half-line grid used when a family is handed to the compatibility checker.
Grid default_check_grid();

bool is_half_line_family(const FamilySpec& family);

// ---------------------------------------------------------------------------
// Compatibility report

struct OrderResidual {
    int k = 0;
    double residual = 0.0;
    /// Same residual on the every-other-node subsample; NaN when the subsample is too short.
    double coarse_residual = 0.0;
    bool within_tolerance = false;
    bool refines = false;

    bool pass() const { return within_tolerance && refines; }
};

struct PairResidual {
    int j = 0;
    int l = 0;
    double residual = 0.0;
    bool pass = false;
};

struct CompatibilityReport {
    int max_order = 0;
    double tolerance = 0.0;
    std::vector<OrderResidual> a_residuals;
    std::vector<PairResidual> d_residuals;
    /// Pairs whose derivative order exceeds the boundary stencil's k_max.
    int d_skipped = 0;
    double norm_residual = 0.0;

    bool passed() const;
    std::optional<int> first_failed_order() const;
};

struct CompatOptions {
    BoundaryStencil stencil{8, 4};
    bool refinement_check = true;
    /// Residuals below refinement_floor * tol count as converged without the
    /// refinement comparison; at that level both grids sit on roundoff.
    double refinement_floor = 1e-3;
};

inline constexpr double default_compat_tolerance = 1e-6;

/// Residuals of v0(0) = e3 (k = 0) and v0 x d^{2k}v0 = 0 at s = 0 (k >= 1) for k = 0..n.
CompatibilityReport check_A(const VectorField& v0, int n, double tol = default_compat_tolerance, const CompatOptions& opts = {});

/// Residuals of d^j v0 . d^l v0 at s = 0 for j + l odd, j + l <= 2n + 1. A
/// consequence of the A conditions, reported as a consistency diagnostic.
CompatibilityReport check_D(const VectorField& v0, int n, double tol = default_compat_tolerance, const CompatOptions& opts = {});

/// check_A and check_D merged into one report.
CompatibilityReport check_compatibility(const VectorField& v0, int n, double tol = default_compat_tolerance, const CompatOptions& opts = {});

/// Order of the A condition needed for a solution with extra smoothness m: [(2 + m) / 2].
int required_order_for_smoothness(int m);

/// Mean |v0 - e3| over the outer 10% of the nodes (at least one node).
double far_field_deviation(const VectorField& v0);

inline constexpr double far_field_tolerance = 1e-3;

}  // namespace vfil
