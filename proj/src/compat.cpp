#include "vfil/compat.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace vfil {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::Parse, "bad number '" + std::string(s) + "'");
    }
    return v;
}

const std::map<std::string, std::set<std::string>>& known_families() {
    static const std::map<std::string, std::set<std::string>> families{
        {"straight", {}},
        {"planar_odd", {"a"}},
        {"planar_bad", {"a", "b"}},
        {"helix", {"a", "c", "k"}},
        {"ring", {"r"}},
    };
    return families;
}

void validate(const FamilySpec& f) {
    const auto it = known_families().find(f.name);
    if (it == known_families().end()) throw Error(ErrorCode::UnknownFamily, "unknown family '" + f.name + "'");
    for (const auto& [key, value] : f.params) {
        if (!it->second.contains(key)) {
            throw Error(ErrorCode::InvalidArgument, "family " + f.name + " has no parameter '" + key + "'");
        }
    }
}

}  // namespace

FamilySpec FamilySpec::parse(std::string_view text) {
    text = trim(text);
    FamilySpec spec;
    std::string_view rest;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
        spec.name = std::string(trim(text.substr(0, colon)));
        rest = text.substr(colon + 1);
    } else if (const auto paren = text.find('('); paren != std::string_view::npos) {
        if (text.back() != ')') throw Error(ErrorCode::Parse, "unbalanced parenthesis in '" + std::string(text) + "'");
        spec.name = std::string(trim(text.substr(0, paren)));
        rest = text.substr(paren + 1, text.size() - paren - 2);
    } else {
        spec.name = std::string(text);
    }
    while (!trim(rest).empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw Error(ErrorCode::Parse, "expected key=value, got '" + std::string(item) + "'");
        spec.params[std::string(trim(item.substr(0, eq)))] = to_double(item.substr(eq + 1));
    }
    validate(spec);
    return spec;
}

std::string FamilySpec::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << name;
    char sep = ':';
    for (const auto& [key, value] : params) {
        os << sep << key << '=' << value;
        sep = ',';
    }
    return os.str();
}

double FamilySpec::param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

bool is_half_line_family(const FamilySpec& family) {
    return family.name == "straight" || family.name == "planar_odd" || family.name == "planar_bad";
}

VectorField builtin_initial_data(const FamilySpec& family, const Grid& grid) {
    validate(family);
    const std::size_t n = grid.size();
    std::vector<Vec3> v(n);

    if (family.name == "straight") {
        std::fill(v.begin(), v.end(), e3);
    } else if (family.name == "planar_odd" || family.name == "planar_bad") {
        const double a = family.param("a", 0.5);
        const double b = family.name == "planar_bad" ? family.param("b", 1.0) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = grid.s(i);
            const double angle = (a * s + b * s * s) * std::exp(-s * s);
            v[i] = {std::sin(angle), 0.0, std::cos(angle)};
        }
    } else if (family.name == "helix") {
        const double a = family.param("a", 0.6);
        const double c = family.param("c", 0.8);
        const double k = family.param("k", 2.0);
        if (std::fabs(a * a + c * c - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "helix needs a^2 + c^2 = 1");
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = k * grid.s(i);
            v[i] = project_unit({a * std::cos(phase), a * std::sin(phase), c});
        }
    } else if (family.name == "ring") {
        const double r = family.param("r", 1.0);
        if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "ring radius must be positive");
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = grid.s(i) / r;
            v[i] = {-std::sin(phase), std::cos(phase), 0.0};
        }
    }
    return VectorField(grid, std::move(v));
}

Grid default_grid(const FamilySpec& family) {
    validate(family);
    if (family.name == "helix") return Grid::periodic(0.0, 2.0 * std::numbers::pi, 256);
    if (family.name == "ring") return Grid::periodic(0.0, 2.0 * std::numbers::pi * family.param("r", 1.0), 256);
    return Grid::half_line(20.0, 512);
}

Grid default_check_grid() { return Grid::half_line(10.0, 1001); }

int required_order_for_smoothness(int m) {
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "smoothness order must be non-negative");
    return (2 + m) / 2;
}

// ---------------------------------------------------------------------------

bool CompatibilityReport::passed() const {
    for (const auto& r : a_residuals) {
        if (!r.pass()) return false;
    }
    return true;
}

std::optional<int> CompatibilityReport::first_failed_order() const {
    for (const auto& r : a_residuals) {
        if (!r.pass()) return r.k;
    }
    return std::nullopt;
}

namespace {

void require_half_line(const VectorField& v0) {
    if (v0.grid().kind() != GridKind::HalfLine) throw Error(ErrorCode::InvalidArgument, "compatibility check needs half-line data");
}

void require_order(int n, const CompatOptions& opts) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative compatibility order");
    if (2 * n > opts.stencil.k_max) {
        throw Error(ErrorCode::OrderTooHigh, "order " + std::to_string(n) + " needs derivative " + std::to_string(2 * n) +
                                                 " > k_max " + std::to_string(opts.stencil.k_max));
    }
}

double a_residual(const VectorField& v, int k, const BoundaryStencil& stencil) {
    const Vec3 trace = v[0];
    if (k == 0) return norm(trace - e3);
    return norm(cross(trace, one_sided_deriv(v, 0, 2 * k, Side::Right, stencil)));
}

std::optional<VectorField> subsample(const VectorField& v) {
    const std::size_t count = (v.size() + 1) / 2;
    if (count < Grid::min_points) return std::nullopt;
    std::vector<Vec3> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = v[2 * i];
    return VectorField(Grid::half_line(v.grid().s(2 * (count - 1)), count), std::move(out));
}

double norm_gate(const VectorField& v0) {
    const double dev = max_norm_deviation(v0);
    if (dev > 0.1) throw Error(ErrorCode::NotUnitField, "samples are not unit vectors (max deviation " + std::to_string(dev) + ")");
    return dev;
}

}  // namespace

CompatibilityReport check_A(const VectorField& v0, int n, double tol, const CompatOptions& opts) {
    require_half_line(v0);
    require_order(n, opts);
    if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be non-negative");

    CompatibilityReport report;
    report.max_order = n;
    report.tolerance = tol;
    report.norm_residual = norm_gate(v0);

    const auto coarse = opts.refinement_check ? subsample(v0) : std::nullopt;
    for (int k = 0; k <= n; ++k) {
        OrderResidual r;
        r.k = k;
        r.residual = a_residual(v0, k, opts.stencil);
        r.within_tolerance = r.residual <= tol;
        r.coarse_residual = std::numeric_limits<double>::quiet_NaN();
        r.refines = true;
        if (coarse && coarse->size() >= static_cast<std::size_t>(2 * k + opts.stencil.accuracy)) {
            r.coarse_residual = a_residual(*coarse, k, opts.stencil);
            r.refines = r.residual <= r.coarse_residual || r.residual <= opts.refinement_floor * tol;
        }
        report.a_residuals.push_back(r);
    }
    return report;
}

CompatibilityReport check_D(const VectorField& v0, int n, double tol, const CompatOptions& opts) {
    require_half_line(v0);
    require_order(n, opts);

    CompatibilityReport report;
    report.max_order = n;
    report.tolerance = tol;
    report.norm_residual = norm_gate(v0);

    std::vector<std::optional<Vec3>> traces(static_cast<std::size_t>(2 * n + 2));
    auto trace = [&](int k) -> const Vec3& {
        auto& slot = traces[static_cast<std::size_t>(k)];
        if (!slot) slot = one_sided_deriv(v0, 0, k, Side::Right, opts.stencil);
        return *slot;
    };
    for (int total = 1; total <= 2 * n + 1; total += 2) {
        for (int j = 0; 2 * j < total; ++j) {
            const int l = total - j;
            if (l > opts.stencil.k_max) {
                ++report.d_skipped;
                continue;
            }
            const double r = std::fabs(dot(trace(j), trace(l)));
            report.d_residuals.push_back({j, l, r, r <= tol});
        }
    }
    return report;
}

CompatibilityReport check_compatibility(const VectorField& v0, int n, double tol, const CompatOptions& opts) {
    auto report = check_A(v0, n, tol, opts);
    auto d = check_D(v0, n, tol, opts);
    report.d_residuals = std::move(d.d_residuals);
    report.d_skipped = d.d_skipped;
    return report;
}

double far_field_deviation(const VectorField& v0) {
    const std::size_t n = v0.size();
    const std::size_t window = std::max<std::size_t>(1, n / 10);
    double sum = 0.0;
    for (std::size_t i = n - window; i < n; ++i) sum += norm(v0[i] - e3);
    return sum / static_cast<double>(window);
}

}  // namespace vfil
