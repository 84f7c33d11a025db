#include "vfil/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace vfil {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw Error(ErrorCode::GridMismatch, "curve and tangent field live on different grids");
}

std::vector<Vec3> binormal_velocity(const VectorField& v) {
    const auto vs = deriv(v, 1);
    std::vector<Vec3> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = cross(v[i], vs[i]);
    return out;
}

std::size_t origin_node(const Grid& g) {
    const auto o = g.origin();
    if (!o) throw Error(ErrorCode::InvalidArgument, "grid has no node at s = 0");
    return *o;
}

}  // namespace

FilamentCurve initial_curve(const VectorField& v0, const Vec3& origin) {
    const double h = v0.grid().h();
    const std::size_t anchor = v0.grid().origin().value_or(0);
    std::vector<Vec3> x(v0.size());
    x[anchor] = origin;
    for (std::size_t i = anchor + 1; i < v0.size(); ++i) x[i] = x[i - 1] + (0.5 * h) * (v0[i - 1] + v0[i]);
    for (std::size_t i = anchor; i-- > 0;) x[i] = x[i + 1] - (0.5 * h) * (v0[i] + v0[i + 1]);
    return {v0.grid(), std::move(x), 0.0};
}

std::vector<FilamentCurve> reconstruct_positions(const FilamentCurve& x0, const TimeSeries& series) {
    require_same_grid(x0.grid, series.grid());
    if (x0.positions.size() != series.grid().size()) throw Error(ErrorCode::GridMismatch, "curve sample count differs from grid");

    std::vector<FilamentCurve> curves;
    const auto& times = series.times();
    const auto& snaps = series.snapshots();
    if (snaps.empty()) return curves;

    std::vector<Vec3> x = x0.positions;
    auto previous = binormal_velocity(snaps.front());
    curves.push_back({x0.grid, x, times.front()});
    for (std::size_t j = 1; j < snaps.size(); ++j) {
        auto current = binormal_velocity(snaps[j]);
        const double half_dt = 0.5 * (times[j] - times[j - 1]);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += half_dt * (previous[i] + current[i]);
        curves.push_back({x0.grid, x, times[j]});
        previous = std::move(current);
    }
    return curves;
}

Vec3 endpoint(const FilamentCurve& curve) { return curve.positions.at(origin_node(curve.grid)); }

double endpoint_height(const FilamentCurve& curve) { return endpoint(curve).z; }

double tangent_consistency_residual(const FilamentCurve& curve, const VectorField& v) {
    require_same_grid(curve.grid, v.grid());
    std::vector<Vec3> xs(curve.positions.size());
    deriv_into<Vec3>(curve.positions, xs, curve.grid.h(), 1, false);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, max_abs(xs[i] - v[i]));
    return worst;
}

double arclength_deviation(const FilamentCurve& curve) {
    const double h = curve.grid.h();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < curve.positions.size(); ++i) {
        worst = std::max(worst, std::fabs(norm(curve.positions[i + 1] - curve.positions[i]) / h - 1.0));
    }
    return worst;
}

}  // namespace vfil
