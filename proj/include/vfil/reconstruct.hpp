#pragma once

#include <vector>

#include "vfil/evolve.hpp"
#include "vfil/geometry.hpp"

namespace vfil {

/// Filament positions x(s, t) sampled on the tangent field's grid.
struct FilamentCurve {
    Grid grid;
    std::vector<Vec3> positions;
    double t = 0.0;
};

/// x0 by cumulative trapezoid integration of v0, anchored at the s = 0 node
/// (or the first node when the grid has none).
FilamentCurve initial_curve(const VectorField& v0, const Vec3& origin = {});

/// x(s, t_j) = x0(s) + int_0^{t_j} v x v_s dtau, trapezoid rule over the recorded snapshots.
std::vector<FilamentCurve> reconstruct_positions(const FilamentCurve& x0, const TimeSeries& series);

/// x3 at the s = 0 node.
double endpoint_height(const FilamentCurve& curve);

/// Position of the s = 0 node.
Vec3 endpoint(const FilamentCurve& curve);

/// max-norm of d_s x - v. Positions are differenced without wrap-around even on
/// periodic grids, since x itself need not be periodic.
double tangent_consistency_residual(const FilamentCurve& curve, const VectorField& v);

/// max_i | |x_{i+1} - x_i| / h - 1 |
double arclength_deviation(const FilamentCurve& curve);

}  // namespace vfil
