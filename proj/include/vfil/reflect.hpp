#pragma once

#include "vfil/geometry.hpp"

namespace vfil {

/// (w1, w2, w3) -> (w1, w2, -w3)
constexpr Vec3 bar(const Vec3& w) { return {w.x, w.y, -w.z}; }

/// (Tw)(s) = -bar(w(-s)) on a symmetric whole-line grid. T is an involution,
/// preserves |w| pointwise and commutes with u -> u x u_ss.
VectorField apply_T(const VectorField& w);

/// Extends half-line data to [-L, L]: v0(s) for s >= 0, -bar(v0(-s)) for s < 0.
/// The result shares h and the s = 0 node with the input and is T-fixed.
VectorField extend(const VectorField& v0);

/// Nodes with s >= 0 of a whole-line field. Left inverse of `extend`.
VectorField restrict_to_half_line(const VectorField& whole);

/// max_i max-norm of (Tu - u)_i.
double symmetry_residual(const VectorField& u);

/// |d^k ext(0+) - d^k ext(0-)| from mirrored one-sided stencils of equal accuracy.
double derivative_jump_residual(const VectorField& ext, int k, BoundaryStencil stencil = {});

/// Highest derivative order whose jump at s = 0 must vanish when the data
/// satisfies the compatibility condition of order `compat_order`: the largest
/// m with [m/2] <= compat_order, plus one.
int certified_jump_order(int compat_order);

}  // namespace vfil
