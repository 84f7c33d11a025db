#include "vfil/reflect.hpp"

#include <algorithm>

namespace vfil {

namespace {

void require_symmetric(const Grid& g) {
    if (g.kind() != GridKind::WholeLine) {
        throw Error(ErrorCode::GridNotSymmetric, std::string("expected a whole-line grid, got ") + to_string(g.kind()));
    }
}

}  // namespace

VectorField apply_T(const VectorField& w) {
    require_symmetric(w.grid());
    const std::size_t n = w.size();
    std::vector<Vec3> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = -bar(w[n - 1 - i]);
    return VectorField(w.grid(), std::move(out));
}

VectorField extend(const VectorField& v0) {
    if (v0.grid().kind() != GridKind::HalfLine) throw Error(ErrorCode::InvalidArgument, "extend needs half-line data");
    const std::size_t m = v0.size();
    const std::size_t n = 2 * m - 1;
    std::vector<Vec3> out(n);
    for (std::size_t j = 0; j < m; ++j) {
        out[m - 1 + j] = v0[j];
        if (j > 0) out[m - 1 - j] = -bar(v0[j]);
    }
    return VectorField(Grid::whole_line(v0.grid().s_max(), n), std::move(out));
}

VectorField restrict_to_half_line(const VectorField& whole) {
    require_symmetric(whole.grid());
    const std::size_t m = (whole.size() + 1) / 2;
    const auto values = whole.values().subspan(m - 1);
    return VectorField(Grid::half_line(whole.grid().s_max(), m), std::vector<Vec3>(values.begin(), values.end()));
}

double symmetry_residual(const VectorField& u) {
    require_symmetric(u.grid());
    const std::size_t n = u.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, max_abs(-bar(u[n - 1 - i]) - u[i]));
    return worst;
}

double derivative_jump_residual(const VectorField& ext, int k, BoundaryStencil stencil) {
    require_symmetric(ext.grid());
    const Vec3 right = one_sided_deriv_at_zero(ext, k, stencil, Side::Right);
    const Vec3 left = one_sided_deriv_at_zero(ext, k, stencil, Side::Left);
    return norm(right - left);
}

int certified_jump_order(int compat_order) {
    if (compat_order < 0) throw Error(ErrorCode::InvalidArgument, "negative compatibility order");
    return 2 * compat_order + 2;
}

}  // namespace vfil
