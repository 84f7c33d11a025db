#include "vfil/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace vfil {

const char* to_string(GridKind kind) {
    switch (kind) {
        case GridKind::HalfLine: return "half-line";
        case GridKind::WholeLine: return "whole-line";
        case GridKind::Periodic: return "periodic";
    }
    return "unknown";
}

namespace {

void require_points(std::size_t n) {
    if (n < Grid::min_points) {
        throw Error(ErrorCode::GridTooSmall, "grid needs at least " + std::to_string(Grid::min_points) + " points");
    }
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

}  // namespace

Grid Grid::half_line(double length, std::size_t n) {
    require_points(n);
    require_positive(length, "half-line length");
    return Grid(GridKind::HalfLine, 0.0, length, n, length / static_cast<double>(n - 1));
}

Grid Grid::whole_line(double half_length, std::size_t n) {
    require_points(n);
    require_positive(half_length, "whole-line half length");
    if (n % 2 == 0) throw Error(ErrorCode::GridNotSymmetric, "whole-line grid needs an odd point count");
    // Same expression as half_line(L, (n + 1) / 2) so mirrored grids share h bit for bit.
    const std::size_t centre = (n - 1) / 2;
    return Grid(GridKind::WholeLine, -half_length, half_length, n, half_length / static_cast<double>(centre));
}

Grid Grid::periodic(double s_min, double period, std::size_t n) {
    require_points(n);
    require_positive(period, "period");
    if (!std::isfinite(s_min)) throw Error(ErrorCode::InvalidArgument, "periodic s_min must be finite");
    return Grid(GridKind::Periodic, s_min, s_min + period, n, period / static_cast<double>(n));
}

double Grid::s(std::size_t i) const {
    switch (kind_) {
        case GridKind::HalfLine: return static_cast<double>(i) * h_;
        case GridKind::WholeLine: {
            const auto centre = static_cast<long long>((n_ - 1) / 2);
            return static_cast<double>(static_cast<long long>(i) - centre) * h_;
        }
        case GridKind::Periodic: return s_min_ + static_cast<double>(i) * h_;
    }
    return 0.0;
}

std::optional<std::size_t> Grid::origin() const {
    switch (kind_) {
        case GridKind::HalfLine: return 0;
        case GridKind::WholeLine: return (n_ - 1) / 2;
        case GridKind::Periodic: return s_min_ == 0.0 ? std::optional<std::size_t>(0) : std::nullopt;
    }
    return std::nullopt;
}

std::vector<double> fd_weights(int order, std::span<const double> offsets) {
    const std::size_t n = offsets.size();
    if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
    if (n < static_cast<std::size_t>(order) + 1) throw Error(ErrorCode::GridTooSmall, "stencil too short for order");

    const auto m = static_cast<std::size_t>(order);
    std::vector<std::vector<long double>> c(n, std::vector<long double>(m + 1, 0.0L));
    long double c1 = 1.0L;
    long double c4 = offsets[0];
    c[0][0] = 1.0L;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        long double c2 = 1.0L;
        const long double c5 = c4;
        c4 = offsets[i];
        for (std::size_t j = 0; j < i; ++j) {
            const long double c3 = static_cast<long double>(offsets[i]) - offsets[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (static_cast<long double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - static_cast<long double>(k) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(c[i][m]);
    return w;
}

template <class T>
void deriv_into(std::span<const T> in, std::span<T> out, double h, int order, bool periodic) {
    const std::size_t n = in.size();
    if (out.size() != n) throw Error(ErrorCode::GridMismatch, "output span size differs from input");
    if (order != 1 && order != 2) throw Error(ErrorCode::OrderTooHigh, "deriv supports orders 1 and 2");
    if (n < 4) throw Error(ErrorCode::GridTooSmall, "stencil does not fit");

    if (order == 1) {
        const double inv = 1.0 / (2.0 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (in[i + 1] - in[i - 1]) * inv;
        if (periodic) {
            out[0] = (in[1] - in[n - 1]) * inv;
            out[n - 1] = (in[0] - in[n - 2]) * inv;
        } else {
            out[0] = (-3.0 * in[0] + 4.0 * in[1] - in[2]) * inv;
            out[n - 1] = (3.0 * in[n - 1] - 4.0 * in[n - 2] + in[n - 3]) * inv;
        }
        return;
    }

    // The neighbour sum is formed first so that mirrored nodes round identically.
    const double h2 = h * h;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = ((in[i + 1] + in[i - 1]) - 2.0 * in[i]) / h2;
    if (periodic) {
        out[0] = ((in[1] + in[n - 1]) - 2.0 * in[0]) / h2;
        out[n - 1] = ((in[0] + in[n - 2]) - 2.0 * in[n - 1]) / h2;
    } else {
        out[0] = (2.0 * in[0] - 5.0 * in[1] + 4.0 * in[2] - in[3]) / h2;
        out[n - 1] = (2.0 * in[n - 1] - 5.0 * in[n - 2] + 4.0 * in[n - 3] - in[n - 4]) / h2;
    }
}

template <class T>
SampledField<T> deriv(const SampledField<T>& field, int order) {
    std::vector<T> out(field.size());
    deriv_into<T>(field.values(), out, field.grid().h(), order, field.grid().is_periodic());
    return SampledField<T>(field.grid(), std::move(out));
}

template <class T>
T one_sided_deriv(const SampledField<T>& field, std::size_t node, int k, Side side, BoundaryStencil stencil) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
    if (k > stencil.k_max) {
        throw Error(ErrorCode::OrderTooHigh, "order " + std::to_string(k) + " exceeds k_max " + std::to_string(stencil.k_max));
    }
    if (node >= field.size()) throw Error(ErrorCode::InvalidArgument, "node outside grid");
    if (k == 0) return field[node];
    if (stencil.accuracy < 2) throw Error(ErrorCode::InvalidArgument, "boundary stencil accuracy must be >= 2");

    const auto npts = static_cast<std::size_t>(k + stencil.accuracy);
    const double sign = side == Side::Right ? 1.0 : -1.0;
    if (side == Side::Right ? node + npts > field.size() : node + 1 < npts) {
        throw Error(ErrorCode::GridTooSmall, "one-sided stencil does not fit");
    }
    std::vector<double> offsets(npts);
    for (std::size_t j = 0; j < npts; ++j) offsets[j] = sign * static_cast<double>(j);
    const auto w = fd_weights(k, offsets);

    T acc{};
    for (std::size_t j = 0; j < npts; ++j) {
        const std::size_t idx = side == Side::Right ? node + j : node - j;
        acc += w[j] * field[idx];
    }
    return acc * (1.0 / std::pow(field.grid().h(), k));
}

template <class T>
T one_sided_deriv_at_zero(const SampledField<T>& field, int k, BoundaryStencil stencil, Side side) {
    const auto origin = field.grid().origin();
    if (!origin) throw Error(ErrorCode::InvalidArgument, "grid has no node at s = 0");
    return one_sided_deriv(field, *origin, k, side, stencil);
}

Vec3 project_unit(const Vec3& v) {
    constexpr double slack = 4.0 * std::numeric_limits<double>::epsilon();
    double n2 = dot(v, v);
    if (!(n2 >= 0.25)) throw Error(ErrorCode::DegenerateVector, "vector norm below 0.5");
    Vec3 out = v;
    // Values already on the sphere to a few ulps are left untouched, which makes
    // the projection an exact fixed point of itself.
    for (int pass = 0; pass < 3 && std::fabs(n2 - 1.0) > slack; ++pass) {
        out = out / std::sqrt(n2);
        n2 = dot(out, out);
    }
    return out;
}

VectorField normalize_field(const VectorField& field) {
    std::vector<Vec3> out(field.size());
    std::transform(field.values().begin(), field.values().end(), out.begin(), project_unit);
    return VectorField(field.grid(), std::move(out));
}

double max_norm_deviation(std::span<const Vec3> values) {
    double worst = 0.0;
    for (const auto& v : values) worst = std::max(worst, std::fabs(norm(v) - 1.0));
    return worst;
}

double max_norm_deviation(const VectorField& field) { return max_norm_deviation(field.values()); }

double integrate(const ScalarField& field) {
    const auto v = field.values();
    double sum = 0.0;
    for (double x : v) sum += x;
    if (!field.grid().is_periodic()) sum -= 0.5 * (v.front() + v.back());
    return sum * field.grid().h();
}

template void deriv_into<double>(std::span<const double>, std::span<double>, double, int, bool);
template void deriv_into<Vec3>(std::span<const Vec3>, std::span<Vec3>, double, int, bool);
template ScalarField deriv<double>(const ScalarField&, int);
template VectorField deriv<Vec3>(const VectorField&, int);
template double one_sided_deriv<double>(const ScalarField&, std::size_t, int, Side, BoundaryStencil);
template Vec3 one_sided_deriv<Vec3>(const VectorField&, std::size_t, int, Side, BoundaryStencil);
template double one_sided_deriv_at_zero<double>(const ScalarField&, int, BoundaryStencil, Side);
template Vec3 one_sided_deriv_at_zero<Vec3>(const VectorField&, int, BoundaryStencil, Side);

}  // namespace vfil
